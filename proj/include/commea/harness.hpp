#pragma once

// Experiment harness: run records (JSON), run matrices, rank tables and
// plot data (CSV). Schemas are listed in the README.

#include "coevolution.hpp"
#include "metrics.hpp"
#include "problems.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace commea {

inline constexpr const char* record_schema_version = "1.0";
inline constexpr int record_schema_major = 1;
inline constexpr std::size_t default_reference_size = 500;

/// Error surfaced to CLI users as a one-line diagnostic.
class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TraceRow {
    std::size_t generation = 0;
    Real eps = 0.0;
    Real igd = 0.0;
    Real igdx = 0.0;
};

struct RecordMetrics {
    Real igd = 0.0;
    Real igdx = 0.0;
    Real igdx_normalized = 0.0;
    std::size_t reference_size = 0;
    bool reference_includes_local = false;
};

/// Persisted outcome of one seeded run.
struct RunRecord {
    RunConfig config;
    std::size_t replicate = 0;
    std::size_t generations = 0;
    std::size_t fe_used = 0;
    Matrix ca_x, ca_f;
    std::optional<Matrix> da_x, da_f;
    std::vector<TraceRow> trace;
    std::vector<std::string> flags;
    RecordMetrics metrics;
    std::optional<Real> wall_time_s;

    bool ablation() const { return config.mode == Mode::ca_only; }
    const Matrix& answer_x() const { return da_x ? *da_x : ca_x; }
    const Matrix& answer_f() const { return da_f ? *da_f : ca_f; }
};

struct ExecuteOptions {
    bool trace = false;
    bool timing = false;
    std::size_t replicate = 0;
    std::size_t reference_size = default_reference_size;
};

/// Reference set used to score a run: local branches are included exactly
/// when epsilon is positive and the problem has them.
inline ReferenceSet reference_for(const Problem& problem, Real epsilon, std::size_t count)
{
    const bool local = epsilon > 0.0 && problem.has_local_branches();
    return problem.sample_reference(count, local ? ReferenceKind::global_and_local : ReferenceKind::global);
}

/// Resolves the problem, fills defaulted fields (mutation rate) and runs.
inline RunRecord execute(RunConfig config, const ExecuteOptions& options = {})
{
    const auto problem = make_problem(config.problem);
    config.problem = problem->id();
    config.pm_rate = config.mutation_rate(problem->dimension());
    const ReferenceSet reference = reference_for(*problem, config.epsilon, options.reference_size);

    RunOptions run_options;
    run_options.trace = options.trace;
    run_options.reference = &reference;

    const auto start = std::chrono::steady_clock::now();
    RunResult result = run(config, *problem, run_options);
    const auto stop = std::chrono::steady_clock::now();

    RunRecord record;
    record.config = config;
    record.replicate = options.replicate;
    record.generations = result.generations;
    record.fe_used = result.fe_used;
    record.ca_x = decisions_of(result.ca.members);
    record.ca_f = objectives_of(result.ca.members);
    if (result.da) {
        record.da_x = decisions_of(result.da->members);
        record.da_f = objectives_of(result.da->members);
    }
    for (const auto& entry : result.trace)
        record.trace.push_back({entry.generation, entry.eps, entry.igd.value_or(0.0), entry.igdx.value_or(0.0)});
    record.flags.assign(result.flags.begin(), result.flags.end());
    record.metrics.igd = igd(record.answer_f(), reference);
    record.metrics.igdx = igdx(record.answer_x(), reference);
    record.metrics.igdx_normalized = igdx_normalized(record.answer_x(), reference, problem->box());
    record.metrics.reference_size = reference.size();
    record.metrics.reference_includes_local = reference.includes_local;
    if (options.timing)
        record.wall_time_s = std::chrono::duration<Real>(stop - start).count();
    return record;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

    inline nlohmann::json real_to_json(Real v)
    {
        if (std::isfinite(v))
            return v;
        return nullptr;
    }

    inline Real real_from_json(const nlohmann::json& j)
    {
        return j.is_null() ? std::numeric_limits<Real>::infinity() : j.get<Real>();
    }

} // namespace detail

inline nlohmann::json config_to_json(const RunConfig& c)
{
    return {{"problem", c.problem},   {"pop", c.population},   {"evals", c.max_fe},
            {"eps", c.epsilon},       {"seed", c.seed},        {"mode", to_string(c.mode)},
            {"sbx_eta", c.sbx_eta},   {"pm_eta", c.pm_eta},    {"sbx_rate", c.sbx_rate},
            {"pm_rate", c.pm_rate}};
}

inline RunConfig config_from_json(const nlohmann::json& j)
{
    RunConfig c;
    c.problem = j.at("problem").get<std::string>();
    c.population = j.at("pop").get<std::size_t>();
    c.max_fe = j.at("evals").get<std::size_t>();
    c.epsilon = j.at("eps").get<Real>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.mode = parse_mode(j.at("mode").get<std::string>());
    c.sbx_eta = j.at("sbx_eta").get<Real>();
    c.pm_eta = j.at("pm_eta").get<Real>();
    c.sbx_rate = j.at("sbx_rate").get<Real>();
    c.pm_rate = j.at("pm_rate").get<Real>();
    return c;
}

inline nlohmann::json to_json(const RunRecord& r)
{
    nlohmann::json j;
    j["schema_version"] = record_schema_version;
    j["problem"] = r.config.problem;
    j["config"] = config_to_json(r.config);
    j["replicate"] = r.replicate;
    j["ablation"] = r.ablation();
    j["generations"] = r.generations;
    j["fe_used"] = r.fe_used;
    j["flags"] = r.flags;
    j["metrics"] = {{"igd", detail::real_to_json(r.metrics.igd)},
                    {"igdx", detail::real_to_json(r.metrics.igdx)},
                    {"igdx_normalized", detail::real_to_json(r.metrics.igdx_normalized)},
                    {"reference_size", r.metrics.reference_size},
                    {"reference_includes_local", r.metrics.reference_includes_local}};
    j["ca"] = {{"x", r.ca_x}, {"f", r.ca_f}};
    if (r.da_x)
        j["da"] = {{"x", *r.da_x}, {"f", *r.da_f}};
    if (!r.trace.empty()) {
        auto& rows = j["trace"] = nlohmann::json::array();
        for (const auto& t : r.trace)
            rows.push_back({{"generation", t.generation},
                            {"eps", t.eps},
                            {"igd", detail::real_to_json(t.igd)},
                            {"igdx", detail::real_to_json(t.igdx)}});
    }
    if (r.wall_time_s)
        j["wall_time_s"] = *r.wall_time_s;
    return j;
}

inline RunRecord record_from_json(const nlohmann::json& j)
{
    const std::string version = j.at("schema_version").get<std::string>();
    int major = -1;
    std::from_chars(version.data(), version.data() + version.size(), major);
    if (major != record_schema_major)
        throw HarnessError("unsupported record schema version " + version);

    RunRecord r;
    r.config = config_from_json(j.at("config"));
    r.replicate = j.value("replicate", std::size_t{0});
    r.generations = j.at("generations").get<std::size_t>();
    r.fe_used = j.at("fe_used").get<std::size_t>();
    r.flags = j.value("flags", std::vector<std::string>{});
    const auto& m = j.at("metrics");
    r.metrics.igd = detail::real_from_json(m.at("igd"));
    r.metrics.igdx = detail::real_from_json(m.at("igdx"));
    r.metrics.igdx_normalized = detail::real_from_json(m.at("igdx_normalized"));
    r.metrics.reference_size = m.at("reference_size").get<std::size_t>();
    r.metrics.reference_includes_local = m.at("reference_includes_local").get<bool>();
    r.ca_x = j.at("ca").at("x").get<Matrix>();
    r.ca_f = j.at("ca").at("f").get<Matrix>();
    if (j.contains("da")) {
        r.da_x = j.at("da").at("x").get<Matrix>();
        r.da_f = j.at("da").at("f").get<Matrix>();
    }
    if (j.contains("trace"))
        for (const auto& t : j.at("trace"))
            r.trace.push_back({t.at("generation").get<std::size_t>(), t.at("eps").get<Real>(),
                               detail::real_from_json(t.at("igd")), detail::real_from_json(t.at("igdx"))});
    if (j.contains("wall_time_s"))
        r.wall_time_s = j.at("wall_time_s").get<Real>();
    return r;
}

inline std::string dump_record(const RunRecord& r) { return to_json(r).dump(1) + "\n"; }

/// Writes `content` to a sibling temporary file, then renames it over `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw HarnessError("cannot write " + tmp.string());
        out << content;
        if (!out.flush())
            throw HarnessError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline RunRecord load_record(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw HarnessError("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        return record_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw HarnessError("malformed record " + path.string() + ": " + e.what());
    }
}

/// All *.json records in `dir`, in file-name order.
inline std::vector<RunRecord> load_records(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw HarnessError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> records;
    for (const auto& f : files)
        records.push_back(load_record(f));
    return records;
}

// ---------------------------------------------------------------------------
// Matrix

struct MatrixSpec {
    std::vector<std::string> problems;
    std::vector<Mode> modes{Mode::full};
    std::size_t seeds = 30;
    std::uint64_t base_seed = 1;
    std::optional<std::size_t> population;
    std::optional<std::size_t> max_fe;
    Real epsilon = 0.1;
    bool trace = false;
};

struct MatrixCell {
    std::size_t index = 0;
    RunConfig config;
    std::size_t replicate = 0;

    std::string file_name() const
    {
        return config.problem + "__" + to_string(config.mode) + "__r" + std::to_string(replicate) + ".json";
    }
};

inline MatrixSpec matrix_spec_from_json(const nlohmann::json& j)
{
    MatrixSpec spec;
    try {
        spec.problems = j.at("problems").get<std::vector<std::string>>();
        if (j.contains("modes")) {
            spec.modes.clear();
            for (const auto& m : j.at("modes"))
                spec.modes.push_back(parse_mode(m.get<std::string>()));
        }
        spec.seeds = j.value("seeds", spec.seeds);
        spec.base_seed = j.value("base_seed", spec.base_seed);
        if (j.contains("pop"))
            spec.population = j.at("pop").get<std::size_t>();
        if (j.contains("evals"))
            spec.max_fe = j.at("evals").get<std::size_t>();
        spec.epsilon = j.value("eps", spec.epsilon);
        spec.trace = j.value("trace", spec.trace);
    } catch (const nlohmann::json::exception& e) {
        throw HarnessError(std::string("malformed matrix config: ") + e.what());
    }
    if (spec.problems.empty() || spec.modes.empty() || spec.seeds == 0)
        throw HarnessError("matrix config needs at least one problem, mode and seed");
    return spec;
}

/// Population 100*D and budget 5000*D unless given.
inline RunConfig default_config(const Problem& problem)
{
    RunConfig c;
    c.problem = problem.id();
    c.population = 100 * problem.dimension();
    c.max_fe = 5000 * problem.dimension();
    return c;
}

/// Cross product problems x modes x replicates; cell c runs with seed base_seed + c.
inline std::vector<MatrixCell> expand(const MatrixSpec& spec)
{
    std::vector<MatrixCell> cells;
    for (const auto& id : spec.problems) {
        const auto problem = make_problem(id);
        for (const Mode mode : spec.modes)
            for (std::size_t r = 0; r < spec.seeds; ++r) {
                MatrixCell cell;
                cell.index = cells.size();
                cell.replicate = r;
                cell.config = default_config(*problem);
                if (spec.population)
                    cell.config.population = *spec.population;
                if (spec.max_fe)
                    cell.config.max_fe = *spec.max_fe;
                cell.config.epsilon = spec.epsilon;
                cell.config.mode = mode;
                cell.config.seed = spec.base_seed + cell.index;
                cells.push_back(std::move(cell));
            }
    }
    return cells;
}

struct MatrixOutcome {
    std::vector<std::filesystem::path> written;
    // (file name, reason) per failed cell.
    std::vector<std::pair<std::string, std::string>> failed;
};

inline MatrixOutcome run_matrix(const MatrixSpec& spec, const std::filesystem::path& out_dir, std::size_t jobs)
{
    const auto cells = expand(spec);
    std::filesystem::create_directories(out_dir);
    MatrixOutcome outcome;
    std::mutex guard;
    std::atomic<std::size_t> next{0};
    std::vector<std::optional<std::filesystem::path>> written(cells.size());

    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto& cell = cells[i];
            try {
                ExecuteOptions options;
                options.trace = spec.trace;
                options.replicate = cell.replicate;
                const auto path = out_dir / cell.file_name();
                write_atomically(path, dump_record(execute(cell.config, options)));
                written[i] = path;
            } catch (const std::exception& e) {
                const std::lock_guard lock(guard);
                outcome.failed.emplace_back(cell.file_name(), e.what());
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(cells.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t)
        pool.emplace_back(worker);
    worker();
    pool.clear();

    for (auto& w : written)
        if (w)
            outcome.written.push_back(*w);
    std::sort(outcome.failed.begin(), outcome.failed.end());
    return outcome;
}

// ---------------------------------------------------------------------------
// Rank table

struct TableRow {
    std::string problem;
    std::string mode;
    std::string metric;
    std::optional<Real> mean;
    std::optional<Real> std;
    Real rank = 0.0;
};

inline constexpr const char* overall_problem = "overall";

/// Per-problem mean/std of IGD and IGDX per mode, with Friedman-style mean
/// ranks: modes are ranked within every (problem, replicate) block, averaged
/// over replicates per problem, then averaged over problems ("overall" rows).
inline std::vector<TableRow> build_table(const std::vector<RunRecord>& records)
{
    if (records.empty())
        throw HarnessError("no records");
    std::vector<std::string> problems, modes;
    std::map<std::string, std::vector<std::size_t>> replicates_of;
    std::map<std::tuple<std::string, std::string, std::size_t>, const RunRecord*> cells;
    for (const auto& r : records) {
        const std::string p = r.config.problem;
        const std::string m = to_string(r.config.mode);
        if (std::find(problems.begin(), problems.end(), p) == problems.end())
            problems.push_back(p);
        if (std::find(modes.begin(), modes.end(), m) == modes.end())
            modes.push_back(m);
        auto& reps = replicates_of[p];
        if (std::find(reps.begin(), reps.end(), r.replicate) == reps.end())
            reps.push_back(r.replicate);
        if (!cells.emplace(std::make_tuple(p, m, r.replicate), &r).second)
            throw HarnessError("duplicate record for " + p + " " + m + " replicate " + std::to_string(r.replicate));
    }
    std::sort(problems.begin(), problems.end());
    std::sort(modes.begin(), modes.end());

    std::vector<std::string> missing;
    for (const auto& p : problems) {
        auto& reps = replicates_of[p];
        std::sort(reps.begin(), reps.end());
        for (const auto& m : modes)
            for (const std::size_t r : reps)
                if (!cells.count({p, m, r}))
                    missing.push_back(p + "/" + m + "/r" + std::to_string(r));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& s : missing)
            list += (list.empty() ? "" : ", ") + s;
        throw HarnessError("ragged matrix, missing cells: " + list);
    }

    std::vector<TableRow> rows;
    const std::vector<std::pair<std::string, Real RecordMetrics::*>> metrics{{"IGD", &RecordMetrics::igd},
                                                                             {"IGDX", &RecordMetrics::igdx}};
    for (const auto& [metric, field] : metrics) {
        // per_problem_rank[mode][problem]
        Matrix per_problem_rank(modes.size(), Vector(problems.size(), 0.0));
        for (std::size_t p = 0; p < problems.size(); ++p) {
            const auto& reps = replicates_of[problems[p]];
            Matrix scores(modes.size(), Vector(reps.size(), 0.0));
            for (std::size_t a = 0; a < modes.size(); ++a)
                for (std::size_t b = 0; b < reps.size(); ++b)
                    scores[a][b] = cells.at({problems[p], modes[a], reps[b]})->metrics.*field;
            const RankTable ranks = mean_ranks(scores, true);
            for (std::size_t a = 0; a < modes.size(); ++a) {
                const Vector& v = scores[a];
                Real mean = 0.0;
                for (const Real x : v)
                    mean += x;
                mean /= static_cast<Real>(v.size());
                Real var = 0.0;
                for (const Real x : v)
                    var += (x - mean) * (x - mean);
                const Real sd = v.size() > 1 ? std::sqrt(var / static_cast<Real>(v.size() - 1)) : 0.0;
                rows.push_back({problems[p], modes[a], metric, mean, sd, ranks.mean[a]});
                per_problem_rank[a][p] = ranks.mean[a];
            }
        }
        for (std::size_t a = 0; a < modes.size(); ++a) {
            Real sum = 0.0;
            for (const Real r : per_problem_rank[a])
                sum += r;
            rows.push_back({overall_problem, modes[a], metric, std::nullopt, std::nullopt,
                            sum / static_cast<Real>(problems.size())});
        }
    }
    return rows;
}

/// Shortest decimal text that round-trips.
inline std::string format_number(Real v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string table_csv(const std::vector<TableRow>& rows)
{
    std::string out = "problem,mode,metric,mean,std,rank\n";
    for (const auto& r : rows) {
        out += r.problem + "," + r.mode + "," + r.metric + ",";
        out += (r.mean ? format_number(*r.mean) : "") + ",";
        out += (r.std ? format_number(*r.std) : "") + ",";
        out += format_number(r.rank) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plot data

enum class PlotKind { eps_curve, trace_metrics, scatter_decision, scatter_objective };

inline PlotKind parse_plot_kind(const std::string& text)
{
    if (text == "eps_curve")
        return PlotKind::eps_curve;
    if (text == "trace_metrics")
        return PlotKind::trace_metrics;
    if (text == "scatter_decision")
        return PlotKind::scatter_decision;
    if (text == "scatter_objective")
        return PlotKind::scatter_objective;
    throw HarnessError("unknown plot kind '" + text +
                       "' (expected eps_curve, trace_metrics, scatter_decision or scatter_objective)");
}

enum class ArchiveChoice { answer, ca, da };

inline std::string plot_csv(const RunRecord& record, PlotKind kind, ArchiveChoice archive = ArchiveChoice::answer)
{
    std::string out;
    switch (kind) {
    case PlotKind::eps_curve: {
        const std::size_t g = generations_for_budget(record.config.population, record.config.max_fe);
        if (g == 0)
            throw HarnessError("budget allows no generations");
        const EpsSchedule schedule{record.config.epsilon, g};
        out = "stage,eps\n";
        for (std::size_t i = 1; i <= g; ++i)
            out += format_number(static_cast<Real>(i) / static_cast<Real>(g)) + "," +
                   format_number(schedule.at(i)) + "\n";
        return out;
    }
    case PlotKind::trace_metrics:
        if (record.trace.empty())
            throw HarnessError("record has no trace (rerun with --trace)");
        out = "generation,igd,igdx\n";
        for (const auto& t : record.trace)
            out += std::to_string(t.generation) + "," + format_number(t.igd) + "," + format_number(t.igdx) + "\n";
        return out;
    case PlotKind::scatter_decision:
    case PlotKind::scatter_objective: {
        const bool decision = kind == PlotKind::scatter_decision;
        const Matrix* rows = nullptr;
        if (archive == ArchiveChoice::ca)
            rows = decision ? &record.ca_x : &record.ca_f;
        else if (archive == ArchiveChoice::da) {
            if (!record.da_x)
                throw HarnessError("record has no diversity archive (ca-only run)");
            rows = decision ? &*record.da_x : &*record.da_f;
        } else
            rows = decision ? &record.answer_x() : &record.answer_f();
        const std::size_t width = rows->empty() ? 0 : rows->front().size();
        for (std::size_t k = 0; k < width; ++k)
            out += (k ? "," : "") + std::string(decision ? "x" : "f") + std::to_string(k + 1);
        out += "\n";
        for (const auto& row : *rows) {
            for (std::size_t k = 0; k < row.size(); ++k)
                out += (k ? "," : "") + format_number(row[k]);
            out += "\n";
        }
        return out;
    }
    }
    return out;
}

} // namespace commea
