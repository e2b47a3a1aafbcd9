#include <commea/harness.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

using namespace commea;

void emit(const std::string& text, const std::string& out)
{
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_atomically(out, text);
}

std::size_t default_jobs()
{
    if (const char* env = std::getenv("COMMEA_JOBS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return v;
        throw HarnessError(std::string("COMMEA_JOBS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct RunArgs {
    std::string problem;
    std::optional<std::size_t> pop, evals;
    Real eps = 0.1;
    std::uint64_t seed = 1;
    std::string mode = "full";
    bool trace = false;
    bool timing = false;
    std::string out;
};

int cmd_run(const RunArgs& a)
{
    const auto problem = make_problem(a.problem);
    RunConfig config = default_config(*problem);
    if (a.pop)
        config.population = *a.pop;
    if (a.evals)
        config.max_fe = *a.evals;
    config.epsilon = a.eps;
    config.seed = a.seed;
    config.mode = parse_mode(a.mode);
    ExecuteOptions options;
    options.trace = a.trace;
    options.timing = a.timing;
    emit(dump_record(execute(config, options)), a.out);
    return 0;
}

struct MatrixArgs {
    std::string config;
    std::string out = "records";
    std::optional<std::size_t> seeds;
    std::optional<std::size_t> jobs;
};

int cmd_matrix(const MatrixArgs& a)
{
    std::ifstream in(a.config);
    if (!in)
        throw HarnessError("cannot read " + a.config);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw HarnessError("malformed matrix config: " + std::string(e.what()));
    }
    MatrixSpec spec = matrix_spec_from_json(j);
    if (a.seeds) {
        if (*a.seeds == 0)
            throw HarnessError("--seeds must be positive");
        spec.seeds = *a.seeds;
    }
    const auto outcome = run_matrix(spec, a.out, a.jobs ? *a.jobs : default_jobs());
    std::cerr << outcome.written.size() << " records written to " << a.out << "\n";
    if (outcome.failed.empty())
        return 0;
    std::cerr << outcome.failed.size() << " cells failed:\n";
    for (const auto& [cell, reason] : outcome.failed)
        std::cerr << "  " << cell << ": " << reason << "\n";
    return 1;
}

int cmd_table(const std::string& dir, const std::string& out)
{
    emit(table_csv(build_table(load_records(dir))), out);
    return 0;
}

int cmd_plotdata(const std::string& record, const std::string& kind, const std::string& archive,
                 const std::string& out)
{
    ArchiveChoice choice = ArchiveChoice::answer;
    if (archive == "ca")
        choice = ArchiveChoice::ca;
    else if (archive == "da")
        choice = ArchiveChoice::da;
    else if (!archive.empty())
        throw HarnessError("unknown archive '" + archive + "' (expected ca or da)");
    emit(plot_csv(load_record(record), parse_plot_kind(kind), choice), out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-archive coevolutionary multimodal multi-objective optimizer"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute one seeded run and write its JSON record");
    run->add_option("--problem", run_args.problem, "Problem id, e.g. sinemirror, polygon-k4-m3-d10")->required();
    run->add_option("--pop", run_args.pop, "Population size N (default 100*D)");
    run->add_option("--evals", run_args.evals, "Evaluation budget (default 5000*D)");
    run->add_option("--eps", run_args.eps, "Acceptable local degradation epsilon")->capture_default_str();
    run->add_option("--seed", run_args.seed, "Random seed")->capture_default_str();
    run->add_option("--mode", run_args.mode, "full or ca-only")
        ->check(CLI::IsMember({"full", "ca-only"}))
        ->capture_default_str();
    run->add_flag("--trace", run_args.trace, "Record per-generation epsilon, IGD and IGDX");
    run->add_flag("--timing", run_args.timing, "Record wall time (makes records non-reproducible)");
    run->add_option("--out", run_args.out, "Output file (default stdout)");

    MatrixArgs matrix_args;
    auto* matrix = app.add_subcommand("matrix", "Execute problems x modes x seeds, one record per cell");
    matrix->add_option("config", matrix_args.config, "Matrix JSON config")->required();
    matrix->add_option("--out", matrix_args.out, "Output directory")->capture_default_str();
    matrix->add_option("--seeds", matrix_args.seeds, "Replicates per cell (overrides config; default 30)");
    matrix->add_option("--jobs", matrix_args.jobs, "Concurrent cells (default $COMMEA_JOBS or core count)");

    std::string table_dir, table_out;
    auto* table = app.add_subcommand("table", "Mean/std and mean ranks of IGD and IGDX as CSV");
    table->add_option("records", table_dir, "Directory of records")->required();
    table->add_option("--out", table_out, "Output file (default stdout)");

    std::string plot_record, plot_kind, plot_archive, plot_out;
    auto* plot = app.add_subcommand("plotdata", "Plot-ready CSV from one record");
    plot->add_option("record", plot_record, "Record JSON file")->required();
    plot->add_option("--kind", plot_kind, "eps_curve, trace_metrics, scatter_decision or scatter_objective")
        ->required();
    plot->add_option("--archive", plot_archive, "ca or da for scatter kinds (default: the answer archive)");
    plot->add_option("--out", plot_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "commea: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*run)
            return cmd_run(run_args);
        if (*matrix)
            return cmd_matrix(matrix_args);
        if (*table)
            return cmd_table(table_dir, table_out);
        return cmd_plotdata(plot_record, plot_kind, plot_archive, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "commea: " << e.what() << "\n";
        return 1;
    }
}
