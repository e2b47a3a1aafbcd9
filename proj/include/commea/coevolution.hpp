#pragma once

// Two-archive coevolutionary engine.
//
// A convergence archive (CA) runs SPEA2-style environmental selection. A
// diversity archive (DA) keeps members that lie inside an epsilon strip above
// the current global front and are non-dominated within their decision-space
// niche. Both archives are updated from the union of both offspring sets.

#include "core.hpp"
#include "dominance.hpp"
#include "metrics.hpp"
#include "niching.hpp"
#include "variation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace commea {

/// Generation-indexed epsilon: eps_i = max(log2(G / i), user_eps).
struct EpsSchedule {
    Real user_eps = 0.0;
    std::size_t max_gen = 1;

    Real at(std::size_t generation) const
    {
        require(generation >= 1 && generation <= max_gen, "eps_at: generation outside [1, G]");
        const Real stage = std::log2(static_cast<Real>(max_gen) / static_cast<Real>(generation));
        return std::max(stage, user_eps);
    }
};

inline Real eps_at(const EpsSchedule& schedule, std::size_t generation) { return schedule.at(generation); }

/// Number of full generations that fit the budget after initialization:
/// floor((max_fe - 2N) / (3N/2)).
inline std::size_t generations_for_budget(std::size_t population, std::size_t max_fe)
{
    require(population >= 2 && population % 2 == 0, "generations_for_budget: population must be even");
    if (max_fe < 2 * population)
        return 0;
    return (max_fe - 2 * population) / (3 * population / 2);
}

struct SelectionOutcome {
    Population members;
    Vector fitness;
    // Fewer candidates than capacity were available.
    bool undersized = false;
    // Diversity-archive diagnostics: size of the epsilon strip and of its
    // locally non-dominated subset.
    std::size_t band_size = 0;
    std::size_t local_nondominated = 0;
};

namespace detail {

    inline Population join(std::span<const Solution> a, std::span<const Solution> b, std::span<const Solution> c)
    {
        Population joint;
        joint.reserve(a.size() + b.size() + c.size());
        joint.insert(joint.end(), a.begin(), a.end());
        joint.insert(joint.end(), b.begin(), b.end());
        joint.insert(joint.end(), c.begin(), c.end());
        return joint;
    }

    inline Population pick(std::span<const Solution> pop, std::span<const std::size_t> indices)
    {
        Population out;
        out.reserve(indices.size());
        for (const std::size_t i : indices)
            out.push_back(pop[i]);
        return out;
    }

} // namespace detail

/// Convergence-archive update.
///
/// SPEA2 fitness over CA + OffC + OffD. With fewer than N non-dominated
/// members the N best by (fitness, larger crowding distance) are kept;
/// otherwise the non-dominated set is truncated by objective-space crowding.
inline SelectionOutcome env_select_ca(std::span<const Solution> ca, std::span<const Solution> off_c,
                                      std::span<const Solution> off_d, std::size_t capacity, const Box& box)
{
    const Population joint = detail::join(ca, off_c, off_d);
    SelectionOutcome out;
    if (joint.size() <= capacity) {
        out.undersized = joint.size() < capacity;
        out.members = joint;
    } else {
        const Vector fitness = spea2_fitness(joint);
        std::vector<std::size_t> nondominated;
        for (std::size_t i = 0; i < joint.size(); ++i)
            if (fitness[i] < 1.0)
                nondominated.push_back(i);

        if (nondominated.size() < capacity) {
            const Vector crowd = crowd_distance(joint, Space::objective, box);
            std::vector<std::size_t> order(joint.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (fitness[a] != fitness[b])
                    return fitness[a] < fitness[b];
                return crowd[a] > crowd[b];
            });
            order.resize(capacity);
            out.members = detail::pick(joint, order);
        } else {
            const Population front = detail::pick(joint, nondominated);
            out.members = truncate_by_crowding(front, capacity, Space::objective, box);
        }
    }
    out.fitness = spea2_fitness(out.members);
    return out;
}

/// Diversity-archive update.
///
/// Step 1 keeps the members of DA + OffC + OffD inside the epsilon strip of
/// the joint global front. Step 2 scores the strip with the local convergence
/// indicator over its own niche graph. Step 3 keeps the locally non-dominated
/// members, truncated by combined-space crowding, or fills up by ascending
/// indicator when there are fewer than N of them. Fitness is the
/// decision-space crowding distance of the result.
inline SelectionOutcome env_select_da(std::span<const Solution> da, std::span<const Solution> off_c,
                                      std::span<const Solution> off_d, std::size_t capacity, Real eps,
                                      const Box& box)
{
    const Population joint = detail::join(da, off_c, off_d);
    SelectionOutcome out;

    const std::vector<std::size_t> front = first_front(joint);
    const std::vector<bool> in_band = eps_band_mask(joint, front, eps);
    std::vector<std::size_t> band;
    for (std::size_t i = 0; i < joint.size(); ++i)
        if (in_band[i])
            band.push_back(i);
    out.band_size = band.size();

    const Population strip = detail::pick(joint, band);
    const Vector indicator = local_convergence_indicator(strip, NeighborGraph::over(strip, box));
    std::vector<std::size_t> local_nd;
    for (std::size_t i = 0; i < strip.size(); ++i)
        if (indicator[i] == 0.0)
            local_nd.push_back(i);
    out.local_nondominated = local_nd.size();

    if (strip.size() < capacity) {
        // Strip too small: keep all of it, then fill from the rest of the
        // joint set by ascending indicator over the whole joint set.
        out.undersized = true;
        out.members = strip;
        const Vector joint_indicator = local_convergence_indicator(joint, NeighborGraph::over(joint, box));
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < joint.size(); ++i)
            if (!in_band[i])
                rest.push_back(i);
        std::stable_sort(rest.begin(), rest.end(),
                         [&](std::size_t a, std::size_t b) { return joint_indicator[a] < joint_indicator[b]; });
        for (std::size_t i = 0; i < rest.size() && out.members.size() < capacity; ++i)
            out.members.push_back(joint[rest[i]]);
    } else if (local_nd.size() < capacity) {
        std::vector<std::size_t> order(strip.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return indicator[a] < indicator[b]; });
        order.resize(capacity);
        out.members = detail::pick(strip, order);
    } else {
        const Population candidates = detail::pick(strip, local_nd);
        out.members = truncate_by_crowding(candidates, capacity, Space::combined, box);
    }
    out.fitness = out.members.size() >= 2 ? crowd_distance(out.members, Space::decision, box)
                                          : Vector(out.members.size(), 0.0);
    return out;
}

inline SelectionOutcome env_select_da(std::span<const Solution> da, std::span<const Solution> off_c,
                                      std::span<const Solution> off_d, std::size_t capacity,
                                      const EpsSchedule& schedule, std::size_t generation, const Box& box)
{
    return env_select_da(da, off_c, off_d, capacity, schedule.at(generation), box);
}

struct Snapshot {
    Matrix ca_x, ca_f, da_x, da_f;
};

struct TraceEntry {
    std::size_t generation = 0;
    Real eps = 0.0;
    std::optional<Real> igd;
    std::optional<Real> igdx;
    std::optional<Snapshot> archives;
};

struct RunOptions {
    bool trace = false;
    bool trace_archives = false;
    // Enables per-generation IGD/IGDX in the trace.
    const ReferenceSet* reference = nullptr;
};

struct RunResult {
    Archive ca;
    // Absent in ca_only mode.
    std::optional<Archive> da;
    std::size_t fe_used = 0;
    std::size_t generations = 0;
    std::vector<TraceEntry> trace;
    std::set<std::string> flags;

    /// The answer set: DA, or CA when the diversity archive is disabled.
    const Population& answer() const { return da ? da->members : ca.members; }
};

/// Mutable state of one run between generations.
struct EngineState {
    Archive ca;
    Archive da;
    EpsSchedule schedule;
    RandomStream rng;
    std::size_t generation = 0;
};

namespace detail {

    inline Population uniform_population(std::size_t count, Evaluator& evaluator, RandomStream& rng)
    {
        const Box& box = evaluator.problem().box();
        Population pop;
        pop.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            Vector x(box.dimension());
            for (std::size_t k = 0; k < x.size(); ++k)
                x[k] = rng.uniform(box.lower[k], box.upper[k]);
            pop.push_back(evaluator.evaluate(std::move(x)));
        }
        return pop;
    }

} // namespace detail

/// Runs the coevolutionary optimizer until the evaluation budget is spent.
///
/// Each generation costs 3N/2 evaluations: N/2 offspring from CA parents and
/// N from DA parents (both from CA in ca_only mode). Only whole generations
/// are run, so `fe_used` is 2N + G * 3N/2.
inline RunResult run(const RunConfig& config, const Problem& problem, const RunOptions& options = {})
{
    config.validate();
    const std::size_t n = config.population;
    const Box& box = problem.box();
    const VariationParams params = VariationParams::from(config, problem.dimension());
    params.validate();

    Evaluator evaluator(problem, config.max_fe);
    const std::size_t generations = generations_for_budget(n, config.max_fe);
    EngineState state{{}, {}, EpsSchedule{config.epsilon, std::max<std::size_t>(generations, 1)},
                      RandomStream(config.seed), 0};
    const bool full = config.mode == Mode::full;

    state.ca = Archive{detail::uniform_population(n, evaluator, state.rng), n, {}};
    state.ca.fitness = spea2_fitness(state.ca.members);
    if (full) {
        state.da = Archive{detail::uniform_population(n, evaluator, state.rng), n, {}};
        state.da.fitness = crowd_distance(state.da.members, Space::decision, box);
    } else {
        // The ablation still spends 2N evaluations on initialization so both
        // modes share one budget schedule.
        const Population extra = detail::uniform_population(n, evaluator, state.rng);
        Population joint = state.ca.members;
        joint.insert(joint.end(), extra.begin(), extra.end());
        const auto out = env_select_ca(joint, {}, {}, n, box);
        state.ca.members = out.members;
        state.ca.fitness = out.fitness;
    }

    RunResult result;
    if (generations == 0)
        result.flags.insert("no_generations");

    for (std::size_t gen = 1; gen <= generations; ++gen) {
        state.generation = gen;
        const Population parents_c =
            tournament_select(state.ca.members, state.ca.fitness, n / 2, Better::smaller, state.rng);
        const Population parents_d =
            full ? tournament_select(state.da.members, state.da.fitness, n, Better::larger, state.rng)
                 : tournament_select(state.ca.members, state.ca.fitness, n, Better::smaller, state.rng);

        OffspringBatch off_c = make_offspring(parents_c, params, evaluator, state.rng);
        OffspringBatch off_d = make_offspring(parents_d, params, evaluator, state.rng);
        if (off_c.exhausted || off_d.exhausted)
            result.flags.insert("budget_exhausted");

        const Real eps = state.schedule.at(gen);
        auto next_ca = env_select_ca(state.ca.members, off_c.offspring, off_d.offspring, n, box);
        if (next_ca.undersized)
            result.flags.insert("ca_undersized");
        if (full) {
            auto next_da = env_select_da(state.da.members, off_c.offspring, off_d.offspring, n, eps, box);
            if (next_da.undersized)
                result.flags.insert("da_band_undersized");
            state.da.members = std::move(next_da.members);
            state.da.fitness = std::move(next_da.fitness);
        }
        state.ca.members = std::move(next_ca.members);
        state.ca.fitness = std::move(next_ca.fitness);

        if (options.trace || options.trace_archives) {
            TraceEntry entry;
            entry.generation = gen;
            entry.eps = eps;
            const Population& answer = full ? state.da.members : state.ca.members;
            if (options.reference) {
                entry.igd = igd(objectives_of(answer), *options.reference);
                entry.igdx = igdx(decisions_of(answer), *options.reference);
            }
            if (options.trace_archives) {
                Snapshot snap;
                snap.ca_x = decisions_of(state.ca.members);
                snap.ca_f = objectives_of(state.ca.members);
                if (full) {
                    snap.da_x = decisions_of(state.da.members);
                    snap.da_f = objectives_of(state.da.members);
                }
                entry.archives = std::move(snap);
            }
            result.trace.push_back(std::move(entry));
        }
        if (off_c.exhausted || off_d.exhausted)
            break;
    }

    result.ca = std::move(state.ca);
    if (full)
        result.da = std::move(state.da);
    result.fe_used = evaluator.used();
    result.generations = state.generation;
    return result;
}

} // namespace commea
