#pragma once

// Parent selection and real-coded variation (SBX + polynomial mutation).

#include "core.hpp"

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace commea {

struct VariationParams {
    Real sbx_eta = 20.0;
    Real pm_eta = 20.0;
    Real sbx_rate = 1.0;
    Real pm_rate = 0.5;

    void validate() const
    {
        require(sbx_eta > 0.0 && pm_eta > 0.0, "VariationParams: distribution indices must be positive");
        require(sbx_rate >= 0.0 && sbx_rate <= 1.0, "VariationParams: crossover rate must lie in [0, 1]");
        require(pm_rate >= 0.0 && pm_rate <= 1.0, "VariationParams: mutation rate must lie in [0, 1]");
    }

    static VariationParams from(const RunConfig& cfg, std::size_t dimension)
    {
        return {cfg.sbx_eta, cfg.pm_eta, cfg.sbx_rate, cfg.mutation_rate(dimension)};
    }
};

enum class Better { smaller, larger };

/// k binary tournaments with replacement. Returns the winners' indices.
inline std::vector<std::size_t> tournament_indices(std::span<const Real> fitness, std::size_t k, Better better,
                                                   RandomStream& rng)
{
    require(!fitness.empty() || k == 0, "tournament_select: empty population");
    std::vector<std::size_t> winners;
    winners.reserve(k);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t a = rng.index(fitness.size());
        const std::size_t b = rng.index(fitness.size());
        std::size_t winner;
        if (fitness[a] == fitness[b])
            winner = rng.bernoulli(0.5) ? a : b;
        else if (better == Better::smaller)
            winner = fitness[a] < fitness[b] ? a : b;
        else
            winner = fitness[a] > fitness[b] ? a : b;
        winners.push_back(winner);
    }
    return winners;
}

inline Population tournament_select(std::span<const Solution> pop, std::span<const Real> fitness, std::size_t k,
                                    Better better, RandomStream& rng)
{
    require(pop.size() == fitness.size(), "tournament_select: fitness not aligned with population");
    Population out;
    out.reserve(k);
    for (const std::size_t i : tournament_indices(fitness, k, better, rng))
        out.push_back(pop[i]);
    return out;
}

/// SBX spread factor for a uniform draw u in [0, 1).
inline Real sbx_spread(Real u, Real eta)
{
    if (u <= 0.5)
        return std::pow(2.0 * u, 1.0 / (eta + 1.0));
    return std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
}

/// Simulated binary crossover on decision vectors; children are clamped to the box.
inline std::pair<Vector, Vector> sbx_crossover(std::span<const Real> pa, std::span<const Real> pb,
                                               const VariationParams& params, const Box& box, RandomStream& rng)
{
    require(pa.size() == pb.size() && pa.size() == box.dimension(), "sbx_crossover: parent length mismatch");
    Vector c1(pa.begin(), pa.end());
    Vector c2(pb.begin(), pb.end());
    if (!rng.bernoulli(params.sbx_rate))
        return {std::move(c1), std::move(c2)};
    for (std::size_t k = 0; k < c1.size(); ++k) {
        const Real beta = sbx_spread(rng.uniform(), params.sbx_eta);
        if (!rng.bernoulli(0.5) || pa[k] == pb[k])
            continue;
        c1[k] = 0.5 * ((1.0 + beta) * pa[k] + (1.0 - beta) * pb[k]);
        c2[k] = 0.5 * ((1.0 - beta) * pa[k] + (1.0 + beta) * pb[k]);
    }
    return {clamp_to_bounds(box, std::move(c1)), clamp_to_bounds(box, std::move(c2))};
}

/// Bounded polynomial perturbation of one variable for a uniform draw r.
inline Real polynomial_step(Real x, Real lower, Real upper, Real r, Real eta)
{
    const Real range = upper - lower;
    const Real d1 = (x - lower) / range;
    const Real d2 = (upper - x) / range;
    const Real power = 1.0 / (eta + 1.0);
    Real dq;
    if (r < 0.5) {
        const Real v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
        dq = std::pow(v, power) - 1.0;
    } else {
        const Real v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
        dq = 1.0 - std::pow(v, power);
    }
    return x + dq * range;
}

inline Vector polynomial_mutation(std::span<const Real> p, const VariationParams& params, const Box& box,
                                  RandomStream& rng)
{
    require(p.size() == box.dimension(), "polynomial_mutation: wrong decision vector length");
    Vector x(p.begin(), p.end());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!rng.bernoulli(params.pm_rate))
            continue;
        x[k] = polynomial_step(x[k], box.lower[k], box.upper[k], rng.uniform(), params.pm_eta);
    }
    return clamp_to_bounds(box, std::move(x));
}

struct OffspringBatch {
    Population offspring;
    // The evaluation budget ran out before the batch was complete.
    bool exhausted = false;
};

/// SBX + PM over consecutive parent pairs; an odd last parent is only mutated.
/// Every child is evaluated through `evaluator`.
inline OffspringBatch make_offspring(std::span<const Solution> parents, const VariationParams& params,
                                     Evaluator& evaluator, RandomStream& rng)
{
    const Box& box = evaluator.problem().box();
    OffspringBatch batch;
    batch.offspring.reserve(parents.size());
    auto emit = [&](Vector x) {
        if (evaluator.remaining() == 0) {
            batch.exhausted = true;
            return;
        }
        batch.offspring.push_back(evaluator.evaluate(std::move(x)));
    };

    std::size_t i = 0;
    for (; i + 1 < parents.size() && !batch.exhausted; i += 2) {
        auto [c1, c2] = sbx_crossover(parents[i].x, parents[i + 1].x, params, box, rng);
        Vector m1 = polynomial_mutation(c1, params, box, rng);
        Vector m2 = polynomial_mutation(c2, params, box, rng);
        emit(std::move(m1));
        emit(std::move(m2));
    }
    if (i < parents.size() && !batch.exhausted)
        emit(polynomial_mutation(parents[i].x, params, box, rng));
    return batch;
}

} // namespace commea
