#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace commea {

/// True iff fa is no worse than fb everywhere and strictly better somewhere.
inline bool pareto_dominates(std::span<const Real> fa, std::span<const Real> fb)
{
    require(fa.size() == fb.size(), "pareto_dominates: objective vectors differ in length");
    bool strictly_better = false;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (fa[i] > fb[i])
            return false;
        if (fa[i] < fb[i])
            strictly_better = true;
    }
    return strictly_better;
}

/// Translation that maps the ideal point of a set onto (1, ..., 1), so that
/// multiplicative epsilon bands are applied to strictly positive values.
struct EpsContext {
    Vector ideal;

    static EpsContext from(std::span<const Solution> set)
    {
        EpsContext ctx;
        if (set.empty())
            return ctx;
        ctx.ideal = set.front().f;
        for (const auto& s : set)
            for (std::size_t i = 0; i < ctx.ideal.size(); ++i)
                ctx.ideal[i] = std::min(ctx.ideal[i], s.f[i]);
        return ctx;
    }

    Vector shifted(std::span<const Real> f) const
    {
        Vector out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            out[i] = f[i] - ideal[i] + 1.0;
        return out;
    }
};

/// Epsilon dominance on already shifted objective vectors (all components >= 1):
/// (1 + eps) * p_i <= q_i for every i, strictly for at least one i.
inline bool eps_dominates_shifted(std::span<const Real> p, std::span<const Real> q, Real eps)
{
    require(eps >= 0.0, "eps_dominates: epsilon must be non-negative");
    require(p.size() == q.size(), "eps_dominates: objective vectors differ in length");
    bool strict = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Real inflated = (1.0 + eps) * p[i];
        if (inflated > q[i])
            return false;
        if (inflated < q[i])
            strict = true;
    }
    return strict;
}

inline bool eps_dominates(std::span<const Real> fp, std::span<const Real> fq, Real eps, const EpsContext& ctx)
{
    return eps_dominates_shifted(ctx.shifted(fp), ctx.shifted(fq), eps);
}

/// Mask over `joint`: true for members not epsilon-dominated by any member
/// listed in `front` (indices into `joint`). The shift is built from `joint`.
inline std::vector<bool> eps_band_mask(std::span<const Solution> joint, std::span<const std::size_t> front, Real eps)
{
    require(eps >= 0.0, "eps_band_filter: epsilon must be non-negative");
    std::vector<bool> keep(joint.size(), true);
    if (joint.empty())
        return keep;
    const auto ctx = EpsContext::from(joint);
    Matrix shifted;
    shifted.reserve(joint.size());
    for (const auto& s : joint)
        shifted.push_back(ctx.shifted(s.f));
    for (std::size_t q = 0; q < joint.size(); ++q)
        for (const std::size_t p : front)
            if (eps_dominates_shifted(shifted[p], shifted[q], eps)) {
                keep[q] = false;
                break;
            }
    return keep;
}

/// Members of `joint` lying in the epsilon strip above `global_front`.
inline Population eps_band_filter(std::span<const Solution> joint, std::span<const Solution> global_front, Real eps)
{
    require(eps >= 0.0, "eps_band_filter: epsilon must be non-negative");
    Population out;
    if (joint.empty())
        return out;
    const auto ctx = EpsContext::from(joint);
    Matrix front;
    for (const auto& s : global_front)
        front.push_back(ctx.shifted(s.f));
    for (const auto& q : joint) {
        const Vector fq = ctx.shifted(q.f);
        const bool covered = std::any_of(front.begin(), front.end(),
                                         [&](const Vector& fp) { return eps_dominates_shifted(fp, fq, eps); });
        if (!covered)
            out.push_back(q);
    }
    return out;
}

/// Pairwise dominance table: dom[i * n + j] is true iff i dominates j.
inline std::vector<char> dominance_table(std::span<const Solution> pop)
{
    const std::size_t n = pop.size();
    std::vector<char> dom(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (pareto_dominates(pop[i].f, pop[j].f))
                dom[i * n + j] = 1;
            else if (pareto_dominates(pop[j].f, pop[i].f))
                dom[j * n + i] = 1;
        }
    return dom;
}

/// Fast non-dominated sorting. Returns the 1-based front index of every member.
inline std::vector<std::size_t> nd_sort(std::span<const Solution> pop)
{
    const std::size_t n = pop.size();
    const auto dom = dominance_table(pop);
    std::vector<std::size_t> dominated_by_count(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dominated_by_count[j] += dom[i * n + j];

    std::vector<std::size_t> rank(n, 0);
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dominated_by_count[i] == 0)
            current.push_back(i);

    std::size_t level = 1;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const std::size_t i : current) {
            rank[i] = level;
            for (std::size_t j = 0; j < n; ++j)
                if (dom[i * n + j] && --dominated_by_count[j] == 0)
                    next.push_back(j);
        }
        std::sort(next.begin(), next.end());
        current = std::move(next);
        ++level;
    }
    return rank;
}

inline std::vector<std::size_t> first_front(std::span<const Solution> pop)
{
    const auto rank = nd_sort(pop);
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < rank.size(); ++i)
        if (rank[i] == 1)
            front.push_back(i);
    return front;
}

/// SPEA2 fitness: raw strength-based fitness plus k-th nearest neighbour
/// density, k = floor(sqrt(n)). Non-dominated members score below 1.
inline Vector spea2_fitness(std::span<const Solution> pop)
{
    const std::size_t n = pop.size();
    Vector fitness(n, 0.0);
    if (n == 0)
        return fitness;
    const auto dom = dominance_table(pop);

    std::vector<std::size_t> strength(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            strength[i] += dom[i * n + j];

    std::size_t k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<Real>(n))));
    k = std::min(k, n - 1);

    Vector dist;
    dist.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t raw = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (dom[j * n + i])
                raw += strength[j];

        Real sigma = 0.0;
        if (k > 0) {
            dist.clear();
            for (std::size_t j = 0; j < n; ++j)
                if (j != i)
                    dist.push_back(distance(pop[i].f, pop[j].f));
            std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
            sigma = dist[k - 1];
        }
        fitness[i] = static_cast<Real>(raw) + 1.0 / (sigma + 2.0);
    }
    return fitness;
}

} // namespace commea
