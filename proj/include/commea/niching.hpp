#pragma once

// Decision-space neighbourhoods, local convergence measures and the
// crowding-based truncation shared by both archives.

#include "core.hpp"
#include "dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace commea {

/// Dense symmetric matrix of pairwise Euclidean distances.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    explicit DistanceMatrix(std::span<const Vector> points) : n_(points.size()), d_(n_ * n_, 0.0)
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                d_[i * n_ + j] = d_[j * n_ + i] = distance(points[i], points[j]);
    }

    std::size_t size() const { return n_; }
    Real operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<Real> d_;
};

inline Matrix normalized_decisions(std::span<const Solution> pop, const Box& box)
{
    Matrix out;
    out.reserve(pop.size());
    for (const auto& s : pop)
        out.push_back(box.normalize(s.x));
    return out;
}

/// Objectives rescaled to [0, 1] by the population's own per-objective range.
/// Objectives with zero range map to 0.
inline Matrix normalized_objectives(std::span<const Solution> pop)
{
    Matrix out;
    if (pop.empty())
        return out;
    const std::size_t m = pop.front().f.size();
    Vector lo(m, std::numeric_limits<Real>::infinity());
    Vector hi(m, -std::numeric_limits<Real>::infinity());
    for (const auto& s : pop)
        for (std::size_t i = 0; i < m; ++i) {
            lo[i] = std::min(lo[i], s.f[i]);
            hi[i] = std::max(hi[i], s.f[i]);
        }
    out.reserve(pop.size());
    for (const auto& s : pop) {
        Vector v(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (hi[i] > lo[i])
                v[i] = (s.f[i] - lo[i]) / (hi[i] - lo[i]);
        out.push_back(std::move(v));
    }
    return out;
}

/// Half the mean distance over all ordered pairs, including i == j:
/// R = sum_{i,j} d(i, j) / (2 n^2).
inline Real niche_radius(const DistanceMatrix& d)
{
    const std::size_t n = d.size();
    if (n == 0)
        return 0.0;
    Real sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sum += d(i, j);
    return sum / (2.0 * static_cast<Real>(n) * static_cast<Real>(n));
}

inline Real niche_radius(std::span<const Vector> normalized_points)
{
    return niche_radius(DistanceMatrix(normalized_points));
}

/// Neighbour sets N_i = { j != i : d(i, j) < radius }.
struct NeighborGraph {
    Real radius = 0.0;
    std::vector<std::vector<std::size_t>> adjacency;

    static NeighborGraph build(const DistanceMatrix& d, Real radius)
    {
        NeighborGraph g;
        g.radius = radius;
        g.adjacency.resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < d.size(); ++j)
                if (j != i && d(i, j) < radius)
                    g.adjacency[i].push_back(j);
        return g;
    }

    /// Graph over box-normalized decision vectors with the niche radius of the same set.
    static NeighborGraph over(std::span<const Solution> pop, const Box& box)
    {
        const DistanceMatrix d(normalized_decisions(pop, box));
        return build(d, niche_radius(d));
    }

    std::size_t size() const { return adjacency.size(); }
};

/// Local convergence indicator.
///
/// S_i counts the neighbours that i dominates; I_LC(i) sums S_j over the
/// neighbours j that dominate i. Zero exactly for locally non-dominated members.
inline Vector local_convergence_indicator(std::span<const Solution> pop, const NeighborGraph& graph)
{
    const std::size_t n = pop.size();
    require(graph.size() == n, "local_convergence_indicator: graph built over a different population");
    std::vector<std::size_t> strength(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (const std::size_t j : graph.adjacency[i])
            if (pareto_dominates(pop[i].f, pop[j].f))
                ++strength[i];

    Vector indicator(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (const std::size_t j : graph.adjacency[i])
            if (pareto_dominates(pop[j].f, pop[i].f))
                indicator[i] += static_cast<Real>(strength[j]);
    return indicator;
}

/// Fraction of neighbours that dominate each member; 0 for isolated members.
inline Vector local_convergence_quality(std::span<const Solution> pop, const NeighborGraph& graph)
{
    const std::size_t n = pop.size();
    require(graph.size() == n, "local_convergence_quality: graph built over a different population");
    Vector quality(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nbrs = graph.adjacency[i];
        if (nbrs.empty())
            continue;
        std::size_t dominated_by = 0;
        for (const std::size_t j : nbrs)
            if (pareto_dominates(pop[j].f, pop[i].f))
                ++dominated_by;
        quality[i] = static_cast<Real>(dominated_by) / static_cast<Real>(nbrs.size());
    }
    return quality;
}

enum class Space { decision, objective, combined };

namespace detail {

    // Per-space crowdedness state: finite part of sum 1/d and the number of
    // zero-distance partners (which make the member infinitely crowded).
    struct CrowdTerms {
        std::size_t n = 0;
        std::vector<Real> inverse;
        std::vector<char> coincident;
        Vector sum;
        std::vector<std::size_t> duplicates;

        explicit CrowdTerms(std::span<const Vector> points)
            : n(points.size()), inverse(n * n, 0.0), coincident(n * n, 0), sum(n, 0.0), duplicates(n, 0)
        {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const Real d = distance(points[i], points[j]);
                    if (d > 0.0)
                        inverse[i * n + j] = inverse[j * n + i] = 1.0 / d;
                    else
                        coincident[i * n + j] = coincident[j * n + i] = 1;
                }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) {
                        if (coincident[i * n + j])
                            ++duplicates[i];
                        else
                            sum[i] += inverse[i * n + j];
                    }
        }

        // Drops member r and recomputes the survivors' sums in index order, so
        // equal configurations give bit-equal scores.
        void remove(std::size_t r, const std::vector<char>& alive)
        {
            for (std::size_t i = 0; i < n; ++i) {
                if (!alive[i] || i == r)
                    continue;
                sum[i] = 0.0;
                duplicates[i] = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i || j == r || !alive[j])
                        continue;
                    if (coincident[i * n + j])
                        ++duplicates[i];
                    else
                        sum[i] += inverse[i * n + j];
                }
            }
        }

        Real value(std::size_t i) const
        {
            return duplicates[i] > 0 ? std::numeric_limits<Real>::infinity() : sum[i];
        }
    };

    inline Real finite_mean(const CrowdTerms& t, const std::vector<char>& alive)
    {
        Real total = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < t.n; ++i)
            if (alive[i] && t.duplicates[i] == 0) {
                total += t.sum[i];
                ++count;
            }
        return count > 0 && total > 0.0 ? total / static_cast<Real>(count) : 1.0;
    }

    inline Vector scores(const CrowdTerms* dec, const CrowdTerms* obj, const std::vector<char>& alive)
    {
        const std::size_t n = alive.size();
        Vector out(n, 0.0);
        if (dec && obj) {
            const Real mean_d = finite_mean(*dec, alive);
            const Real mean_o = finite_mean(*obj, alive);
            for (std::size_t i = 0; i < n; ++i)
                if (alive[i])
                    out[i] = 0.5 * (dec->value(i) / mean_d + obj->value(i) / mean_o);
            return out;
        }
        const CrowdTerms* t = dec ? dec : obj;
        for (std::size_t i = 0; i < n; ++i)
            if (alive[i])
                out[i] = t->value(i);
        return out;
    }

} // namespace detail

/// Crowdedness kappa_i = sum_{j != i} 1 / ||v_j - v_i|| over normalized vectors.
///
/// Decision vectors are normalized by the box, objectives by the population's
/// range. In the combined space each per-space kappa is divided by its
/// population mean and the two are averaged. Coincident vectors give +inf.
inline Vector crowdedness(std::span<const Solution> pop, Space space, const Box& box)
{
    const std::vector<char> alive(pop.size(), 1);
    if (space == Space::decision) {
        const detail::CrowdTerms dec(normalized_decisions(pop, box));
        return detail::scores(&dec, nullptr, alive);
    }
    if (space == Space::objective) {
        const detail::CrowdTerms obj(normalized_objectives(pop));
        return detail::scores(nullptr, &obj, alive);
    }
    const detail::CrowdTerms dec(normalized_decisions(pop, box));
    const detail::CrowdTerms obj(normalized_objectives(pop));
    return detail::scores(&dec, &obj, alive);
}

/// CrowdDis_i = (n - 1) / kappa_i; larger means more isolated, 0 for duplicates.
inline Vector crowd_distance(std::span<const Solution> pop, Space space, const Box& box)
{
    Vector kappa = crowdedness(pop, space, box);
    const Real scale = static_cast<Real>(pop.size()) - 1.0;
    for (auto& k : kappa)
        k = std::isinf(k) ? 0.0 : (k > 0.0 ? scale / k : std::numeric_limits<Real>::infinity());
    return kappa;
}

/// Removes the most crowded member (largest kappa, first index on ties) one at
/// a time until `target` remain. Returns the surviving indices in input order.
///
/// Objective normalization is fixed by the input set; kappa is recomputed
/// after every removal.
inline std::vector<std::size_t> truncate_indices(std::span<const Solution> pop, std::size_t target, Space space,
                                                 const Box& box)
{
    const std::size_t n = pop.size();
    require(target <= n, "truncate_by_crowding: target exceeds population size");
    std::vector<char> alive(n, 1);
    if (target < n) {
        std::optional<detail::CrowdTerms> dec, obj;
        if (space != Space::objective)
            dec.emplace(normalized_decisions(pop, box));
        if (space != Space::decision)
            obj.emplace(normalized_objectives(pop));

        for (std::size_t remaining = n; remaining > target; --remaining) {
            const Vector score = detail::scores(dec ? &*dec : nullptr, obj ? &*obj : nullptr, alive);
            std::size_t worst = n;
            for (std::size_t i = 0; i < n; ++i)
                if (alive[i] && (worst == n || score[i] > score[worst]))
                    worst = i;
            if (dec)
                dec->remove(worst, alive);
            if (obj)
                obj->remove(worst, alive);
            alive[worst] = 0;
        }
    }
    std::vector<std::size_t> kept;
    kept.reserve(target);
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i])
            kept.push_back(i);
    return kept;
}

inline Population truncate_by_crowding(std::span<const Solution> pop, std::size_t target, Space space, const Box& box)
{
    Population out;
    for (const std::size_t i : truncate_indices(pop, target, space, box))
        out.push_back(pop[i]);
    return out;
}

} // namespace commea
