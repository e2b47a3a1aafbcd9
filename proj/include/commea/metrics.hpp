#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace commea {

namespace detail {

    // Mean over reference rows of the distance to the nearest row of `found`.
    inline Real inverted_distance(std::span<const Vector> found, std::span<const Vector> reference)
    {
        require(!reference.empty(), "inverted distance: empty reference set");
        if (found.empty())
            return std::numeric_limits<Real>::infinity();
        Real total = 0.0;
        for (const auto& y : reference) {
            Real nearest = std::numeric_limits<Real>::infinity();
            for (const auto& x : found)
                nearest = std::min(nearest, squared_distance(x, y));
            total += std::sqrt(nearest);
        }
        return total / static_cast<Real>(reference.size());
    }

} // namespace detail

/// Inverted generational distance in objective space. +inf for an empty set.
inline Real igd(std::span<const Vector> objectives, const ReferenceSet& ref)
{
    return detail::inverted_distance(objectives, ref.f);
}

/// Inverted generational distance in decision space. +inf for an empty set.
inline Real igdx(std::span<const Vector> decisions, const ReferenceSet& ref)
{
    return detail::inverted_distance(decisions, ref.x);
}

/// IGDX with both sets mapped onto the unit box first.
inline Real igdx_normalized(std::span<const Vector> decisions, const ReferenceSet& ref, const Box& box)
{
    Matrix found, reference;
    found.reserve(decisions.size());
    for (const auto& x : decisions)
        found.push_back(box.normalize(x));
    reference.reserve(ref.size());
    for (const auto& x : ref.x)
        reference.push_back(box.normalize(x));
    return detail::inverted_distance(found, reference);
}

inline Matrix decisions_of(std::span<const Solution> pop)
{
    Matrix out;
    out.reserve(pop.size());
    for (const auto& s : pop)
        out.push_back(s.x);
    return out;
}

inline Matrix objectives_of(std::span<const Solution> pop)
{
    Matrix out;
    out.reserve(pop.size());
    for (const auto& s : pop)
        out.push_back(s.f);
    return out;
}

/// 1-based ranks of `scores` (1 = best); tied entries share the mean of their positions.
inline Vector average_ranks(std::span<const Real> scores, bool smaller_is_better)
{
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return smaller_is_better ? scores[a] < scores[b] : scores[a] > scores[b];
    });
    Vector rank(n, 0.0);
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && scores[order[end]] == scores[order[start]])
            ++end;
        const Real shared = 0.5 * static_cast<Real>(start + 1 + end);
        for (std::size_t i = start; i < end; ++i)
            rank[order[i]] = shared;
        start = end;
    }
    return rank;
}

/// Per-problem ranks of each algorithm and their mean over problems.
struct RankTable {
    // ranks[a][p]: rank of algorithm a on problem p.
    Matrix ranks;
    Vector mean;
};

/// Ranks algorithms (rows) within every problem (column) and averages over problems.
inline RankTable mean_ranks(const Matrix& scores, bool smaller_is_better)
{
    RankTable table;
    const std::size_t algorithms = scores.size();
    if (algorithms == 0)
        return table;
    const std::size_t problems = scores.front().size();
    for (const auto& row : scores)
        require(row.size() == problems, "mean_ranks: ragged score matrix");

    table.ranks.assign(algorithms, Vector(problems, 0.0));
    table.mean.assign(algorithms, 0.0);
    Vector column(algorithms);
    for (std::size_t p = 0; p < problems; ++p) {
        for (std::size_t a = 0; a < algorithms; ++a)
            column[a] = scores[a][p];
        const Vector r = average_ranks(column, smaller_is_better);
        for (std::size_t a = 0; a < algorithms; ++a)
            table.ranks[a][p] = r[a];
    }
    for (std::size_t a = 0; a < algorithms; ++a)
        table.mean[a] = problems == 0 ? 0.0
                                      : std::accumulate(table.ranks[a].begin(), table.ranks[a].end(), 0.0) /
                                            static_cast<Real>(problems);
    return table;
}

} // namespace commea
