#include "oracles.hpp"

#include <commea/dominance.hpp>
#include <commea/problems.hpp>

#include <gtest/gtest.h>

using namespace commea;

namespace {

Population from_objectives(const Matrix& fs)
{
    Population pop;
    for (const auto& f : fs)
        pop.push_back({{0.0}, f});
    return pop;
}

} // namespace

TEST(Dominance, ParetoExamples)
{
    EXPECT_TRUE(pareto_dominates(Vector{0, 0}, Vector{1, 1}));
    EXPECT_FALSE(pareto_dominates(Vector{0, 1}, Vector{1, 0}));
    EXPECT_FALSE(pareto_dominates(Vector{1, 1}, Vector{1, 1}));
    EXPECT_TRUE(pareto_dominates(Vector{1, 0}, Vector{1, 1}));
    EXPECT_THROW(pareto_dominates(Vector{1, 0}, Vector{1, 1, 1}), ContractViolation);
}

TEST(Dominance, ParetoIsAStrictPartialOrder)
{
    RandomStream rng(11);
    for (int t = 0; t < 20000; ++t) {
        Matrix v(3, Vector(2));
        for (auto& f : v)
            for (auto& x : f)
                x = std::floor(rng.uniform() * 3.0);
        EXPECT_FALSE(pareto_dominates(v[0], v[0]));
        if (pareto_dominates(v[0], v[1]))
            EXPECT_FALSE(pareto_dominates(v[1], v[0]));
        if (pareto_dominates(v[0], v[1]) && pareto_dominates(v[1], v[2]))
            EXPECT_TRUE(pareto_dominates(v[0], v[2]));
    }
}

TEST(Dominance, EpsExamples)
{
    EXPECT_TRUE(eps_dominates_shifted(Vector{1, 1}, Vector{1.2, 1.2}, 0.1));
    EXPECT_FALSE(eps_dominates_shifted(Vector{1, 1}, Vector{1.2, 1.2}, 0.3));
    EXPECT_THROW(eps_dominates_shifted(Vector{1, 1}, Vector{1.2, 1.2}, -0.1), ContractViolation);
}

TEST(Dominance, EpsNeverSelfDominates)
{
    for (const Real eps : {0.0, 0.1, 1.0, 5.0})
        EXPECT_FALSE(eps_dominates_shifted(Vector{1.5, 2.0}, Vector{1.5, 2.0}, eps));
}

TEST(Dominance, EpsZeroIsComponentwiseOrderWithStrictness)
{
    RandomStream rng(5);
    for (int t = 0; t < 10000; ++t) {
        Vector p{1 + std::floor(rng.uniform() * 4), 1 + std::floor(rng.uniform() * 4)};
        Vector q{1 + std::floor(rng.uniform() * 4), 1 + std::floor(rng.uniform() * 4)};
        EXPECT_EQ(eps_dominates_shifted(p, q, 0.0), pareto_dominates(p, q));
    }
}

TEST(Dominance, EpsMonotoneInEpsilon)
{
    RandomStream rng(6);
    for (int t = 0; t < 10000; ++t) {
        Vector p{rng.uniform(1, 3), rng.uniform(1, 3), rng.uniform(1, 3)};
        Vector q{rng.uniform(1, 3), rng.uniform(1, 3), rng.uniform(1, 3)};
        const Real eps = rng.uniform(0, 1);
        if (eps_dominates_shifted(p, q, eps))
            EXPECT_TRUE(eps_dominates_shifted(p, q, eps * rng.uniform()));
    }
}

TEST(Dominance, EpsContextShiftsIdealToOne)
{
    const auto pop = from_objectives({{-3, 5}, {0, -2}, {4, 4}});
    const auto ctx = EpsContext::from(pop);
    for (const auto& s : pop)
        for (const Real v : ctx.shifted(s.f))
            EXPECT_GE(v, 1.0);
    EXPECT_EQ(ctx.shifted(Vector{-3, -2}), (Vector{1, 1}));
}

TEST(Dominance, NdSortExamples)
{
    EXPECT_EQ(nd_sort(from_objectives({{0, 3}, {1, 2}, {2, 1}, {3, 0}})), (std::vector<std::size_t>{1, 1, 1, 1}));
    EXPECT_EQ(nd_sort(from_objectives({{2, 2}, {0, 0}, {1, 1}})), (std::vector<std::size_t>{3, 1, 2}));
}

TEST(Dominance, NdSortMatchesLayeringOracle)
{
    RandomStream rng(21);
    for (int t = 0; t < 300; ++t) {
        const auto pop = oracle::random_population(rng, 1 + rng.index(50), 1, 2 + rng.index(2), t % 2 == 0);
        EXPECT_EQ(nd_sort(pop), oracle::layers(pop));
    }
}

TEST(Dominance, Spea2Examples)
{
    const auto pair = spea2_fitness(from_objectives({{0, 1}, {1, 0}}));
    EXPECT_LT(pair[0], 1.0);
    EXPECT_LT(pair[1], 1.0);

    const auto chain = spea2_fitness(from_objectives({{0, 0}, {1, 1}, {2, 2}}));
    EXPECT_EQ(std::floor(chain[0]), 0.0);
    EXPECT_EQ(std::floor(chain[1]), 2.0);
    EXPECT_EQ(std::floor(chain[2]), 3.0);
    // k = 1: nearest neighbour at sqrt(2) for every member.
    EXPECT_DOUBLE_EQ(chain[1], 2.0 + 1.0 / (std::sqrt(2.0) + 2.0));
}

TEST(Dominance, Spea2MatchesOracleAndFront)
{
    RandomStream rng(22);
    for (int t = 0; t < 300; ++t) {
        const auto pop = oracle::random_population(rng, 1 + rng.index(50), 1, 2 + rng.index(2), t % 3 == 0);
        const auto fit = spea2_fitness(pop);
        EXPECT_EQ(fit, oracle::spea2(pop));
        const auto rank = nd_sort(pop);
        for (std::size_t i = 0; i < pop.size(); ++i)
            EXPECT_EQ(fit[i] < 1.0, rank[i] == 1);
    }
}

TEST(Dominance, BandMatchesOracle)
{
    RandomStream rng(23);
    for (int t = 0; t < 300; ++t) {
        const auto pop = oracle::random_population(rng, 1 + rng.index(50), 1, 2 + rng.index(2), t % 2 == 0);
        const Real eps = rng.uniform(0.0, 0.5);
        EXPECT_EQ(eps_band_mask(pop, first_front(pop), eps), oracle::band(pop, eps));
    }
}

TEST(Dominance, BandKeepsFrontAndShrinksWithEpsilon)
{
    RandomStream rng(24);
    for (int t = 0; t < 200; ++t) {
        const auto pop = oracle::random_population(rng, 2 + rng.index(40), 1, 2, false);
        const auto front = first_front(pop);
        const Real hi = rng.uniform(0.0, 1.0), lo = hi * rng.uniform();
        const auto wide = eps_band_mask(pop, front, hi);
        const auto narrow = eps_band_mask(pop, front, lo);
        for (const auto i : front)
            EXPECT_TRUE(narrow[i]);
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (narrow[i])
                EXPECT_TRUE(wide[i]);
    }
}

TEST(Dominance, BandFilterEmptyJoint)
{
    EXPECT_TRUE(eps_band_filter({}, {}, 0.1).empty());
}

TEST(Dominance, BandOnDualDepthGrid)
{
    // 50 points on each branch: x1 on a grid, x2 at the branch centre.
    const DualDepth p(0.1);
    Population pop;
    for (std::size_t i = 0; i < 50; ++i) {
        const Real t = static_cast<Real>(i) / 49.0;
        for (const Real x2 : {DualDepth::global_x2, DualDepth::local_x2}) {
            const Vector x{t, x2};
            pop.push_back({x, p.evaluate(x)});
        }
    }
    auto local_kept = [&](Real eps) {
        const auto keep = eps_band_mask(pop, first_front(pop), eps);
        const auto ref = oracle::band(pop, eps);
        EXPECT_EQ(keep, ref);
        std::size_t n = 0;
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (keep[i] && pop[i].x[1] == DualDepth::local_x2)
                ++n;
        return n;
    };
    EXPECT_GT(local_kept(0.3), 0u);
    EXPECT_EQ(local_kept(0.02), 0u);
}
