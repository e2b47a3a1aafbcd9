#include "oracles.hpp"

#include <commea/coevolution.hpp>
#include <commea/problems.hpp>

#include <gtest/gtest.h>

using namespace commea;

namespace {

Population evaluate_all(const Problem& p, const Matrix& xs)
{
    Population out;
    for (const auto& x : xs)
        out.push_back({x, p.evaluate(x)});
    return out;
}

// Converged DualDepth population: both branches, x1 on a grid, small x2 jitter.
Population dualdepth_population(const DualDepth& p, std::size_t per_branch, RandomStream& rng)
{
    Matrix xs;
    for (std::size_t i = 0; i < per_branch; ++i)
        for (const Real c : {DualDepth::global_x2, DualDepth::local_x2})
            xs.push_back({static_cast<Real>(i) / static_cast<Real>(per_branch - 1), c + rng.uniform(-0.002, 0.002)});
    return evaluate_all(p, xs);
}

std::size_t near_branch(const Problem& p, const Population& pop, std::size_t branch, Real threshold)
{
    std::size_t n = 0;
    for (const auto& s : pop)
        n += p.branch_distance(s.x, branch) <= threshold;
    return n;
}

} // namespace

TEST(Coevolution, ScheduleExamples)
{
    const EpsSchedule s{0.1, 100};
    EXPECT_EQ(s.at(100), 0.1);
    EXPECT_EQ(s.at(25), 2.0);
    EXPECT_THROW(s.at(0), ContractViolation);
    EXPECT_THROW(s.at(101), ContractViolation);

    const EpsSchedule one{1.0, 100};
    for (std::size_t i = 50; i <= 100; ++i)
        EXPECT_EQ(one.at(i), 1.0);
    EXPECT_GT(one.at(49), 1.0);
}

TEST(Coevolution, ScheduleIsNonIncreasingAndBounded)
{
    for (const Real eps : {0.0, 0.02, 0.3, 1.0, 2.5})
        for (const std::size_t g : {1u, 2u, 7u, 64u, 133u}) {
            const EpsSchedule s{eps, g};
            for (std::size_t i = 1; i <= g; ++i) {
                EXPECT_GE(s.at(i), eps);
                if (i > 1)
                    EXPECT_LE(s.at(i), s.at(i - 1));
            }
            if (eps <= 1.0)
                EXPECT_EQ(s.at(g), eps);
        }
}

TEST(Coevolution, GenerationsForBudget)
{
    EXPECT_EQ(generations_for_budget(100, 20000), 132u);
    EXPECT_EQ(generations_for_budget(100, 200), 0u);
    EXPECT_EQ(generations_for_budget(100, 349), 0u);
    EXPECT_EQ(generations_for_budget(100, 350), 1u);
}

TEST(Coevolution, CaIdentityOnNondominatedSet)
{
    const DualDepth p;
    Matrix xs;
    for (int i = 0; i < 10; ++i)
        xs.push_back({i / 9.0, 0.25});
    const auto ca = evaluate_all(p, xs);
    const auto out = env_select_ca(ca, {}, {}, 10, p.box());
    EXPECT_EQ(out.members, ca);
    EXPECT_FALSE(out.undersized);
    for (const Real f : out.fitness)
        EXPECT_LT(f, 1.0);
}

TEST(Coevolution, CaDiscardsDominated)
{
    const DualDepth p;
    Matrix good, bad;
    for (int i = 0; i < 10; ++i) {
        good.push_back({i / 9.0, 0.25});
        bad.push_back({i / 9.0, 0.5});
    }
    const auto out = env_select_ca(evaluate_all(p, bad), evaluate_all(p, good), {}, 10, p.box());
    for (const auto& s : out.members)
        EXPECT_EQ(s.x[1], 0.25);
}

TEST(Coevolution, CaFillsByFitnessWhenFrontIsSmall)
{
    const DualDepth p;
    const auto pop = evaluate_all(p, {{0.5, 0.25}, {0.5, 0.3}, {0.5, 0.35}, {0.5, 0.45}});
    const auto out = env_select_ca(pop, {}, {}, 2, p.box());
    ASSERT_EQ(out.members.size(), 2u);
    EXPECT_EQ(out.members[0].x[1], 0.25);
    EXPECT_EQ(out.members[1].x[1], 0.3);
}

TEST(Coevolution, CaUndersized)
{
    const DualDepth p;
    const auto pop = evaluate_all(p, {{0.1, 0.25}, {0.2, 0.25}});
    const auto out = env_select_ca(pop, {}, {}, 4, p.box());
    EXPECT_TRUE(out.undersized);
    EXPECT_EQ(out.members.size(), 2u);
}

TEST(Coevolution, CaTruncationKeepsIsolatedPoints)
{
    // Eight front points: three isolated, five in two clusters; keep four.
    const DualDepth p;
    const std::vector<Real> t{0.0, 0.30, 0.31, 0.32, 0.6, 0.61, 0.62, 1.0};
    Matrix xs;
    for (const Real v : t)
        xs.push_back({v, 0.25});
    const auto out = env_select_ca(evaluate_all(p, xs), {}, {}, 4, p.box());
    std::vector<Real> kept;
    for (const auto& s : out.members)
        kept.push_back(s.x[0]);
    EXPECT_NE(std::find(kept.begin(), kept.end(), 0.0), kept.end());
    EXPECT_NE(std::find(kept.begin(), kept.end(), 1.0), kept.end());
    // Exhaustive: every 4-subset with the largest minimum gap keeps both ends.
    Real best = 0.0;
    std::vector<unsigned> argbest;
    for (unsigned mask = 0; mask < 256; ++mask) {
        if (std::popcount(mask) != 4)
            continue;
        std::vector<Real> sub;
        for (int i = 0; i < 8; ++i)
            if (mask & (1u << i))
                sub.push_back(t[i]);
        Real gap = 1.0;
        for (std::size_t i = 1; i < sub.size(); ++i)
            gap = std::min(gap, sub[i] - sub[i - 1]);
        if (gap > best) {
            best = gap;
            argbest.clear();
        }
        if (gap == best)
            argbest.push_back(mask);
    }
    for (const unsigned mask : argbest)
        EXPECT_EQ(mask & 0b10000001u, 0b10000001u);
}

TEST(Coevolution, DaReducesToCrowdingOnMutuallyNondominatedBand)
{
    const DualDepth p;
    Matrix xs;
    for (int i = 0; i < 30; ++i)
        xs.push_back({i / 29.0, 0.25});
    const auto pop = evaluate_all(p, xs);
    const auto out = env_select_da(pop, {}, {}, 12, 0.1, p.box());
    EXPECT_EQ(out.members, truncate_by_crowding(pop, 12, Space::combined, p.box()));
    EXPECT_EQ(out.band_size, 30u);
    EXPECT_EQ(out.local_nondominated, 30u);
}

TEST(Coevolution, DaPipelineMatchesOracle)
{
    RandomStream rng(8);
    const DualDepth p(0.1);
    const Population joint = dualdepth_population(p, 100, rng);
    for (const Real eps : {0.3, 0.02}) {
        const auto out = env_select_da(joint, {}, {}, 100, eps, p.box());

        // Oracle: band -> niche graph over the band -> I_LC -> survivors.
        const auto keep = oracle::band(joint, eps);
        Population strip;
        for (std::size_t i = 0; i < joint.size(); ++i)
            if (keep[i])
                strip.push_back(joint[i]);
        Matrix normalized;
        for (const auto& s : strip)
            normalized.push_back(p.box().normalize(s.x));
        const auto ilc = oracle::ilc(strip, oracle::niches(normalized));
        std::size_t zero = 0;
        for (const Real v : ilc)
            zero += v == 0.0;
        EXPECT_EQ(out.band_size, strip.size());
        EXPECT_EQ(out.local_nondominated, zero);
        EXPECT_EQ(out.members.size(), 100u);

        const std::size_t local = near_branch(p, out.members, 1, 0.05);
        if (eps == 0.3)
            EXPECT_GE(local, 10u);
        else
            EXPECT_EQ(local, 0u);
    }
}

TEST(Coevolution, DaUndersizedBandIsFilledFromJoint)
{
    const DualDepth p;
    // One front point and a dominated tail far outside any small band.
    const auto pop = evaluate_all(p, {{0.5, 0.25}, {0.5, 0.5}, {0.5, 0.6}, {0.5, 0.4}});
    const auto out = env_select_da(pop, {}, {}, 3, 0.0, p.box());
    EXPECT_TRUE(out.undersized);
    EXPECT_EQ(out.members.size(), 3u);
    EXPECT_EQ(out.members[0].x[1], 0.25);
}

TEST(Coevolution, RunCountsEvaluations)
{
    const SineMirror p;
    RunConfig c;
    c.problem = p.id();
    c.population = 20;
    c.max_fe = 1000;
    const auto r = run(c, p);
    const std::size_t g = generations_for_budget(20, 1000);
    EXPECT_EQ(r.generations, g);
    EXPECT_EQ(r.fe_used, 40 + g * 30);
    EXPECT_LE(r.fe_used, c.max_fe);
    EXPECT_EQ(r.ca.size(), 20u);
    ASSERT_TRUE(r.da.has_value());
    EXPECT_EQ(r.da->size(), 20u);
    EXPECT_EQ(r.da->fitness.size(), 20u);
    EXPECT_TRUE(r.flags.empty());
}

TEST(Coevolution, RunWithoutGenerationsIsFlagged)
{
    const SineMirror p;
    RunConfig c;
    c.population = 20;
    c.max_fe = 60;
    const auto r = run(c, p);
    EXPECT_EQ(r.generations, 0u);
    EXPECT_EQ(r.fe_used, 40u);
    EXPECT_TRUE(r.flags.count("no_generations"));
}

TEST(Coevolution, CaOnlyModeHasNoDiversityArchive)
{
    const SineMirror p;
    RunConfig c;
    c.population = 20;
    c.max_fe = 1000;
    c.mode = Mode::ca_only;
    const auto r = run(c, p);
    EXPECT_FALSE(r.da.has_value());
    EXPECT_EQ(r.ca.size(), 20u);
    EXPECT_EQ(&r.answer(), &r.ca.members);
    EXPECT_LE(r.fe_used, 1000u);
}

TEST(Coevolution, RunIsDeterministic)
{
    const DualDepth p;
    RunConfig c;
    c.population = 20;
    c.max_fe = 2000;
    c.seed = 5;
    const auto a = run(c, p), b = run(c, p);
    EXPECT_EQ(a.ca.members, b.ca.members);
    EXPECT_EQ(a.da->members, b.da->members);
    c.seed = 6;
    EXPECT_NE(run(c, p).da->members, a.da->members);
}

TEST(Coevolution, TraceInvariants)
{
    const DualDepth p;
    RunConfig c;
    c.population = 40;
    c.max_fe = 4000;
    c.epsilon = 0.05;
    const auto ref = p.sample_reference(100, ReferenceKind::global_and_local);
    RunOptions o;
    o.trace = true;
    o.trace_archives = true;
    o.reference = &ref;
    const auto r = run(c, p, o);
    ASSERT_EQ(r.trace.size(), r.generations);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const auto& t = r.trace[i];
        EXPECT_EQ(t.generation, i + 1);
        if (i > 0)
            EXPECT_LE(t.eps, r.trace[i - 1].eps);
        ASSERT_TRUE(t.igd && t.igdx);
        EXPECT_TRUE(std::isfinite(*t.igdx) && *t.igdx >= 0.0);
        EXPECT_EQ(t.archives->ca_x.size(), 40u);
        EXPECT_EQ(t.archives->da_x.size(), 40u);
    }
    EXPECT_EQ(r.trace.back().eps, 0.05);

    // No earlier CA front point dominates a final CA front point.
    const auto final_front = first_front(r.ca.members);
    std::size_t dominated = 0;
    for (const auto& t : r.trace) {
        Population earlier;
        for (std::size_t k = 0; k < t.archives->ca_f.size(); ++k)
            earlier.push_back({t.archives->ca_x[k], t.archives->ca_f[k]});
        for (const auto k : first_front(earlier))
            for (const auto i : final_front)
                dominated += pareto_dominates(earlier[k].f, r.ca.members[i].f);
    }
    EXPECT_EQ(dominated, 0u);
}

TEST(Coevolution, DaMembersLieInsideTheBand)
{
    const SineMirror p;
    RandomStream rng(9);
    for (int t = 0; t < 20; ++t) {
        Matrix xs;
        for (int i = 0; i < 120; ++i)
            xs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const auto joint = evaluate_all(p, xs);
        const Real eps = rng.uniform(0.0, 2.0);
        const auto out = env_select_da(std::span(joint).first(40), std::span(joint).subspan(40, 40),
                                       std::span(joint).subspan(80), 20, eps, p.box());
        if (out.undersized)
            continue;
        Population front;
        for (const auto i : first_front(joint))
            front.push_back(joint[i]);
        const auto band = eps_band_filter(joint, front, eps);
        for (const auto& s : out.members)
            EXPECT_NE(std::find(band.begin(), band.end(), s), band.end());
    }
}

TEST(Coevolution, SineMirrorSeedSevenFindsBothBranches)
{
    const SineMirror p;
    RunConfig c;
    c.population = 100;
    c.max_fe = 20000;
    c.seed = 7;
    const auto r = run(c, p);
    EXPECT_GT(near_branch(p, r.da->members, 0, 0.05), 0u);
    EXPECT_GT(near_branch(p, r.da->members, 1, 0.05), 0u);
}
