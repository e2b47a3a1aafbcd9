#pragma once

// Domain types shared by every part of the library: solutions, archives,
// problems, run configuration and the deterministic random stream.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace commea {

using Real = double;
using Vector = std::vector<Real>;
using Matrix = std::vector<Vector>;

/// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const char* message)
{
    if (!condition)
        throw ContractViolation(message);
}

/// A decision vector together with its cached objective vector.
struct Solution {
    Vector x;
    Vector f;

    friend bool operator==(const Solution&, const Solution&) = default;
};

using Population = std::vector<Solution>;

/// Box constraints of a decision space.
struct Box {
    Vector lower;
    Vector upper;

    std::size_t dimension() const { return lower.size(); }

    bool contains(std::span<const Real> x) const
    {
        if (x.size() != lower.size())
            return false;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (!(x[k] >= lower[k] && x[k] <= upper[k]))
                return false;
        return true;
    }

    /// Maps each coordinate affinely onto [0, 1].
    Vector normalize(std::span<const Real> x) const
    {
        Vector out(x.size());
        for (std::size_t k = 0; k < x.size(); ++k)
            out[k] = (x[k] - lower[k]) / (upper[k] - lower[k]);
        return out;
    }
};

/// Projects x onto the box. In-bounds input is returned unchanged.
inline Vector clamp_to_bounds(const Box& box, Vector x)
{
    require(x.size() == box.dimension(), "clamp_to_bounds: wrong decision vector length");
    for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = std::clamp(x[k], box.lower[k], box.upper[k]);
    return x;
}

/// Bounded, ordered set of solutions with per-member fitness.
struct Archive {
    Population members;
    std::size_t capacity = 0;
    Vector fitness;

    std::size_t size() const { return members.size(); }
};

/// Uniformly spaced samples of the true Pareto set and their images.
struct ReferenceSet {
    Matrix x;
    Matrix f;
    std::vector<bool> local;
    bool includes_local = false;
    // Set when local branches were requested from a family that has none.
    bool global_only_fallback = false;

    std::size_t size() const { return x.size(); }
};

enum class ReferenceKind { global, global_and_local };

/// Box-bounded multi-objective minimization problem with an analytic Pareto set.
///
/// Pareto sets are described as a finite list of branches (connected
/// components); each branch is flagged global or local.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string id() const = 0;
    const Box& box() const { return box_; }
    std::size_t dimension() const { return box_.dimension(); }
    std::size_t objectives() const { return objectives_; }

    /// Objective vector of x. Pure; rejects wrong-length or out-of-bounds input.
    Vector evaluate(std::span<const Real> x) const
    {
        require(x.size() == dimension(), "evaluate: wrong decision vector length");
        require(box_.contains(x), "evaluate: decision vector out of bounds");
        return compute(x);
    }

    virtual std::size_t branch_count() const = 0;
    virtual bool branch_is_local(std::size_t branch) const = 0;
    bool has_local_branches() const
    {
        for (std::size_t b = 0; b < branch_count(); ++b)
            if (branch_is_local(b))
                return true;
        return false;
    }

    /// Euclidean distance from x to a Pareto-set branch, in box-normalized units.
    virtual Real branch_distance(std::span<const Real> x, std::size_t branch) const = 0;

    virtual ReferenceSet sample_reference(std::size_t count, ReferenceKind kind) const = 0;

protected:
    Problem(Box box, std::size_t objectives) : box_(std::move(box)), objectives_(objectives)
    {
        for (std::size_t k = 0; k < box_.dimension(); ++k)
            require(box_.lower[k] < box_.upper[k], "Problem: lower bound must be below upper bound");
    }

    virtual Vector compute(std::span<const Real> x) const = 0;

private:
    Box box_;
    std::size_t objectives_;
};

/// Raised by Evaluator when the function-evaluation budget is spent.
class BudgetExhausted : public std::runtime_error {
public:
    BudgetExhausted() : std::runtime_error("function-evaluation budget exhausted") {}
};

/// Counts function evaluations against a fixed budget.
class Evaluator {
public:
    Evaluator(const Problem& problem, std::size_t budget) : problem_(&problem), budget_(budget) {}

    Solution evaluate(Vector x)
    {
        if (used_ >= budget_)
            throw BudgetExhausted();
        Vector f = problem_->evaluate(x);
        ++used_;
        return Solution{std::move(x), std::move(f)};
    }

    const Problem& problem() const { return *problem_; }
    std::size_t used() const { return used_; }
    std::size_t budget() const { return budget_; }
    std::size_t remaining() const { return budget_ - used_; }

private:
    const Problem* problem_;
    std::size_t budget_;
    std::size_t used_ = 0;
};

/// Deterministic random stream.
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the standard.
/// Real and integer draws are derived from raw 64-bit outputs here rather than
/// through <random> distributions, whose algorithms are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    Real uniform() { return static_cast<Real>(engine_() >> 11) * 0x1.0p-53; }

    Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform on {0, ..., n-1}; rejection sampling, no modulo bias.
    std::size_t index(std::size_t n)
    {
        require(n > 0, "RandomStream::index: empty range");
        const std::uint64_t range = n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return static_cast<std::size_t>(draw % range);
    }

    bool bernoulli(Real p) { return uniform() < p; }

    friend bool operator==(const RandomStream&, const RandomStream&) = default;

private:
    std::mt19937_64 engine_;
};

enum class Mode { full, ca_only };

inline const char* to_string(Mode mode) { return mode == Mode::full ? "full" : "ca-only"; }

inline Mode parse_mode(const std::string& text)
{
    if (text == "full")
        return Mode::full;
    if (text == "ca-only" || text == "ca_only")
        return Mode::ca_only;
    throw ContractViolation("unknown mode '" + text + "' (expected full or ca-only)");
}

/// Everything needed to reproduce one run.
struct RunConfig {
    std::string problem;
    std::size_t population = 100;
    std::size_t max_fe = 10000;
    Real epsilon = 0.1;
    std::uint64_t seed = 1;
    Mode mode = Mode::full;
    Real sbx_eta = 20.0;
    Real pm_eta = 20.0;
    Real sbx_rate = 1.0;
    // Per-variable mutation probability; a negative value means 1/D.
    Real pm_rate = -1.0;

    void validate() const
    {
        require(population >= 4 && population % 2 == 0, "RunConfig: population must be even and at least 4");
        require(max_fe >= 2 * population, "RunConfig: evaluation budget must cover initialization (2N)");
        require(epsilon >= 0.0, "RunConfig: epsilon must be non-negative");
        require(sbx_eta > 0.0 && pm_eta > 0.0, "RunConfig: distribution indices must be positive");
        require(sbx_rate >= 0.0 && sbx_rate <= 1.0, "RunConfig: crossover rate must lie in [0, 1]");
        require(pm_rate <= 1.0, "RunConfig: mutation rate must not exceed 1");
    }

    Real mutation_rate(std::size_t dimension) const
    {
        return pm_rate < 0.0 ? 1.0 / static_cast<Real>(dimension) : pm_rate;
    }
};

inline Real squared_distance(std::span<const Real> a, std::span<const Real> b)
{
    Real sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Real d = a[k] - b[k];
        sum += d * d;
    }
    return sum;
}

inline Real distance(std::span<const Real> a, std::span<const Real> b)
{
    return std::sqrt(squared_distance(a, b));
}

} // namespace commea
