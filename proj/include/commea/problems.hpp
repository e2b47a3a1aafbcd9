#pragma once

// Analytic multimodal benchmark problems with closed-form Pareto sets.
//
//   sinemirror          D = 2, two mirrored global Pareto-set branches
//   sinemirrord-d<D>    the same with D - 1 tail variables
//   polygon-k<k>-m<m>-d<D>
//                       k congruent regular m-gons, one equivalent Pareto set each
//   dualdepth-d<delta>  one global and one local Pareto set, fronts offset by delta

#include "core.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace commea {

namespace detail {

    inline std::vector<std::size_t> split_evenly(std::size_t count, std::size_t parts)
    {
        std::vector<std::size_t> out(parts, count / parts);
        for (std::size_t b = 0; b < count % parts; ++b)
            ++out[b];
        return out;
    }

    inline Real grid_point(std::size_t i, std::size_t n)
    {
        return n == 1 ? 0.5 : static_cast<Real>(i) / static_cast<Real>(n - 1);
    }

    // Minimizes a smooth function of t over [0, 1]: dense scan, then golden-section refinement.
    template <typename F>
    Real minimize_on_unit_interval(F&& fn)
    {
        constexpr std::size_t scan = 2000;
        std::size_t best = 0;
        Real best_value = fn(0.0);
        for (std::size_t i = 1; i <= scan; ++i) {
            const Real v = fn(static_cast<Real>(i) / scan);
            if (v < best_value) {
                best_value = v;
                best = i;
            }
        }
        Real a = std::max(0.0, (static_cast<Real>(best) - 1.0) / scan);
        Real b = std::min(1.0, (static_cast<Real>(best) + 1.0) / scan);
        const Real ratio = (std::sqrt(5.0) - 1.0) / 2.0;
        Real c = b - ratio * (b - a);
        Real d = a + ratio * (b - a);
        Real fc = fn(c), fd = fn(d);
        for (int iter = 0; iter < 60; ++iter) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = fn(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = fn(d);
            }
        }
        return std::min({best_value, fc, fd});
    }

    inline std::string format_real(Real value)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", value);
        if (std::stod(buf) == value)
            return buf;
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }

} // namespace detail

/// f1 = |x1|, f2 = 1 - sqrt|x1| + 2/(D-1) * sum_k (x_k - sin(pi |x1|))^2 on [-1, 1]^D.
///
/// Branch 0 has x1 >= 0, branch 1 has x1 <= 0; both are global.
class SineMirror final : public Problem {
public:
    explicit SineMirror(std::size_t dimension = 2)
        : Problem(make_box(dimension), 2), dimension_(dimension)
    {
    }

    std::string id() const override
    {
        return dimension_ == 2 ? "sinemirror" : "sinemirrord-d" + std::to_string(dimension_);
    }

    std::size_t branch_count() const override { return 2; }
    bool branch_is_local(std::size_t) const override { return false; }

    Vector branch_point(std::size_t branch, Real t) const
    {
        Vector x(dimension_, std::sin(std::numbers::pi * t));
        x[0] = branch == 0 ? t : -t;
        return x;
    }

    Real branch_distance(std::span<const Real> x, std::size_t branch) const override
    {
        require(branch < 2, "SineMirror: no such branch");
        const Vector u = box().normalize(x);
        const Real sq = detail::minimize_on_unit_interval(
            [&](Real t) { return squared_distance(u, box().normalize(branch_point(branch, t))); });
        return std::sqrt(std::max(0.0, sq));
    }

    ReferenceSet sample_reference(std::size_t count, ReferenceKind kind) const override
    {
        require(count >= 2, "sample_reference: need at least two points");
        ReferenceSet ref;
        ref.global_only_fallback = kind == ReferenceKind::global_and_local;
        const auto per_branch = detail::split_evenly(count, 2);
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t i = 0; i < per_branch[b]; ++i) {
                const Real t = detail::grid_point(i, per_branch[b]);
                ref.x.push_back(branch_point(b, t));
                ref.f.push_back({t, 1.0 - std::sqrt(t)});
                ref.local.push_back(false);
            }
        return ref;
    }

private:
    static Box make_box(std::size_t dimension)
    {
        require(dimension >= 2, "SineMirror: dimension must be at least 2");
        return Box{Vector(dimension, -1.0), Vector(dimension, 1.0)};
    }

    Vector compute(std::span<const Real> x) const override
    {
        const Real a = std::abs(x[0]);
        const Real target = std::sin(std::numbers::pi * a);
        Real residual = 0.0;
        for (std::size_t k = 1; k < x.size(); ++k)
            residual += (x[k] - target) * (x[k] - target);
        const Real weight = 2.0 / static_cast<Real>(dimension_ - 1);
        return {a, 1.0 - std::sqrt(a) + weight * residual};
    }

    std::size_t dimension_;
};

/// k regular m-gons of unit circumradius on a 4-unit grid; the decision vector
/// holds D/2 planar points and f_i is their mean distance to the nearest i-th vertex.
class Polygon final : public Problem {
public:
    Polygon(std::size_t polygons, std::size_t objectives, std::size_t dimension)
        : Problem(make_box(polygons, objectives, dimension), objectives), polygons_(polygons),
          points_(dimension / 2), grid_(grid_size(polygons))
    {
        for (std::size_t j = 0; j < polygons_; ++j) {
            const std::array<Real, 2> c = center(j);
            std::vector<std::array<Real, 2>> verts;
            for (std::size_t i = 1; i <= objectives; ++i) {
                const Real theta = 2.0 * std::numbers::pi * static_cast<Real>(i) / static_cast<Real>(objectives) +
                                   std::numbers::pi / 2.0;
                verts.push_back({c[0] + std::cos(theta), c[1] + std::sin(theta)});
            }
            vertices_.push_back(std::move(verts));
        }
    }

    std::string id() const override
    {
        return "polygon-k" + std::to_string(polygons_) + "-m" + std::to_string(objectives()) + "-d" +
               std::to_string(dimension());
    }

    std::size_t polygon_count() const { return polygons_; }
    std::size_t point_count() const { return points_; }

    std::array<Real, 2> center(std::size_t j) const
    {
        return {2.0 + 4.0 * static_cast<Real>(j % grid_), 2.0 + 4.0 * static_cast<Real>(j / grid_)};
    }

    const std::vector<std::array<Real, 2>>& vertices(std::size_t j) const { return vertices_.at(j); }

    std::size_t branch_count() const override { return polygons_; }
    bool branch_is_local(std::size_t) const override { return false; }

    /// Distance to the nearest configuration with every point at one common
    /// location inside polygon j: the spread about the centroid plus the
    /// centroid's distance to the polygon, weighted by the point count.
    Real branch_distance(std::span<const Real> x, std::size_t branch) const override
    {
        require(branch < polygons_, "Polygon: no such branch");
        require(x.size() == dimension(), "Polygon: wrong decision vector length");
        std::array<Real, 2> mean{0.0, 0.0};
        for (std::size_t l = 0; l < points_; ++l) {
            mean[0] += x[2 * l];
            mean[1] += x[2 * l + 1];
        }
        mean[0] /= static_cast<Real>(points_);
        mean[1] /= static_cast<Real>(points_);
        Real spread = 0.0;
        for (std::size_t l = 0; l < points_; ++l) {
            const Real dx = x[2 * l] - mean[0];
            const Real dy = x[2 * l + 1] - mean[1];
            spread += dx * dx + dy * dy;
        }
        const auto q = project_onto_hull(mean, branch);
        const Real gx = mean[0] - q[0];
        const Real gy = mean[1] - q[1];
        const Real sq = spread + static_cast<Real>(points_) * (gx * gx + gy * gy);
        return std::sqrt(sq) / width();
    }

    /// Polygon whose circumscribed disc contains every point of x, if any.
    std::optional<std::size_t> covering_polygon(std::span<const Real> x) const
    {
        for (std::size_t j = 0; j < polygons_; ++j) {
            const auto c = center(j);
            bool inside = true;
            for (std::size_t l = 0; l < points_ && inside; ++l) {
                const Real dx = x[2 * l] - c[0];
                const Real dy = x[2 * l + 1] - c[1];
                inside = dx * dx + dy * dy <= 1.0;
            }
            if (inside)
                return j;
        }
        return std::nullopt;
    }

    ReferenceSet sample_reference(std::size_t count, ReferenceKind kind) const override
    {
        require(count >= 2, "sample_reference: need at least two points");
        ReferenceSet ref;
        ref.global_only_fallback = kind == ReferenceKind::global_and_local;
        const auto per_branch = detail::split_evenly(count, polygons_);
        for (std::size_t j = 0; j < polygons_; ++j) {
            for (const auto& p : hull_samples(j, per_branch[j])) {
                Vector x(dimension());
                for (std::size_t l = 0; l < points_; ++l) {
                    x[2 * l] = p[0];
                    x[2 * l + 1] = p[1];
                }
                Vector f(objectives());
                for (std::size_t i = 0; i < objectives(); ++i)
                    f[i] = std::hypot(p[0] - vertices_[j][i][0], p[1] - vertices_[j][i][1]);
                ref.x.push_back(std::move(x));
                ref.f.push_back(std::move(f));
                ref.local.push_back(false);
            }
        }
        return ref;
    }

private:
    static std::size_t grid_size(std::size_t polygons)
    {
        return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<Real>(polygons))));
    }

    static Box make_box(std::size_t polygons, std::size_t objectives, std::size_t dimension)
    {
        require(polygons >= 1, "Polygon: need at least one polygon");
        require(objectives >= 2, "Polygon: need at least two objectives");
        require(dimension >= 2 && dimension % 2 == 0, "Polygon: dimension must be even");
        const Real hi = 4.0 * static_cast<Real>(grid_size(polygons));
        return Box{Vector(dimension, 0.0), Vector(dimension, hi)};
    }

    Real width() const { return box().upper[0] - box().lower[0]; }

    Vector compute(std::span<const Real> x) const override
    {
        Vector f(objectives(), 0.0);
        for (std::size_t i = 0; i < objectives(); ++i) {
            Real total = 0.0;
            for (std::size_t l = 0; l < points_; ++l) {
                Real nearest = std::numeric_limits<Real>::infinity();
                for (std::size_t j = 0; j < polygons_; ++j)
                    nearest = std::min(nearest, std::hypot(x[2 * l] - vertices_[j][i][0], x[2 * l + 1] - vertices_[j][i][1]));
                total += nearest;
            }
            f[i] = total / static_cast<Real>(points_);
        }
        return f;
    }

    static std::array<Real, 2> project_onto_segment(const std::array<Real, 2>& p, const std::array<Real, 2>& a,
                                                    const std::array<Real, 2>& b)
    {
        const Real ex = b[0] - a[0], ey = b[1] - a[1];
        const Real len2 = ex * ex + ey * ey;
        const Real t = len2 > 0.0 ? std::clamp(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2, 0.0, 1.0) : 0.0;
        return {a[0] + t * ex, a[1] + t * ey};
    }

    std::array<Real, 2> project_onto_hull(const std::array<Real, 2>& p, std::size_t j) const
    {
        const auto& v = vertices_[j];
        const std::size_t m = v.size();
        if (m >= 3) {
            bool inside = true;
            for (std::size_t i = 0; i < m && inside; ++i) {
                const auto& a = v[i];
                const auto& b = v[(i + 1) % m];
                inside = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0.0;
            }
            if (inside)
                return p;
        }
        std::array<Real, 2> best = v[0];
        Real best_d = std::numeric_limits<Real>::infinity();
        const std::size_t edges = m == 2 ? 1 : m;
        for (std::size_t i = 0; i < edges; ++i) {
            const auto q = project_onto_segment(p, v[i], v[(i + 1) % m]);
            const Real d = std::hypot(p[0] - q[0], p[1] - q[1]);
            if (d < best_d) {
                best_d = d;
                best = q;
            }
        }
        return best;
    }

    // Evenly spread points inside the hull: a segment grid for m = 2, otherwise
    // the R2 low-discrepancy sequence over the circumscribed square, keeping
    // points inside the polygon.
    std::vector<std::array<Real, 2>> hull_samples(std::size_t j, std::size_t count) const
    {
        std::vector<std::array<Real, 2>> out;
        const auto& v = vertices_[j];
        if (v.size() == 2) {
            for (std::size_t i = 0; i < count; ++i) {
                const Real t = detail::grid_point(i, count);
                out.push_back({v[0][0] + t * (v[1][0] - v[0][0]), v[0][1] + t * (v[1][1] - v[0][1])});
            }
            return out;
        }
        const auto c = center(j);
        constexpr Real a1 = 0.75487766624669276;
        constexpr Real a2 = 0.56984029099805327;
        for (std::size_t n = 1; out.size() < count; ++n) {
            const Real u = std::fmod(0.5 + a1 * static_cast<Real>(n), 1.0);
            const Real w = std::fmod(0.5 + a2 * static_cast<Real>(n), 1.0);
            const std::array<Real, 2> p{c[0] - 1.0 + 2.0 * u, c[1] - 1.0 + 2.0 * w};
            const auto q = project_onto_hull(p, j);
            if (q[0] == p[0] && q[1] == p[1])
                out.push_back(p);
        }
        return out;
    }

    std::size_t polygons_;
    std::size_t points_;
    std::size_t grid_;
    std::vector<std::vector<std::array<Real, 2>>> vertices_;
};

/// h(x2) = min(20 (x2 - 1/4)^2, delta + 20 (x2 - 3/4)^2); f = (x1 + h, 1 - x1 + h) on [0, 1]^2.
///
/// Branch 0 (x2 = 1/4) is global; branch 1 (x2 = 3/4) is local with a front
/// offset by delta in each objective.
class DualDepth final : public Problem {
public:
    explicit DualDepth(Real delta = 0.1) : Problem(Box{{0.0, 0.0}, {1.0, 1.0}}, 2), delta_(delta)
    {
        require(delta > 0.0 && delta < 1.0, "DualDepth: delta must lie in (0, 1)");
    }

    static constexpr Real global_x2 = 0.25;
    static constexpr Real local_x2 = 0.75;

    std::string id() const override { return "dualdepth-d" + detail::format_real(delta_); }
    Real delta() const { return delta_; }

    std::size_t branch_count() const override { return 2; }
    bool branch_is_local(std::size_t branch) const override { return branch == 1; }

    Real branch_distance(std::span<const Real> x, std::size_t branch) const override
    {
        require(branch < 2, "DualDepth: no such branch");
        return std::abs(x[1] - (branch == 0 ? global_x2 : local_x2));
    }

    ReferenceSet sample_reference(std::size_t count, ReferenceKind kind) const override
    {
        require(count >= 2, "sample_reference: need at least two points");
        ReferenceSet ref;
        ref.includes_local = kind == ReferenceKind::global_and_local;
        const std::size_t branches = ref.includes_local ? 2 : 1;
        const auto per_branch = detail::split_evenly(count, branches);
        for (std::size_t b = 0; b < branches; ++b) {
            const Real offset = b == 0 ? 0.0 : delta_;
            for (std::size_t i = 0; i < per_branch[b]; ++i) {
                const Real t = detail::grid_point(i, per_branch[b]);
                ref.x.push_back({t, b == 0 ? global_x2 : local_x2});
                ref.f.push_back({t + offset, 1.0 - t + offset});
                ref.local.push_back(b == 1);
            }
        }
        return ref;
    }

private:
    Vector compute(std::span<const Real> x) const override
    {
        const Real a = x[1] - global_x2;
        const Real b = x[1] - local_x2;
        const Real h = std::min(20.0 * a * a, delta_ + 20.0 * b * b);
        return {x[0] + h, 1.0 - x[0] + h};
    }

    Real delta_;
};

/// Nearest Pareto-set branch of x and its normalized distance.
inline std::pair<std::size_t, Real> nearest_branch(const Problem& problem, std::span<const Real> x)
{
    std::size_t best = 0;
    Real best_d = std::numeric_limits<Real>::infinity();
    for (std::size_t b = 0; b < problem.branch_count(); ++b) {
        const Real d = problem.branch_distance(x, b);
        if (d < best_d) {
            best_d = d;
            best = b;
        }
    }
    return {best, best_d};
}

namespace detail {

    inline std::size_t parse_count(const std::string& text, const std::string& id)
    {
        std::size_t used = 0;
        unsigned long value = 0;
        try {
            value = std::stoul(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size())
            throw ContractViolation("malformed problem id '" + id + "'");
        return value;
    }

    inline Real parse_real(const std::string& text, const std::string& id)
    {
        std::size_t used = 0;
        Real value = 0.0;
        try {
            value = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size())
            throw ContractViolation("malformed problem id '" + id + "'");
        return value;
    }

} // namespace detail

/// Builds a problem from its id. Parameters may be omitted:
/// `sinemirrord` means D = 10, `polygon` means k4-m3-d10, `dualdepth` means delta = 0.10.
inline std::unique_ptr<Problem> make_problem(const std::string& id)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t dash = id.find('-', start);
        parts.push_back(id.substr(start, dash - start));
        if (dash == std::string::npos)
            break;
        start = dash + 1;
    }
    const std::string& family = parts.front();
    auto param = [&](char key) -> std::optional<std::string> {
        for (std::size_t i = 1; i < parts.size(); ++i)
            if (!parts[i].empty() && parts[i][0] == key)
                return parts[i].substr(1);
        return std::nullopt;
    };
    auto check_keys = [&](const std::string& allowed) {
        for (std::size_t i = 1; i < parts.size(); ++i)
            if (parts[i].empty() || allowed.find(parts[i][0]) == std::string::npos)
                throw ContractViolation("malformed problem id '" + id + "'");
    };

    if (family == "sinemirror") {
        check_keys("");
        return std::make_unique<SineMirror>(2);
    }
    if (family == "sinemirrord") {
        check_keys("d");
        const auto d = param('d');
        return std::make_unique<SineMirror>(d ? detail::parse_count(*d, id) : 10);
    }
    if (family == "polygon") {
        check_keys("kmd");
        const auto k = param('k');
        const auto m = param('m');
        const auto d = param('d');
        return std::make_unique<Polygon>(k ? detail::parse_count(*k, id) : 4, m ? detail::parse_count(*m, id) : 3,
                                         d ? detail::parse_count(*d, id) : 10);
    }
    if (family == "dualdepth") {
        check_keys("d");
        const auto d = param('d');
        return std::make_unique<DualDepth>(d ? detail::parse_real(*d, id) : 0.1);
    }
    throw ContractViolation("unknown problem id '" + id + "'");
}

} // namespace commea
