#include "koch/construction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "koch/error.hpp"

namespace koch {

namespace {

Point2 left_normal(const Segment& s) {
    const Point2 d = s.b - s.a;
    const double len = norm(d);
    return {-d.y / len, d.x / len};
}

Point2 apex_for(const Segment& s, double theta, int orientation) {
    const double h = 0.5 * s.length() * std::tan(theta);
    return s.mid() + (orientation * h) * left_normal(s);
}

int root_orientation_for(const Segment& s, double theta) {
    const Point2 up = apex_for(s, theta, +1), down = apex_for(s, theta, -1);
    if (up.x != down.x) return up.x > down.x ? +1 : -1;
    return up.y >= down.y ? +1 : -1;
}

void check_theta_range(double theta, const DyadicIndex& idx) {
    if (!(theta >= 0.0 && theta <= max_base_angle() + 1e-9))
        throw Error(ErrorKind::schedule, "base angle out of range at stage " + std::to_string(idx.n));
}

}  // namespace

Cap cap_on_segment(const Segment& base, double theta, const Cap* parent) {
    validate_segment(base);
    if (!(theta > 0.0 && theta <= max_base_angle() + 1e-9))
        throw Error(ErrorKind::invalid_argument, "cap base angle must lie in (0, pi/6]");
    Cap cap;
    cap.base = base;
    cap.theta = theta;
    if (parent) {
        cap.index = parent->index.left();
        // The interior of the parent triangle lies on the side of the base containing the
        // parent's centroid.
        const Point2 centroid = (1.0 / 3.0) * (parent->base.a + parent->base.b + parent->apex);
        cap.orientation = dot(centroid - base.mid(), left_normal(base)) >= 0.0 ? +1 : -1;
    } else {
        cap.orientation = root_orientation_for(base, theta);
    }
    cap.apex = apex_for(base, theta, cap.orientation);
    return cap;
}

const std::vector<Point2>& CapTree::stage_vertices(int n) const {
    if (n < 0 || n > depth_ + 1)
        throw Error(ErrorKind::invalid_argument, "stage " + std::to_string(n) + " outside the built tree");
    return vertices_[static_cast<std::size_t>(n)];
}

const std::vector<double>& CapTree::stage_thetas(int n) const {
    if (n < 0 || n > depth_)
        throw Error(ErrorKind::invalid_argument, "cap stage " + std::to_string(n) + " outside the built tree");
    return thetas_[static_cast<std::size_t>(n)];
}

double CapTree::theta(const DyadicIndex& idx) const {
    validate_index(idx);
    return stage_thetas(idx.n)[idx.i];
}

Segment CapTree::segment(const DyadicIndex& idx) const {
    validate_index(idx);
    const auto& v = stage_vertices(idx.n);
    return {v[idx.i], v[idx.i + 1]};
}

Cap CapTree::cap(const DyadicIndex& idx) const {
    Cap c;
    c.index = idx;
    c.base = segment(idx);
    c.theta = theta(idx);
    c.apex = vertices_[static_cast<std::size_t>(idx.n) + 1][2 * idx.i + 1];
    // Child caps point into their parent, which flips the side at every stage.
    c.orientation = (idx.n % 2 == 0) ? root_orientation_ : -root_orientation_;
    return c;
}

CapTree build_tree(const AngleSchedule& schedule, const Segment& base, int depth) {
    validate_segment(base);
    if (depth < 0) throw Error(ErrorKind::invalid_argument, "depth must be >= 0");
    if (depth > kMaxDepth)
        throw Error(ErrorKind::depth_guard, "depth " + std::to_string(depth) + " exceeds the guard of " +
                                                std::to_string(kMaxDepth));
    CapTree tree;
    tree.schedule_ = schedule;
    tree.depth_ = depth;
    tree.base_ = base;
    tree.root_orientation_ = root_orientation_for(base, schedule.theta({0, 0}));
    tree.vertices_.resize(static_cast<std::size_t>(depth) + 2);
    tree.thetas_.resize(static_cast<std::size_t>(depth) + 1);
    tree.vertices_[0] = {base.a, base.b};

    for (int n = 0; n <= depth; ++n) {
        const auto& v = tree.vertices_[static_cast<std::size_t>(n)];
        const std::size_t count = v.size() - 1;
        auto& th = tree.thetas_[static_cast<std::size_t>(n)];
        th.resize(count);
        if (schedule.stage_uniform()) {
            std::fill(th.begin(), th.end(), schedule.stage_theta(n));
            check_theta_range(th[0], {n, 0});
            if (n > 0 && th[0] > tree.thetas_[static_cast<std::size_t>(n) - 1][0] + 1e-15)
                throw Error(ErrorKind::schedule, "angle increases at stage " + std::to_string(n));
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                const DyadicIndex idx{n, i};
                th[i] = schedule.theta(idx);
                check_theta_range(th[i], idx);
                if (n > 0 && th[i] > tree.thetas_[static_cast<std::size_t>(n) - 1][i / 2] + 1e-15)
                    throw Error(ErrorKind::schedule, "angle increases below stage " + std::to_string(n - 1) +
                                                         " position " + std::to_string(i / 2 + 1));
            }
        }
        const int orientation = (n % 2 == 0) ? tree.root_orientation_ : -tree.root_orientation_;
        auto& next = tree.vertices_[static_cast<std::size_t>(n) + 1];
        next.resize(2 * count + 1);
        for (std::size_t i = 0; i < count; ++i) {
            next[2 * i] = v[i];
            next[2 * i + 1] = apex_for({v[i], v[i + 1]}, th[i], orientation);
        }
        next[2 * count] = v[count];
    }
    return tree;
}

CapTree build_tree(const AngleSchedule& schedule, int depth) {
    return build_tree(schedule, Segment{{0.0, 0.0}, {1.0, 0.0}}, depth);
}

Polyline polyline(const CapTree& tree, int stage) {
    if (stage < 0 || stage > tree.depth())
        throw Error(ErrorKind::invalid_argument, "stage " + std::to_string(stage) + " exceeds tree depth " +
                                                     std::to_string(tree.depth()));
    return Polyline{tree.stage_vertices(stage), stage};
}

DyadicIndex edge_point_cap(std::size_t k) {
    if (k < 3) throw Error(ErrorKind::invalid_argument, "edge points 1 and 2 are base endpoints, not apexes");
    const std::uint64_t m = k - 3;
    int n = 0;
    while ((std::uint64_t{1} << (n + 1)) - 1 <= m) ++n;
    return {n, m - ((std::uint64_t{1} << n) - 1)};
}

std::vector<Point2> edge_points(const CapTree& tree) {
    std::vector<Point2> out{tree.base().a, tree.base().b};
    for (int n = 0; n < tree.depth(); ++n) {
        const auto& v = tree.stage_vertices(n + 1);
        for (std::size_t i = 1; i < v.size(); i += 2) out.push_back(v[i]);
    }
    return out;
}

double edge_ball_rho1(double eps) { return 0.25 * std::ldexp(1.0, -7) * std::sqrt(1.0 + 7.0 * 16.0 * eps * eps); }

namespace {

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
    return dist(p, a + t * d);
}

double distance_to_polyline(Point2 p, const std::vector<Point2>& v) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) best = std::min(best, distance_to_segment(p, v[i], v[i + 1]));
    return best;
}

}  // namespace

EdgeBallSpec edge_ball_spec(const CapTree& tree, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorKind::invalid_argument, "edge balls need eps > 0");
    EdgeBallSpec spec;
    spec.centers = edge_points(tree);
    const double rho1 = edge_ball_rho1(eps);
    for (std::size_t k = 1; k <= spec.centers.size(); ++k) {
        const double rho = rho1 * std::pow(4.0, 1.0 - static_cast<double>(k));
        spec.rho.push_back(rho);
        double r = rho;
        if (k >= 3 && rho > 0.0) {
            const DyadicIndex cap = edge_point_cap(k);
            for (int stage = cap.n - 2; stage <= cap.n - 1; ++stage)
                if (stage >= 0) r = std::min(r, 0.5 * distance_to_polyline(spec.centers[k - 1], tree.stage_vertices(stage)));
        }
        spec.radii.push_back(r);
    }
    return spec;
}

PointSample sample_limit_set(const CapTree& tree, std::size_t count, const EdgeBallSpec* exclusion) {
    const auto& v = tree.stage_vertices(tree.depth());
    const std::size_t segments = v.size() - 1;
    if (count == 0 || count > segments)
        throw Error(ErrorKind::invalid_argument, "sample count must lie in [1, 2^depth]");
    PointSample s;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t first = k * segments / count, last = (k + 1) * segments / count;
        const Point2 p = midpoint(v[first], v[first + 1]);
        if (exclusion) {
            bool inside = false;
            for (std::size_t b = 0; b < exclusion->centers.size() && !inside; ++b)
                inside = exclusion->radii[b] > 0.0 && dist(p, exclusion->centers[b]) < exclusion->radii[b];
            if (inside) continue;
        }
        double w = 0.0;
        for (std::size_t j = first; j < last; ++j) w += dist(v[j], v[j + 1]);
        s.points.push_back(p);
        s.weights.push_back(w);
    }
    // Spacing along the curve between consecutive samples bounds the sample resolution.
    double res = 0.0;
    for (std::size_t k = 0; k + 1 < count; ++k) {
        const std::size_t a = k * segments / count, b = (k + 1) * segments / count;
        double along = 0.5 * dist(v[a], v[a + 1]) + 0.5 * dist(v[b], v[b + 1]);
        for (std::size_t j = a + 1; j < b; ++j) along += dist(v[j], v[j + 1]);
        res = std::max(res, along);
    }
    s.resolution = count == 1 ? dist(v.front(), v.back()) : res;
    return s;
}

PointSample densify(const Polyline& line, double spacing) {
    if (!(spacing > 0.0)) throw Error(ErrorKind::invalid_argument, "densify spacing must be > 0");
    PointSample s;
    const auto& v = line.vertices;
    if (v.empty()) return s;
    s.points.push_back(v.front());
    s.weights.push_back(0.0);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double len = dist(v[i], v[i + 1]);
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / spacing)));
        for (std::size_t k = 1; k <= pieces; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(pieces);
            s.points.push_back(v[i] + t * (v[i + 1] - v[i]));
            s.weights.push_back(len / static_cast<double>(pieces));
        }
        s.resolution = std::max(s.resolution, len / static_cast<double>(pieces));
    }
    return s;
}

GalleryName parse_gallery_name(const std::string& name) {
    if (name == "N" || name == "lines_n") return GalleryName::lines_n;
    if (name == "LambdaDelta" || name == "lambda_delta") return GalleryName::lambda_delta;
    if (name == "LambdaSq" || name == "lambda_sq") return GalleryName::lambda_sq;
    if (name == "GammaEps" || name == "gamma_eps") return GalleryName::gamma_eps;
    if (name == "AEps" || name == "aeps") return GalleryName::aeps;
    if (name == "ScriptAEps" || name == "script_aeps") return GalleryName::script_aeps;
    throw Error(ErrorKind::parse, "unknown gallery set '" + name + "'");
}

const char* to_string(GalleryName name) {
    switch (name) {
        case GalleryName::lines_n: return "N";
        case GalleryName::lambda_delta: return "LambdaDelta";
        case GalleryName::lambda_sq: return "LambdaSq";
        case GalleryName::gamma_eps: return "GammaEps";
        case GalleryName::aeps: return "AEps";
        case GalleryName::script_aeps: return "ScriptAEps";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kMinPointsPerCurve = 64;

bool is_line_family(GalleryName name) {
    return name == GalleryName::lines_n || name == GalleryName::lambda_delta || name == GalleryName::lambda_sq;
}

}  // namespace

int gallery_curve_count(GalleryName name, const GalleryParams& p, std::size_t count) {
    if (!is_line_family(name)) return 0;
    if (p.n_max > 0) return p.n_max;
    const double xmax = std::max(std::abs(p.box_min_x), std::abs(p.box_max_x));
    double needed = 1.0;
    switch (name) {
        case GalleryName::lines_n: needed = 1.0 / p.tolerance; break;  // omitted lines lie in (0, 1/n_max]
        case GalleryName::lambda_delta: needed = p.delta * xmax / p.tolerance; break;
        case GalleryName::lambda_sq: needed = xmax * xmax / p.tolerance; break;
        default: break;
    }
    const double budget = std::max(1.0, std::floor(static_cast<double>(count) / kMinPointsPerCurve));
    return static_cast<int>(std::max(1.0, std::min(std::ceil(needed), budget)));
}

PointSample gallery(GalleryName name, const GalleryParams& p, std::size_t count) {
    if (count == 0) throw Error(ErrorKind::invalid_argument, "gallery needs a positive point count");
    switch (name) {
        case GalleryName::gamma_eps: {
            const auto tree = build_tree(AngleSchedule::constant(std::atan(2.0 * p.eps)), p.depth);
            return sample_limit_set(tree, std::min<std::size_t>(count, std::size_t{1} << p.depth));
        }
        case GalleryName::aeps:
        case GalleryName::script_aeps: {
            const auto tree = build_tree(AngleSchedule::aeps(p.eps), p.depth);
            const std::size_t m = std::min<std::size_t>(count, std::size_t{1} << p.depth);
            if (name == GalleryName::aeps) return sample_limit_set(tree, m);
            const auto balls = edge_ball_spec(tree, p.eps);
            return sample_limit_set(tree, m, &balls);
        }
        default: break;
    }
    if (!(p.box_max_x > p.box_min_x && p.box_max_y > p.box_min_y))
        throw Error(ErrorKind::invalid_argument, "line-family gallery sets need a non-empty bounding box");
    const int curves = gallery_curve_count(name, p, count);
    const std::size_t per_curve = std::max<std::size_t>(2, count / static_cast<std::size_t>(curves));
    // x-grid anchored at 0 so that x = 0 is sampled whenever it lies in the box.
    const double h = (p.box_max_x - p.box_min_x) / static_cast<double>(per_curve - 1);
    const auto k0 = static_cast<long long>(std::ceil(p.box_min_x / h));
    const auto k1 = static_cast<long long>(std::floor(p.box_max_x / h));
    PointSample s;
    double max_slope = 0.0;
    auto emit = [&](double x, double y, double slope) {
        if (y < p.box_min_y || y > p.box_max_y) return;
        s.points.push_back({x, y});
        s.weights.push_back(h * std::sqrt(1.0 + slope * slope));
        max_slope = std::max(max_slope, std::abs(slope));
    };
    for (int n = 1; n <= curves; ++n) {
        const double c = 1.0 / n;
        for (long long k = k0; k <= k1; ++k) {
            const double x = static_cast<double>(k) * h;
            switch (name) {
                case GalleryName::lines_n: emit(x, c, 0.0); break;
                case GalleryName::lambda_delta:
                    emit(x, p.delta * x * c, p.delta * c);
                    if (x != 0.0) emit(x, -p.delta * x * c, -p.delta * c);
                    break;
                case GalleryName::lambda_sq:
                    emit(x, x * x * c, 2 * x * c);
                    if (x != 0.0) emit(x, -x * x * c, -2 * x * c);
                    break;
                default: break;
            }
        }
    }
    s.resolution = h * std::sqrt(1.0 + max_slope * max_slope);
    return s;
}

double AffineMap2::contraction() const {
    // Largest singular value of the linear part.
    const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
    const double s1 = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    return std::sqrt(0.5 * (s1 + std::sqrt(std::max(0.0, s1 * s1 - 4 * det * det))));
}

std::pair<AffineMap2, AffineMap2> ifs_maps_gamma(double eps) {
    if (!(eps > 0.0 && eps < 0.25)) throw Error(ErrorKind::invalid_argument, "ifs maps need eps in (0, 1/4)");
    // In complex notation with apex a = 1/2 + i eps: S2(z) = a conj(z) fixes 0 and sends 1 to a;
    // S1(z) = a + (1 - a) conj(z) sends 0 to a and fixes 1. Both reflect, so the image caps
    // point into the root triangle as the construction requires.
    using C = std::complex<double>;
    auto reflecting = [](C w, C shift) {
        AffineMap2 f;
        f.m[0][0] = w.real();
        f.m[0][1] = w.imag();
        f.m[1][0] = w.imag();
        f.m[1][1] = -w.real();
        f.offset = {shift.real(), shift.imag()};
        return f;
    };
    const C a(0.5, eps);
    return {reflecting(C(1.0, 0.0) - a, a), reflecting(a, C(0.0, 0.0))};
}

std::vector<Point2> ifs_open_set_gamma(double eps) {
    if (!(eps > 0.0 && eps < 0.25)) throw Error(ErrorKind::invalid_argument, "open set needs eps in (0, 1/4)");
    // The interior of the root cap: its images are the two child caps, which meet only at the apex.
    return {{0.0, 0.0}, {1.0, 0.0}, {0.5, eps}};
}

}  // namespace koch
