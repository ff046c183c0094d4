#include "koch/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "koch/error.hpp"

namespace koch {

namespace {

constexpr double kPi = std::numbers::pi;

// Candidate selection with deterministic tie-breaking: the smaller width wins, and widths
// equal up to rounding fall back to the smaller canonical angle.
struct BestFit {
    LineFit fit;
    bool valid = false;
    double scale = 1.0;

    void offer(const LineFit& candidate) {
        const double tol = 1e-12 * scale;
        if (!valid || candidate.width < fit.width - tol ||
            (candidate.width <= fit.width + tol && candidate.line.angle < fit.line.angle)) {
            fit = candidate;
            valid = true;
        }
    }
};

double max_norm(std::span<const Point2> points, Point2 origin) {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, dist(p, origin));
    return m;
}

void require_nonempty_finite(std::span<const Point2> points) {
    if (points.empty()) throw Error(ErrorKind::invalid_argument, "line fit needs at least one point");
    for (const auto& p : points) require_finite(p, "fit point");
}

}  // namespace

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void require_finite(Point2 p, const char* what) {
    if (!is_finite(p)) throw Error(ErrorKind::invalid_argument, std::string(what) + " has a non-finite coordinate");
}

void validate_segment(const Segment& s) {
    require_finite(s.a, "segment endpoint");
    require_finite(s.b, "segment endpoint");
    if (s.a == s.b) throw Error(ErrorKind::invalid_argument, "degenerate segment (coincident endpoints)");
}

double canonical_angle(double angle) {
    double a = std::fmod(angle, kPi);
    if (a < 0.0) a += kPi;
    if (a >= kPi) a -= kPi;
    return a;
}

AffineLine AffineLine::through(Point2 p, double angle) { return AffineLine{p, canonical_angle(angle)}; }

AffineLine AffineLine::through_points(Point2 p, Point2 q) {
    const Point2 d = q - p;
    return through(p, std::atan2(d.y, d.x));
}

double distance_to_line(Point2 p, const AffineLine& line) {
    require_finite(p, "point");
    return std::abs(dot(p - line.point, line.normal()));
}

Frame frame_of_segment(const Segment& s) {
    validate_segment(s);
    const Point2 d = s.b - s.a;
    return Frame{s.mid(), std::atan2(d.y, d.x)};
}

double set_angle(const Segment& s1, const Segment& s2) {
    validate_segment(s1);
    validate_segment(s2);
    const Point2 d1 = s1.b - s1.a, d2 = s2.b - s2.a;
    double a = std::abs(std::atan2(cross(d1, d2), dot(d1, d2)));  // in [0, pi]
    if (a > kPi / 2) a = kPi - a;
    return a;
}

bool cone_contains(Point2 apex, const AffineLine& axis, double half_angle, Point2 p) {
    if (!(half_angle > 0.0 && half_angle < kPi / 2))
        throw Error(ErrorKind::invalid_argument, "cone half angle must lie in (0, pi/2)");
    const Point2 v = p - apex;
    const double along = std::abs(dot(v, axis.direction()));
    const double across = std::abs(dot(v, axis.normal()));
    return across <= std::tan(half_angle) * along + 1e-12 * norm(v);
}

double max_distance_to_line(std::span<const Point2> points, const AffineLine& line) {
    double m = 0.0;
    const Point2 n = line.normal();
    for (const auto& p : points) m = std::max(m, std::abs(dot(p - line.point, n)));
    return m;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

LineFit minmax_fit_through(std::span<const Point2> points, Point2 center) {
    require_nonempty_finite(points);
    require_finite(center, "fit center");
    // max_i |v_i . n| is the support function of the symmetric hull conv{+-v_i}; its minimum
    // over unit normals is the distance from the origin to the nearest hull edge line, so the
    // optimal direction is parallel to that edge.
    const double scale = max_norm(points, center);
    const double tiny = 1e-15 * std::max(scale, 1e-300);
    std::vector<Point2> sym;
    sym.reserve(2 * points.size());
    Point2 far{1.0, 0.0};
    double far_norm = 0.0;
    for (const auto& p : points) {
        const Point2 v = p - center;
        const double r = norm(v);
        if (r <= tiny) continue;
        sym.push_back(v);
        sym.push_back(-1.0 * v);
        if (r > far_norm) { far_norm = r; far = v; }
    }
    if (sym.empty()) return LineFit{AffineLine::through(center, 0.0), 0.0};

    const auto hull = convex_hull(std::move(sym));
    if (hull.size() < 3) {
        // All points are collinear with the center.
        return LineFit{AffineLine::through(center, std::atan2(far.y, far.x)), 0.0};
    }
    BestFit best;
    best.scale = scale;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2 u = hull[i], w = hull[(i + 1) % hull.size()];
        const Point2 e = w - u;
        const AffineLine line = AffineLine::through(center, std::atan2(e.y, e.x));
        // Width re-evaluated on the original points so the result is the exact objective value.
        best.offer(LineFit{line, max_distance_to_line(points, line)});
    }
    return best.fit;
}

LineFit minmax_fit_free(std::span<const Point2> points) {
    require_nonempty_finite(points);
    const auto hull = convex_hull(std::vector<Point2>(points.begin(), points.end()));
    if (hull.size() == 1) return LineFit{AffineLine::through(hull[0], 0.0), 0.0};
    if (hull.size() == 2) return LineFit{AffineLine::through_points(hull[0], hull[1]), 0.0};

    BestFit best;
    best.scale = max_norm(hull, hull[0]);
    const std::size_t h = hull.size();
    std::size_t j = 1;  // antipodal pointer (rotating calipers)
    for (std::size_t i = 0; i < h; ++i) {
        const Point2 u = hull[i], w = hull[(i + 1) % h];
        const Point2 e = w - u;
        const double len = norm(e);
        auto height = [&](std::size_t k) { return cross(e, hull[k % h] - u) / len; };
        if (j == i) j = (i + 1) % h;
        while (height(j + 1) > height(j)) j = (j + 1) % h;
        const double strip = height(j);
        // Centre line: the edge line shifted inward by half the strip width.
        const Point2 inward{-e.y / len, e.x / len};
        const AffineLine line = AffineLine::through(u + (0.5 * strip) * inward, std::atan2(e.y, e.x));
        best.offer(LineFit{line, 0.5 * strip});
    }
    return best.fit;
}

bool point_in_triangle(Point2 p, Point2 a, Point2 b, Point2 c, double slack) {
    const double orient = cross(b - a, c - a);
    const double s = orient >= 0.0 ? 1.0 : -1.0;
    auto inside_edge = [&](Point2 u, Point2 v) {
        const double len = dist(u, v);
        if (len == 0.0) return dist(p, u) <= slack;
        return s * cross(v - u, p - u) / len >= -slack;
    };
    return inside_edge(a, b) && inside_edge(b, c) && inside_edge(c, a);
}

double polygon_area(std::span<const Point2> poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * twice;
}

std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> clip) {
    std::vector<Point2> out(subject.begin(), subject.end());
    for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
        const Point2 a = clip[i], b = clip[(i + 1) % clip.size()];
        auto side = [&](Point2 p) { return cross(b - a, p - a); };
        std::vector<Point2> in = std::move(out);
        out.clear();
        for (std::size_t k = 0; k < in.size(); ++k) {
            const Point2 p = in[k], q = in[(k + 1) % in.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0.0) out.push_back(p);
            if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
        }
    }
    return out;
}

namespace {

Circle circle_from(Point2 a, Point2 b) { return {midpoint(a, b), 0.5 * dist(a, b)}; }

Circle circle_from(Point2 a, Point2 b, Point2 c) {
    const Point2 ab = b - a, ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    if (std::abs(d) < 1e-300) {
        // Collinear: the widest pair spans the circle.
        Circle best = circle_from(a, b);
        for (const Circle& cand : {circle_from(a, c), circle_from(b, c)})
            if (cand.radius > best.radius) best = cand;
        return best;
    }
    const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
    const Point2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
    return {a + off, norm(off)};
}

bool covers(const Circle& c, Point2 p) { return dist(c.center, p) <= c.radius * (1.0 + 1e-12) + 1e-15; }

}  // namespace

Circle min_enclosing_circle(std::span<const Point2> points) {
    if (points.empty()) return {};
    std::vector<Point2> p(points.begin(), points.end());
    std::mt19937_64 rng(0x5eed);
    std::shuffle(p.begin(), p.end(), rng);
    Circle c{p[0], 0.0};
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (covers(c, p[i])) continue;
        c = Circle{p[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (covers(c, p[j])) continue;
            c = circle_from(p[i], p[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (!covers(c, p[k])) c = circle_from(p[i], p[j], p[k]);
        }
    }
    return c;
}

}  // namespace koch
