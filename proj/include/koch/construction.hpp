#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "koch/geometry.hpp"
#include "koch/schedule.hpp"

namespace koch {

// Isosceles triangular cap erected on `base`; orientation = +1 when the apex lies to the left
// of base.a -> base.b, -1 otherwise.
struct Cap {
    DyadicIndex index;
    Segment base;
    Point2 apex;
    double theta = 0.0;
    int orientation = 1;

    std::array<Point2, 3> vertices() const { return {base.a, base.b, apex}; }
    bool contains(Point2 p, double slack) const { return point_in_triangle(p, base.a, base.b, apex, slack); }
};

// Cap of base angle theta on `base`. With a parent, the apex points into the parent triangle;
// without one, the apex with the larger x (then larger y) is chosen.
Cap cap_on_segment(const Segment& base, double theta, const Cap* parent = nullptr);

struct Polyline {
    std::vector<Point2> vertices;
    int stage = 0;
};

constexpr int kMaxDepth = 30;

// Recursive cap construction stored stage by stage. Caps exist at stages 0..depth; the
// polylines of stages 0..depth+1 are kept (stage depth+1 closes the deepest caps).
class CapTree {
public:
    const AngleSchedule& schedule() const { return schedule_; }
    int depth() const { return depth_; }
    const Segment& base() const { return base_; }
    int root_orientation() const { return root_orientation_; }

    // Vertices of stage n (2^n + 1 points), n in [0, depth + 1].
    const std::vector<Point2>& stage_vertices(int n) const;
    double theta(const DyadicIndex& idx) const;
    const std::vector<double>& stage_thetas(int n) const;
    Cap cap(const DyadicIndex& idx) const;
    Segment segment(const DyadicIndex& idx) const;

private:
    friend CapTree build_tree(const AngleSchedule&, const Segment&, int);
    AngleSchedule schedule_;
    int depth_ = 0;
    Segment base_;
    int root_orientation_ = 1;
    std::vector<std::vector<Point2>> vertices_;
    std::vector<std::vector<double>> thetas_;
};

// Throws Error(depth_guard) beyond kMaxDepth and Error(schedule) on monotonicity violations.
CapTree build_tree(const AngleSchedule& schedule, const Segment& base, int depth);
CapTree build_tree(const AngleSchedule& schedule, int depth);  // base (0,0)-(1,0)

Polyline polyline(const CapTree& tree, int stage);

// Construction-ordered edge points: base.a, base.b, then the apexes stage by stage from left to
// right, i.e. the vertices of the deepest polyline (2^depth + 1 points).
std::vector<Point2> edge_points(const CapTree& tree);
// Stage n (0-based) and position i of the edge point with 1-based ordinal k >= 3.
DyadicIndex edge_point_cap(std::size_t k);

struct EdgeBallSpec {
    std::vector<Point2> centers;
    std::vector<double> radii;
    std::vector<double> rho;  // the caps rho_k the radii are bounded by
};

double edge_ball_rho1(double eps);
// Radii r_k = min(rho_k, d(e_k, earlier polylines)/2) for the tree's edge points.
EdgeBallSpec edge_ball_spec(const CapTree& tree, double eps);

struct PointSample {
    std::vector<Point2> points;
    std::vector<double> weights;  // length represented by each point
    double resolution = 0.0;      // max spacing between neighbouring sample points
};

// m midpoints of deepest-stage segments (evenly spread), dropping points inside exclusion balls.
PointSample sample_limit_set(const CapTree& tree, std::size_t count, const EdgeBallSpec* exclusion = nullptr);

// Points along a polyline spaced at most `spacing` apart (vertices included).
PointSample densify(const Polyline& line, double spacing);

enum class GalleryName { lines_n, lambda_delta, lambda_sq, gamma_eps, aeps, script_aeps };

struct GalleryParams {
    double delta = 0.1;  // lambda_delta slope
    double eps = 0.01;   // gamma_eps / aeps / script_aeps
    int depth = 12;      // tree depth for the constructed sets
    double box_min_x = -1.0, box_min_y = -1.0, box_max_x = 1.0, box_max_y = 1.0;
    int n_max = 0;       // curve count for line families (0 = chosen automatically)
    double tolerance = 1e-6;
};

GalleryName parse_gallery_name(const std::string& name);
const char* to_string(GalleryName name);
// Curves included for a line family: enough that omitted ones lie within the tolerance of an
// included one, capped by the point budget (see sample notes).
int gallery_curve_count(GalleryName name, const GalleryParams& params, std::size_t count);
PointSample gallery(GalleryName name, const GalleryParams& params, std::size_t count);

// Similarity z -> linear * z + offset (2x2 row-major).
struct AffineMap2 {
    double m[2][2] = {{1, 0}, {0, 1}};
    Point2 offset;

    Point2 operator()(Point2 p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + offset.x, m[1][0] * p.x + m[1][1] * p.y + offset.y};
    }
    double contraction() const;  // operator norm of the linear part
};

// The two orientation-reversing similarities with ratio sqrt(1/4 + eps^2) mapping the root cap
// of the constant-angle set onto its right (S1) and left (S2) child caps.
std::pair<AffineMap2, AffineMap2> ifs_maps_gamma(double eps);
// Open triangle (the root cap's interior, counter-clockwise) containing the edgeless
// constant-angle set; both maps send it into itself with disjoint images.
std::vector<Point2> ifs_open_set_gamma(double eps);

}  // namespace koch
