#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace koch {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
inline Point2 rotate(Point2 p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

bool is_finite(Point2 p);
// Throws Error(invalid_argument) when a coordinate is NaN or infinite.
void require_finite(Point2 p, const char* what);

struct Segment {
    Point2 a;
    Point2 b;
    double length() const { return dist(a, b); }
    Point2 mid() const { return midpoint(a, b); }
};

// Throws when the endpoints coincide or are not finite.
void validate_segment(const Segment& s);

// Infinite line stored canonically as a point plus a direction angle in [0, pi).
struct AffineLine {
    Point2 point;
    double angle = 0.0;

    static AffineLine through(Point2 p, double angle);
    static AffineLine through_points(Point2 p, Point2 q);
    Point2 direction() const { return {std::cos(angle), std::sin(angle)}; }
    Point2 normal() const { return {-std::sin(angle), std::cos(angle)}; }
    // Signed offset of the line from the origin along normal().
    double offset() const { return dot(normal(), point); }
};

double canonical_angle(double angle);

// Orthogonal frame sending a segment's midpoint to the origin and the segment onto the x-axis.
struct Frame {
    Point2 origin;
    double rotation_angle = 0.0;

    Point2 apply(Point2 p) const { return rotate(p - origin, -rotation_angle); }
    Point2 inverse(Point2 q) const { return origin + rotate(q, rotation_angle); }
};

double distance_to_line(Point2 p, const AffineLine& line);
Frame frame_of_segment(const Segment& s);
// Acute angle in [0, pi/2] between the infinite extensions of two segments.
double set_angle(const Segment& s1, const Segment& s2);
// Double cone of slope tan(half_angle) about the axis direction, with vertex at apex.
bool cone_contains(Point2 apex, const AffineLine& axis, double half_angle, Point2 p);

struct LineFit {
    AffineLine line;
    double width = 0.0;  // max distance of the points to the line
};

// Line through `center` minimising the maximal point distance (exact).
LineFit minmax_fit_through(std::span<const Point2> points, Point2 center);
// Minimum-width strip; width is half the strip width (exact).
LineFit minmax_fit_free(std::span<const Point2> points);

// Max distance of the points to a given line (0 for an empty set).
double max_distance_to_line(std::span<const Point2> points, const AffineLine& line);

// Counter-clockwise convex hull without collinear points (Andrew's monotone chain).
std::vector<Point2> convex_hull(std::vector<Point2> points);

// Inclusion in the closed triangle, allowing `slack` distance outside each edge.
bool point_in_triangle(Point2 p, Point2 a, Point2 b, Point2 c, double slack);

// Signed area of a simple polygon (positive when counter-clockwise).
double polygon_area(std::span<const Point2> poly);
// Intersection of a polygon with a convex counter-clockwise clip polygon (Sutherland-Hodgman).
std::vector<Point2> clip_convex(std::span<const Point2> subject, std::span<const Point2> convex_clip);

// Smallest enclosing circle (Welzl, deterministic shuffle).
struct Circle {
    Point2 center;
    double radius = 0.0;
};
Circle min_enclosing_circle(std::span<const Point2> points);

}  // namespace koch
