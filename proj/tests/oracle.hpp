#pragma once

// Independent reference computations used by the tests: brute-force angle scans for the line
// fitters and a Hausdorff distance for point sets.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "koch/geometry.hpp"

namespace oracle {

using koch::Point2;

inline double width_through(std::span<const Point2> pts, Point2 c, double phi) {
    const Point2 n{-std::sin(phi), std::cos(phi)};
    double w = 0.0;
    for (const Point2& p : pts) w = std::max(w, std::abs(koch::dot(n, p - c)));
    return w;
}

inline double width_free(std::span<const Point2> pts, double phi) {
    const Point2 n{-std::sin(phi), std::cos(phi)};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Point2& p : pts) {
        const double s = koch::dot(n, p);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return 0.5 * (hi - lo);
}

// Minimum of width(phi) over [0, pi): a uniform grid of `grid` angles, then a nested zoom around
// every grid point whose value is within 2 L dphi of the grid minimum (L bounds |width'|), so
// minima sitting at kinks between grid nodes are resolved as well.
template <class Width>
double grid_minimum(Width width, double lipschitz, int grid = 100000) {
    const double step = M_PI / grid;
    std::vector<double> w(static_cast<std::size_t>(grid));
    for (int k = 0; k < grid; ++k) w[static_cast<std::size_t>(k)] = width(k * step);
    const double coarse = *std::min_element(w.begin(), w.end());
    double best = coarse;
    for (int k = 0; k < grid; ++k) {
        if (w[static_cast<std::size_t>(k)] > coarse + 2.0 * lipschitz * step) continue;
        double centre = k * step, half = step;
        for (int level = 0; level < 6; ++level) {
            constexpr int kSub = 64;
            double best_phi = centre, best_w = width(centre);
            for (int j = -kSub; j <= kSub; ++j) {
                const double phi = centre + half * j / kSub;
                const double v = width(phi);
                if (v < best_w) {
                    best_w = v;
                    best_phi = phi;
                }
            }
            best = std::min(best, best_w);
            centre = best_phi;
            half *= 2.0 / kSub;
        }
    }
    return best;
}

inline double fit_through(std::span<const Point2> pts, Point2 c) {
    double l = 0.0;
    for (const Point2& p : pts) l = std::max(l, koch::dist(p, c));
    return grid_minimum([&](double phi) { return width_through(pts, c, phi); }, l);
}

inline double fit_free(std::span<const Point2> pts) {
    Point2 g{0, 0};
    for (const Point2& p : pts) g = g + p;
    g = (1.0 / static_cast<double>(pts.size())) * g;
    double l = 0.0;
    for (const Point2& p : pts) l = std::max(l, koch::dist(p, g));
    return grid_minimum([&](double phi) { return width_free(pts, phi); }, l);
}

inline double hausdorff(std::span<const Point2> a, std::span<const Point2> b) {
    auto directed = [](std::span<const Point2> x, std::span<const Point2> y) {
        double worst = 0.0;
        for (const Point2& p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (const Point2& q : y) best = std::min(best, koch::dist(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace oracle
