#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "koch/geometry.hpp"

namespace koch {

// The eight approximation properties, weakest (i) to strongest uniform variant (viii).
enum class PropertyId { i, ii, iii, iv, v, vi, vii, viii };
PropertyId parse_property(const std::string& text);
const char* to_string(PropertyId p);

struct FlatnessEntry {
    double rho = 0.0;
    std::size_t count = 0;     // sample points in the closed ball
    bool empty = true;         // no point other than the center: vacuous pass
    double beta_through = 0.0; // best line through the center
    double beta_free = 0.0;    // best unconstrained line
    AffineLine best_line;      // the line of the selected mode
};

struct FlatnessProfile {
    Point2 center;
    std::vector<FlatnessEntry> entries;  // decreasing rho
};

// Per radius: min-max fit width of the points in the closed ball, divided by rho.
FlatnessProfile flatness_profile(std::span<const Point2> points, Point2 center, std::span<const double> radii,
                                 bool constrain_through_center);

enum class LineMode { through_point, free };
enum class LinePolicy { finest, coarsest };

struct PropertyOptions {
    std::size_t neighbours = 8;   // sample points x near y tested by (ii), (iv), (v), (vii), (viii)
    LineMode line_mode = LineMode::through_point;  // lines of (ii)/(iv)
    LinePolicy line_policy = LinePolicy::finest;   // reused line of (vi)-(viii)
    bool shared_line = false;     // (vii)/(viii): reuse L_y at every neighbour x instead of L_x
    std::vector<double> delta_ladder;  // (iii)/(iv); defaults to {delta, delta/2, delta/4}
    std::optional<double> rho0;        // (v)/(viii); defaults to the largest radius
    double resolution = 0.0;           // sample resolution for the scale guard
};

struct Witness {
    Point2 center;  // the point whose ball fails
    double rho = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    AffineLine line;
};

struct CenterVerdict {
    Point2 center;
    bool holds = true;
    std::optional<Witness> witness;
    std::optional<AffineLine> reused_line;  // strong variants: L_y
    std::size_t tested_points = 0;
    std::size_t tested_balls = 0;
};

struct PropertyReport {
    PropertyId property = PropertyId::i;
    double delta = 0.0;
    std::vector<double> delta_ladder;
    std::vector<double> radii;
    std::string line_mode;
    std::string line_policy;
    std::optional<double> rho0;
    std::optional<double> enclosing_radius;
    bool contained = true;
    std::vector<CenterVerdict> centers;
    std::vector<FlatnessProfile> profiles;  // at each center y, for plotting

    bool holds() const;
    std::size_t failures() const;
    std::size_t tested_balls() const;
};

// Throws Error(resolution) when the smallest radius is below 4x the declared sample resolution.
PropertyReport check_property(std::span<const Point2> points, PropertyId property, double delta,
                              std::span<const Point2> centers, std::span<const double> radii,
                              const PropertyOptions& options = {});

// beta of the witness ball recomputed from scratch against the witness line.
double recheck_witness(std::span<const Point2> points, const Witness& w);

nlohmann::json to_json(const PropertyReport& r);
// center_x,center_y,rho,beta_through,beta_free,verdict rows (header included).
std::string to_csv(const PropertyReport& r);

struct LengthRow {
    double rho = 0.0;
    double length = 0.0;
    double ratio = 0.0;  // length / (2 rho)
};

struct LengthGrowth {
    Point2 center;
    std::vector<LengthRow> rows;
    bool diverging = false;  // ratio increases at every step down the ladder
};

std::vector<LengthGrowth> local_finiteness_scan(std::span<const Point2> points, std::span<const double> weights,
                                                std::span<const Point2> centers, std::span<const double> radii);

struct DeltaLadderReport {
    std::vector<PropertyReport> reports;  // one per delta, same order as the ladder
    std::optional<double> smallest_holding;
};

// (i) or (ii) at every delta of a decreasing ladder; scales may depend on delta.
DeltaLadderReport delta_ladder_check(std::span<const Point2> points, PropertyId base, std::span<const double> deltas,
                                     std::span<const Point2> centers,
                                     const std::function<std::vector<double>(double)>& scales_for_delta,
                                     const PropertyOptions& options = {});

}  // namespace koch
