#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "koch/construction.hpp"
#include "koch/parametrization.hpp"

namespace koch {

// Sum of the Euclidean segment lengths of the stage-n polyline (n <= depth + 1).
double total_length(const CapTree& tree, int n);

struct MoranProblem {
    std::vector<double> ratios;  // each in (0, 1), nonempty
};

// Unique D with sum r_i^D = 1, by bisection to a residual below 1e-13.
double moran_solve(const MoranProblem& problem);
double moran_residual(const MoranProblem& problem, double d);

// Similarity dimension ln 2 / ln(2 cos r) of the constant-angle set with base angle r, r in [0, pi/3).
double dim_formula_ar(double r);

enum class DimensionMethod { moran, formula, box_counting, bounds };
const char* to_string(DimensionMethod m);

struct BoxCountRow {
    double scale = 0.0;
    std::size_t count = 0;
    double residual = 0.0;  // log N - fitted value
};

struct DimensionEstimate {
    double value = 0.0;
    DimensionMethod method = DimensionMethod::moran;
    std::optional<std::pair<double, double>> bounds;
    std::vector<BoxCountRow> fit;  // box counting only
    bool determined = true;
    std::string note;
};

nlohmann::json to_json(const DimensionEstimate& e);

// 2^-3, ..., 2^-9.
std::vector<double> default_box_scales();

// Occupied cells of origin-anchored grids per scale, slope of log N against log(1/s) by least
// squares. `resolution` is the largest gap between neighbouring sample points.
DimensionEstimate box_counting_dim(std::span<const Point2> points, std::span<const double> scales, double resolution);

// Bounds (f1(gamma1), f1(gamma2)) from the limit angles of the schedule's paths. gamma1 uses
// paths carrying measure at least 2^-n0.
DimensionEstimate dim_bounds_koch(const CapTree& tree, int n0 = 8);

struct MeasureResult {
    double value = 0.0;     // length of the stage-n image of the chosen cells
    bool diverging = false; // the stretch product diverges on some chosen cell
    bool determined = true;
};

// Sum over the stage-n subcells of B of 2^-n |base| times the stretch product of the cell's
// ancestors. Stage-uniform schedules use the closed form and need no tree beyond the root;
// tables sum the stage-n polyline (n <= depth + 1).
MeasureResult measure_of_image(const CapTree& tree, std::span<const DyadicIndex> cells, int n);

struct DensityRow {
    double rho = 0.0;
    double length = 0.0;
    double ratio = 0.0;  // length / (2 rho)
};

struct DensityProfile {
    Point2 center;
    std::vector<DensityRow> rows;
    bool growth = false;  // ratios strictly increase as rho decreases
};

// Length of the polyline inside each closed disc B_rho(center), rho decreasing. The longest
// polyline segment must be at most a quarter of the smallest radius.
DensityProfile density_profile(const Polyline& line, Point2 center, std::span<const double> radii);

struct RectifiabilityReport {
    std::string verdict;  // rectifiable | not_rectifiable | undetermined
    std::string criterion;
    nlohmann::json lambda_summary;
    DimensionEstimate dim_estimate;
};

RectifiabilityReport rectifiability_report(const CapTree& tree);
nlohmann::json to_json(const RectifiabilityReport& r);

struct CapPlacement {
    DyadicIndex index;
    double rotation = 0.0;  // applied about the origin, then translated
    Point2 translation;
    bool contained = false;

    Point2 apply(Point2 p) const { return rotate(p, rotation) + translation; }
};

struct CenteringResult {
    enum class Status { yes, no, undetermined } status = Status::undetermined;
    std::string reason;
    std::vector<CapPlacement> placements;  // stage-m caps of a1 moved into those of a2
};
const char* to_string(CenteringResult::Status s);

// Whether every stage-m cap of a1 can be rigidly placed, midpoint on midpoint, inside the
// matching cap of a2 (stage-uniform schedules; both trees built to depth >= m).
CenteringResult can_center(const CapTree& a1, const CapTree& a2, int m);

struct SpiralDiagnostics {
    std::vector<double> partial_sums;  // sum_{n <= k} theta_n, listed up to the reaching stage (capped)
    enum class Status { reached, never, beyond_limit } status = Status::never;
    int stage = -1;                     // first N with partial sum > target
    std::optional<double> total;        // convergent total when known
    std::optional<double> delta1;       // aeps only
};

SpiralDiagnostics spiral_diagnostics(const AngleSchedule& schedule, double target_turn);
double delta1_bound(double eps);  // (31 eps / 32) / (65 / 128)
nlohmann::json to_json(const SpiralDiagnostics& s);

}  // namespace koch
