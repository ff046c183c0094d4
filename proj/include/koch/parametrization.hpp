#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "koch/construction.hpp"

namespace koch {

// f_n: tent map of the stage-n polyline onto the stage-(n+1) polyline. On each segment the
// point at parameter t goes to a + 2t(apex - a) when t <= 1/2 and to apex + (2t - 1)(b - apex)
// otherwise; segment endpoints stay fixed.
class StageMap {
public:
    StageMap(const CapTree& tree, int n);
    int stage() const { return n_; }
    // Image of the point at parameter t in [0, 1] of segment i of stage n.
    Point2 at(std::uint64_t segment, double t) const;
    // Image of an arbitrary point of the stage-n polyline (within 1e-9); throws otherwise.
    Point2 operator()(Point2 p) const;

private:
    const CapTree* tree_;
    int n_;
};

StageMap f_stage(const CapTree& tree, int n);

// F_n = f_n o ... o f_0 applied to the base point with parameter x in [0, 1]; maps the dyadic
// interval D_{n+1,i} affinely onto segment A_{n+1,i}. Requires n <= depth.
Point2 F_n(const CapTree& tree, double x, int n);

// Index i with x in [i 2^-n, (i+1) 2^-n); x = 1 maps to the last cell.
DyadicIndex dyadic_of_point(double x, int n);

struct StretchProduct {
    DyadicIndex index;
    double value = 1.0;  // product of sec(theta) over the ancestors of index, index included
};

StretchProduct stretch_product(const CapTree& tree, const DyadicIndex& idx);
// Same product taken straight from the schedule (no depth limit).
double stretch_product(const AngleSchedule& schedule, const DyadicIndex& idx);
// prod_{j<n} sec(theta_j) for a stage-uniform schedule: the length of every stage-n segment
// relative to 2^-n |base|.
double schedule_product(const AngleSchedule& schedule, int n);

// Behaviour of sum_{k >= start} log sec(theta_k) for a stage-uniform schedule.
struct TailSums {
    bool converges = false;
    double log_product = 0.0;  // sum of log sec over the tail when convergent
    double sum_sq = 0.0;       // sum of theta^2 over the tail when convergent
};
TailSums analyze_tail(const AngleSchedule& schedule, int start);
// prod_{k >= 0} sec(theta_k), or +infinity when the squared angles are not summable.
double limit_stretch_product(const AngleSchedule& schedule);

enum class LambdaVerdict { bounded_by, exceeds_bound, diverging, undetermined };
const char* to_string(LambdaVerdict v);

struct CellClass {
    DyadicIndex index;
    double partial_product = 1.0;  // product through the cell's own stage
    double partial_sum_sq = 0.0;   // sum of theta^2 through the cell's own stage
    double limit_product = 0.0;    // limit along the cell when convergent, else +inf / NaN
    LambdaVerdict verdict = LambdaVerdict::undetermined;
};

struct LambdaClassification {
    int depth = 0;
    double bound = 0.0;
    std::vector<CellClass> cells;
    std::size_t count(LambdaVerdict v) const;
};

// Classifies every stage-`depth` cell against the bound m using the schedule's analytic tail.
LambdaClassification classify_lambda(const CapTree& tree, int depth, double m);
nlohmann::json to_json(const LambdaClassification& c);

struct LipschitzScan {
    double max_ratio = 0.0;
    double bound = 0.0;  // 4 m^2
    std::size_t pairs = 0;
};

// Max |F_N(x) - F_N(y)| / |x - y| over random pairs at the deepest stage N = depth, with x and
// y drawn from the cells classified bounded_by(m) (all cells when no classification is given).
LipschitzScan lipschitz_ratio_scan(const CapTree& tree, double m, std::size_t pairs, std::uint64_t seed,
                                   const LambdaClassification* cells = nullptr);

struct GraphDepth {
    enum class Status { found, never, undetermined } status = Status::undetermined;
    int n0 = 0;
};

// Smallest n0 with sum_{n >= n0} theta_n < atan(l)/5, or never when the angle sum diverges.
GraphDepth lipschitz_graph_depth(const AngleSchedule& schedule, double l);

// Uniform draw in [0, 1) from 53 random bits (reproducible across standard libraries).
double unit_uniform(std::uint64_t bits);

}  // namespace koch
