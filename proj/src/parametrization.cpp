#include "koch/parametrization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/zeta.hpp>

#include "koch/error.hpp"
#include "koch/numeric.hpp"

namespace koch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point2 lerp(Point2 a, Point2 b, double t) { return a + t * (b - a); }

// Point at parameter x in [0,1] on the stage-s polyline, split into 2^s equal parameter cells.
Point2 polyline_at(const std::vector<Point2>& v, int s, double x) {
    const double cells = std::ldexp(1.0, s);
    const double scaled = x * cells;
    auto seg = static_cast<std::uint64_t>(std::min(std::floor(scaled), cells - 1.0));
    return lerp(v[seg], v[seg + 1], scaled - static_cast<double>(seg));
}

}  // namespace

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

StageMap::StageMap(const CapTree& tree, int n) : tree_(&tree), n_(n) {
    if (n < 0 || n > tree.depth())
        throw Error(ErrorKind::invalid_argument, "stage map needs 0 <= n <= depth");
}

Point2 StageMap::at(std::uint64_t segment, double t) const {
    const auto& v = tree_->stage_vertices(n_ + 1);
    if (segment >= (std::uint64_t{1} << n_) || !(t >= 0.0 && t <= 1.0))
        throw Error(ErrorKind::invalid_argument, "stage map position out of range");
    const Point2 a = v[2 * segment], apex = v[2 * segment + 1], b = v[2 * segment + 2];
    return t <= 0.5 ? lerp(a, apex, 2.0 * t) : lerp(apex, b, 2.0 * t - 1.0);
}

Point2 StageMap::operator()(Point2 p) const {
    require_finite(p, "stage map argument");
    const auto& v = tree_->stage_vertices(n_);
    double best = kInf;
    std::uint64_t best_seg = 0;
    double best_t = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const Point2 d = v[i + 1] - v[i];
        const double t = std::clamp(dot(p - v[i], d) / dot(d, d), 0.0, 1.0);
        const double e = dist(p, lerp(v[i], v[i + 1], t));
        if (e < best) {
            best = e;
            best_seg = i;
            best_t = t;
        }
    }
    if (best > 1e-9) throw Error(ErrorKind::invalid_argument, "point does not lie on the stage polyline");
    return at(best_seg, best_t);
}

StageMap f_stage(const CapTree& tree, int n) { return StageMap(tree, n); }

Point2 F_n(const CapTree& tree, double x, int n) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::invalid_argument, "F_n argument outside [0, 1]");
    if (n < 0 || n > tree.depth()) throw Error(ErrorKind::invalid_argument, "F_n stage outside the built tree");
    // Each f_j is affine on the cells of stage j+1, so the composite is the affine interpolation
    // of the stage-(n+1) polyline over the dyadic cells of order n+1.
    return polyline_at(tree.stage_vertices(n + 1), n + 1, x);
}

DyadicIndex dyadic_of_point(double x, int n) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::invalid_argument, "dyadic point outside [0, 1]");
    if (n < 0 || n > 62) throw Error(ErrorKind::invalid_argument, "dyadic order out of range");
    const double cells = std::ldexp(1.0, n);
    const auto i = static_cast<std::uint64_t>(std::min(std::floor(x * cells), cells - 1.0));
    return {n, i};
}

StretchProduct stretch_product(const CapTree& tree, const DyadicIndex& idx) {
    validate_index(idx);
    if (idx.n > tree.depth()) throw Error(ErrorKind::invalid_argument, "stretch product index beyond tree depth");
    CompensatedSum s;
    for (int j = 0; j <= idx.n; ++j) s.add(log_sec(tree.theta(idx.ancestor(j))));
    return {idx, std::exp(s.value())};
}

double stretch_product(const AngleSchedule& schedule, const DyadicIndex& idx) {
    validate_index(idx);
    CompensatedSum s;
    for (int j = 0; j <= idx.n; ++j) s.add(log_sec(schedule.theta(idx.ancestor(j))));
    return std::exp(s.value());
}

double schedule_product(const AngleSchedule& schedule, int n) {
    if (!schedule.stage_uniform()) throw Error(ErrorKind::mismatch, "schedule product needs a stage-uniform schedule");
    CompensatedSum s;
    for (int j = 0; j < n; ++j) s.add(log_sec(schedule.stage_theta(j)));
    return std::exp(s.value());
}

TailSums analyze_tail(const AngleSchedule& schedule, int start) {
    TailSums t;
    switch (schedule.kind()) {
        case ScheduleKind::constant:
            t.converges = schedule.param("theta") == 0.0;
            return t;
        case ScheduleKind::aeps:
            return t;  // theta_n^2 ~ 1/n: divergent
        case ScheduleKind::geometric: {
            CompensatedSum lp, sq;
            for (int k = start;; ++k) {
                const double th = schedule.stage_theta(k);
                lp.add(log_sec(th));
                sq.add(th * th);
                if (th * th < 1e-34 || k - start > 100000) break;
            }
            t.converges = true;
            t.log_product = lp.value();
            t.sum_sq = sq.value();
            return t;
        }
        case ScheduleKind::power: {
            const double p = schedule.param("p"), th0 = schedule.param("theta0");
            if (p <= 0.5) return t;
            CompensatedSum lp, sq;
            constexpr int kTerms = 2000000;
            int k = start;
            for (; k < start + kTerms; ++k) {
                const double th = schedule.stage_theta(k);
                lp.add(log_sec(th));
                sq.add(th * th);
                if (th * th < 1e-34) break;
            }
            // Remainder sum_{j > k} theta_j^2 by the midpoint integral of th0^2 (x+1)^{-2p};
            // log sec(theta) = theta^2/2 + O(theta^4) at these tiny angles.
            const double rem = th0 * th0 * std::pow(k + 1.5, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
            sq.add(rem);
            lp.add(0.5 * rem);
            t.converges = true;
            t.log_product = lp.value();
            t.sum_sq = sq.value();
            return t;
        }
        case ScheduleKind::table: break;
    }
    throw Error(ErrorKind::mismatch, "tail analysis needs a stage-uniform schedule");
}

double limit_stretch_product(const AngleSchedule& schedule) {
    const TailSums t = analyze_tail(schedule, 0);
    return t.converges ? std::exp(t.log_product) : kInf;
}

const char* to_string(LambdaVerdict v) {
    switch (v) {
        case LambdaVerdict::bounded_by: return "bounded_by";
        case LambdaVerdict::exceeds_bound: return "exceeds_bound";
        case LambdaVerdict::diverging: return "diverging";
        case LambdaVerdict::undetermined: return "undetermined";
    }
    return "unknown";
}

std::size_t LambdaClassification::count(LambdaVerdict v) const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [v](const CellClass& c) { return c.verdict == v; }));
}

LambdaClassification classify_lambda(const CapTree& tree, int depth, double m) {
    if (depth < 0 || depth > tree.depth()) throw Error(ErrorKind::invalid_argument, "classification depth beyond tree depth");
    const AngleSchedule& schedule = tree.schedule();
    LambdaClassification out;
    out.depth = depth;
    out.bound = m;

    // Running log-products and squared sums stage by stage.
    std::vector<double> log_prod{log_sec(tree.theta({0, 0}))}, sum_sq{tree.theta({0, 0}) * tree.theta({0, 0})};
    for (int n = 1; n <= depth; ++n) {
        const auto& th = tree.stage_thetas(n);
        std::vector<double> lp(th.size()), sq(th.size());
        for (std::size_t i = 0; i < th.size(); ++i) {
            lp[i] = log_prod[i / 2] + log_sec(th[i]);
            sq[i] = sum_sq[i / 2] + th[i] * th[i];
        }
        log_prod.swap(lp);
        sum_sq.swap(sq);
    }

    std::optional<TailSums> uniform_tail;
    if (schedule.stage_uniform()) uniform_tail = analyze_tail(schedule, depth + 1);
    std::vector<std::pair<const TableTail*, TailSums>> tail_cache;

    out.cells.resize(log_prod.size());
    for (std::size_t i = 0; i < log_prod.size(); ++i) {
        CellClass& c = out.cells[i];
        c.index = {depth, i};
        c.partial_product = std::exp(log_prod[i]);
        c.partial_sum_sq = sum_sq[i];
        std::optional<TailSums> tail = uniform_tail;
        if (!tail) {
            if (const TableTail* t = schedule.tail_for(c.index)) {
                auto it = std::find_if(tail_cache.begin(), tail_cache.end(), [t](const auto& e) { return e.first == t; });
                if (it == tail_cache.end()) {
                    tail_cache.emplace_back(t, analyze_tail(*t->schedule, depth + 1 - t->root.n + t->offset));
                    it = std::prev(tail_cache.end());
                }
                tail = it->second;
            }
        }
        if (!tail) {
            c.verdict = LambdaVerdict::undetermined;
            c.limit_product = std::numeric_limits<double>::quiet_NaN();
        } else if (!tail->converges) {
            c.verdict = LambdaVerdict::diverging;
            c.limit_product = kInf;
        } else {
            c.limit_product = std::exp(log_prod[i] + tail->log_product);
            c.verdict = c.limit_product <= m * (1.0 + 1e-12) ? LambdaVerdict::bounded_by : LambdaVerdict::exceeds_bound;
        }
    }
    return out;
}

nlohmann::json to_json(const LambdaClassification& c) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : c.cells) {
        nlohmann::json v = to_string(cell.verdict);
        if (cell.verdict == LambdaVerdict::bounded_by) v = {{"bounded_by", c.bound}};
        cells.push_back({{"index", {{"n", cell.index.n}, {"i", cell.index.i}}},
                         {"partial_product", cell.partial_product},
                         {"partial_sum_sq", cell.partial_sum_sq},
                         {"verdict", v}});
    }
    return {{"depth", c.depth}, {"bound", c.bound}, {"cells", cells}};
}

LipschitzScan lipschitz_ratio_scan(const CapTree& tree, double m, std::size_t pairs, std::uint64_t seed,
                                   const LambdaClassification* cells) {
    const int N = tree.depth();
    std::vector<DyadicIndex> allowed;
    int cell_depth = 0;
    if (cells) {
        cell_depth = cells->depth;
        for (const auto& c : cells->cells)
            if (c.verdict == LambdaVerdict::bounded_by) allowed.push_back(c.index);
    } else {
        allowed.push_back({0, 0});
    }
    LipschitzScan out;
    out.bound = 4.0 * m * m;
    if (allowed.empty()) return out;

    std::mt19937_64 rng(seed);
    const double cell_width = std::ldexp(1.0, -cell_depth);
    const double deep_width = std::ldexp(1.0, -(N + 1));
    auto draw_in = [&](const DyadicIndex& c) { return (static_cast<double>(c.i) + unit_uniform(rng())) * cell_width; };
    for (std::size_t k = 0; k < pairs; ++k) {
        const double x = draw_in(allowed[rng() % allowed.size()]);
        double y;
        if (k % 2 == 0) {
            y = draw_in(allowed[rng() % allowed.size()]);
        } else {
            // Pair inside the same deepest cell: exposes the local stretch.
            const double base = std::floor(x / deep_width) * deep_width;
            y = std::min(1.0, base + unit_uniform(rng()) * deep_width);
        }
        if (x == y) continue;
        const double r = dist(F_n(tree, x, N), F_n(tree, y, N)) / std::abs(x - y);
        out.max_ratio = std::max(out.max_ratio, r);
        ++out.pairs;
    }
    return out;
}

GraphDepth lipschitz_graph_depth(const AngleSchedule& schedule, double l) {
    if (!(l > 0.0)) throw Error(ErrorKind::invalid_argument, "target Lipschitz constant must be > 0");
    const double target = std::atan(l) / 5.0;
    GraphDepth out;
    auto found = [&](int n0) {
        out.status = GraphDepth::Status::found;
        out.n0 = n0;
        return out;
    };
    switch (schedule.kind()) {
        case ScheduleKind::constant:
            if (schedule.param("theta") == 0.0) return found(0);
            out.status = GraphDepth::Status::never;
            return out;
        case ScheduleKind::aeps:
            out.status = GraphDepth::Status::never;
            return out;
        case ScheduleKind::geometric: {
            const double th0 = schedule.param("theta0"), r = schedule.param("ratio");
            for (int n0 = 0; n0 < 100000; ++n0)
                if (th0 * std::pow(r, n0) / (1.0 - r) < target) return found(n0);
            return out;
        }
        case ScheduleKind::power: {
            const double th0 = schedule.param("theta0"), p = schedule.param("p");
            if (p <= 1.0) {
                out.status = GraphDepth::Status::never;
                return out;
            }
            // tail(n0) = th0 * zeta(p) - sum_{n < n0} theta_n
            double tail = th0 * boost::math::zeta(p);
            for (int n0 = 0; n0 < 10000000; ++n0) {
                if (tail < target) return found(n0);
                tail -= schedule.stage_theta(n0);
            }
            return out;
        }
        case ScheduleKind::table: break;
    }
    return out;  // table schedules: undetermined
}

}  // namespace koch
