#include "koch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/special_functions/zeta.hpp>

#include "koch/error.hpp"
#include "koch/numeric.hpp"

namespace koch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Limit of theta_n along every path of a stage-uniform schedule.
double limit_angle(const AngleSchedule& s) {
    return s.kind() == ScheduleKind::constant ? s.param("theta") : 0.0;
}

double cell_measure(const DyadicIndex& c) { return std::ldexp(1.0, -c.n); }

bool overlaps(const DyadicIndex& a, const DyadicIndex& b) { return a.is_descendant_of(b) || b.is_descendant_of(a); }

}  // namespace

double total_length(const CapTree& tree, int n) {
    const auto& v = tree.stage_vertices(n);
    std::vector<double> lengths(v.size() - 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) lengths[i] = dist(v[i], v[i + 1]);
    return pairwise_sum(lengths);
}

double moran_residual(const MoranProblem& problem, double d) {
    std::vector<double> terms;
    terms.reserve(problem.ratios.size());
    for (double r : problem.ratios) terms.push_back(std::pow(r, d));
    return pairwise_sum(terms) - 1.0;
}

double moran_solve(const MoranProblem& problem) {
    if (problem.ratios.empty()) throw Error(ErrorKind::invalid_argument, "Moran problem needs at least one ratio");
    for (double r : problem.ratios)
        if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::invalid_argument, "Moran ratios must lie in (0, 1)");
    if (problem.ratios.size() == 1) return 0.0;

    double lo = 0.0, hi = 1.0;
    while (moran_residual(problem, hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    double best = hi, best_res = std::abs(moran_residual(problem, hi));
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double res = moran_residual(problem, mid);
        if (std::abs(res) < best_res) {
            best = mid;
            best_res = std::abs(res);
        }
        if (best_res < 1e-13 || mid == lo || mid == hi) break;
        (res > 0.0 ? lo : hi) = mid;
    }
    return best;
}

double dim_formula_ar(double r) {
    if (!(r >= 0.0 && r < M_PI / 3.0)) throw Error(ErrorKind::invalid_argument, "dimension formula needs r in [0, pi/3)");
    return std::log(2.0) / std::log(2.0 * std::cos(r));
}

const char* to_string(DimensionMethod m) {
    switch (m) {
        case DimensionMethod::moran: return "moran";
        case DimensionMethod::formula: return "formula";
        case DimensionMethod::box_counting: return "box_counting";
        case DimensionMethod::bounds: return "bounds";
    }
    return "unknown";
}

nlohmann::json to_json(const DimensionEstimate& e) {
    nlohmann::json j = {{"value", e.value}, {"method", to_string(e.method)}, {"determined", e.determined}};
    if (e.bounds) j["bounds"] = {{"low", e.bounds->first}, {"high", e.bounds->second}};
    if (!e.fit.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : e.fit) rows.push_back({{"scale", r.scale}, {"count", r.count}, {"residual", r.residual}});
        j["fit"] = rows;
    }
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

std::vector<double> default_box_scales() {
    std::vector<double> s;
    for (int k = 3; k <= 9; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

DimensionEstimate box_counting_dim(std::span<const Point2> points, std::span<const double> scales, double resolution) {
    if (points.size() < 1000) throw Error(ErrorKind::invalid_argument, "box counting needs at least 1000 points");
    if (scales.size() < 3) throw Error(ErrorKind::invalid_argument, "box counting needs at least 3 scales");
    for (std::size_t k = 0; k < scales.size(); ++k) {
        if (!(scales[k] > 0.0) || !std::isfinite(scales[k]))
            throw Error(ErrorKind::invalid_argument, "box scales must be positive");
        if (k > 0 && !(scales[k] < scales[k - 1]))
            throw Error(ErrorKind::invalid_argument, "box scales must be strictly decreasing");
    }
    for (const Point2& p : points) require_finite(p, "box counting point");
    if (!(resolution >= 0.0) || 4.0 * resolution > scales.back())
        throw Error(ErrorKind::resolution, "sample resolution is not 4x finer than the smallest box scale");

    DimensionEstimate est;
    est.method = DimensionMethod::box_counting;
    std::vector<double> xs, ys;
    std::vector<std::pair<std::int64_t, std::int64_t>> cells(points.size());
    // Points within kGridSnap box widths below a grid line count as on it: rounding in the
    // construction leaves exact-grid points (a base on y = 0, say) at -1e-17, which would
    // otherwise open a spurious row of boxes.
    constexpr double kGridSnap = 1e-9;
    for (double s : scales) {
        for (std::size_t i = 0; i < points.size(); ++i)
            cells[i] = {static_cast<std::int64_t>(std::floor(points[i].x / s + kGridSnap)),
                        static_cast<std::int64_t>(std::floor(points[i].y / s + kGridSnap))};
        std::sort(cells.begin(), cells.end());
        const auto count = static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
        est.fit.push_back({s, count, 0.0});
        xs.push_back(std::log(1.0 / s));
        ys.push_back(std::log(static_cast<double>(count)));
    }
    const LinearFit fit = least_squares(xs, ys);
    est.value = fit.slope;
    for (std::size_t k = 0; k < est.fit.size(); ++k) est.fit[k].residual = fit.residuals[k];
    return est;
}

DimensionEstimate dim_bounds_koch(const CapTree& tree, int n0) {
    if (n0 < 0 || n0 > 62) throw Error(ErrorKind::invalid_argument, "measure threshold exponent out of range");
    const AngleSchedule& s = tree.schedule();
    DimensionEstimate est;
    est.method = DimensionMethod::bounds;
    if (s.stage_uniform()) {
        const double g = limit_angle(s);
        const double f = dim_formula_ar(g);
        est.value = f;
        est.bounds = std::make_pair(f, f);
        return est;
    }
    // Tables: limit angles are known exactly on the declared tails, each carrying the base measure
    // 2^-root.n of its root cell.
    std::vector<std::pair<double, double>> tails;  // (limit angle, measure)
    double covered = 0.0;
    for (const auto& t : s.table_data().tails) {
        tails.emplace_back(limit_angle(*t.schedule), cell_measure(t.root));
        covered += cell_measure(t.root);
    }
    std::sort(tails.begin(), tails.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double gamma2 = tails.empty() ? 0.0 : tails.front().first;
    double gamma1 = 0.0, mass = 0.0;
    const double threshold = std::ldexp(1.0, -n0);
    for (const auto& [angle, measure] : tails) {
        mass += measure;
        if (mass >= threshold) {
            gamma1 = angle;
            break;
        }
    }
    if (covered < 1.0 - 1e-15) {
        est.determined = false;
        est.note = "paths outside the declared tails have unknown limit angles";
        gamma2 = max_base_angle();
    }
    est.bounds = std::make_pair(dim_formula_ar(gamma1), dim_formula_ar(gamma2));
    est.value = est.bounds->first;
    return est;
}

MeasureResult measure_of_image(const CapTree& tree, std::span<const DyadicIndex> cells, int n) {
    if (n < 0) throw Error(ErrorKind::invalid_argument, "measure stage out of range");
    std::vector<DyadicIndex> chosen;
    for (const auto& c : cells) {
        validate_index(c);
        if (c.n > n) throw Error(ErrorKind::invalid_argument, "measure cells must lie at stage <= n");
    }
    // Drop cells already covered by another chosen cell so that the union is summed once.
    for (std::size_t a = 0; a < cells.size(); ++a) {
        bool covered = false;
        for (std::size_t b = 0; b < cells.size() && !covered; ++b)
            if (a != b && cells[a].is_descendant_of(cells[b]) && (cells[a] != cells[b] || b < a)) covered = true;
        if (!covered) chosen.push_back(cells[a]);
    }

    const AngleSchedule& s = tree.schedule();
    const double base = tree.base().length();
    MeasureResult out;
    if (s.stage_uniform()) {
        std::vector<double> measures;
        for (const auto& c : chosen) measures.push_back(cell_measure(c));
        out.value = pairwise_sum(measures) * base * schedule_product(s, n);
        out.diverging = !chosen.empty() && !analyze_tail(s, n).converges;
        return out;
    }

    if (n > 62 || n > tree.depth() + 1) throw Error(ErrorKind::invalid_argument, "table measure needs a tree built to stage n - 1");
    const auto& v = tree.stage_vertices(n);
    std::vector<double> lengths;
    for (const auto& c : chosen) {
        const std::uint64_t first = c.i << (n - c.n), last = (c.i + 1) << (n - c.n);
        for (std::uint64_t j = first; j < last; ++j) lengths.push_back(dist(v[j], v[j + 1]));
    }
    out.value = pairwise_sum(lengths);

    double measure = 0.0, covered = 0.0;
    for (const auto& c : chosen) {
        measure += cell_measure(c);
        for (const auto& t : s.table_data().tails) {
            if (!overlaps(c, t.root)) continue;
            const DyadicIndex deeper = c.n >= t.root.n ? c : t.root;
            covered += cell_measure(deeper);
            if (!analyze_tail(*t.schedule, std::max(n, t.root.n) - t.root.n + t.offset).converges) out.diverging = true;
        }
    }
    out.determined = covered >= measure - 1e-15;
    return out;
}

DensityProfile density_profile(const Polyline& line, Point2 center, std::span<const double> radii) {
    require_finite(center, "density center");
    if (radii.empty()) throw Error(ErrorKind::invalid_argument, "density profile needs at least one radius");
    for (std::size_t k = 0; k < radii.size(); ++k)
        if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1])))
            throw Error(ErrorKind::invalid_argument, "density radii must be positive and strictly decreasing");
    const auto& v = line.vertices;
    if (v.size() < 2) throw Error(ErrorKind::invalid_argument, "density profile needs a polyline with a segment");
    double longest = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) longest = std::max(longest, dist(v[i], v[i + 1]));
    if (4.0 * longest > radii.back())
        throw Error(ErrorKind::resolution, "polyline segments are not 4x finer than the smallest radius");

    DensityProfile out;
    out.center = center;
    for (double rho : radii) {
        CompensatedSum len;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const Point2 d = v[i + 1] - v[i], w = v[i] - center;
            const double a = dot(d, d), b = 2.0 * dot(d, w), c = dot(w, w) - rho * rho;
            const double disc = b * b - 4.0 * a * c;
            if (disc <= 0.0) continue;
            const double sq = std::sqrt(disc);
            const double t0 = std::max(0.0, (-b - sq) / (2.0 * a)), t1 = std::min(1.0, (-b + sq) / (2.0 * a));
            if (t1 > t0) len.add((t1 - t0) * std::sqrt(a));
        }
        out.rows.push_back({rho, len.value(), len.value() / (2.0 * rho)});
    }
    out.growth = out.rows.size() > 1;
    for (std::size_t k = 1; k < out.rows.size(); ++k)
        if (!(out.rows[k].ratio > out.rows[k - 1].ratio)) out.growth = false;
    return out;
}

RectifiabilityReport rectifiability_report(const CapTree& tree) {
    const AngleSchedule& s = tree.schedule();
    RectifiabilityReport r;
    const LambdaClassification cls = classify_lambda(tree, std::min(tree.depth(), 10), kInf);
    double max_limit = 0.0;
    for (const auto& c : cls.cells)
        if (c.verdict == LambdaVerdict::bounded_by) max_limit = std::max(max_limit, c.limit_product);
    r.lambda_summary = {{"depth", cls.depth},
                        {"cells", cls.cells.size()},
                        {"convergent", cls.count(LambdaVerdict::bounded_by)},
                        {"diverging", cls.count(LambdaVerdict::diverging)},
                        {"undetermined", cls.count(LambdaVerdict::undetermined)},
                        {"max_limit_product", max_limit}};
    r.dim_estimate = dim_bounds_koch(tree);

    if (s.kind() == ScheduleKind::constant && s.param("theta") > 0.0) {
        r.dim_estimate = DimensionEstimate{};
        r.dim_estimate.method = DimensionMethod::formula;
        r.dim_estimate.value = dim_formula_ar(s.param("theta"));
        r.verdict = "not_rectifiable";
        r.criterion = "dim = f1(theta) > 1 for a constant angle theta > 0";
        return r;
    }
    if (s.stage_uniform()) {
        if (analyze_tail(s, 0).converges) {
            r.verdict = "rectifiable";
            r.criterion = "sum of theta^2 < inf, so no path has an infinite stretch product and the "
                          "parametrization is bi-Lipschitz on pieces";
        } else {
            r.verdict = "not_rectifiable";
            r.criterion = "stretch product is infinite on every path (sum of theta^2 diverges)";
        }
        return r;
    }
    if (r.dim_estimate.bounds && r.dim_estimate.bounds->first > 1.0) {
        r.verdict = "not_rectifiable";
        r.criterion = "dimension lower bound f1(gamma1) > 1";
    } else if (cls.count(LambdaVerdict::undetermined) > 0) {
        r.verdict = "undetermined";
        r.criterion = "table cells without a declared tail leave the stretch product undecided";
    } else if (cls.count(LambdaVerdict::diverging) > 0) {
        r.verdict = "not_rectifiable";
        r.criterion = "stretch product is infinite on a cell set of positive measure";
    } else {
        r.verdict = "rectifiable";
        r.criterion = "stretch product is bounded on every cell (all tails have sum of theta^2 < inf)";
    }
    return r;
}

nlohmann::json to_json(const RectifiabilityReport& r) {
    return {{"verdict", r.verdict},
            {"criterion", r.criterion},
            {"lambda_summary", r.lambda_summary},
            {"dim_estimate", to_json(r.dim_estimate)}};
}

const char* to_string(CenteringResult::Status s) {
    switch (s) {
        case CenteringResult::Status::yes: return "true";
        case CenteringResult::Status::no: return "false";
        case CenteringResult::Status::undetermined: return "undetermined";
    }
    return "unknown";
}

CenteringResult can_center(const CapTree& a1, const CapTree& a2, int m) {
    CenteringResult out;
    if (!a1.schedule().stage_uniform() || !a2.schedule().stage_uniform()) {
        out.reason = "centering is only decided for stage-uniform schedules";
        return out;
    }
    if (m < 0 || m > a1.depth() || m > a2.depth())
        throw Error(ErrorKind::invalid_argument, "centering depth exceeds a tree's depth");
    const double l1 = a1.base().length(), l2 = a2.base().length();
    if (l1 > l2 * (1.0 + 1e-12)) {
        out.status = CenteringResult::Status::no;
        out.reason = "root base of the first set is longer";
        return out;
    }
    const int horizon = std::max(m, 4096);
    for (int n = 0; n <= horizon; ++n) {
        if (a1.schedule().stage_theta(n) > a2.schedule().stage_theta(n) + 1e-15) {
            out.status = CenteringResult::Status::no;
            out.reason = "stage " + std::to_string(n) + " angle of the first set is larger";
            return out;
        }
    }
    bool all = true;
    const std::uint64_t count = std::uint64_t{1} << m;
    for (std::uint64_t i = 0; i < count; ++i) {
        const Cap c1 = a1.cap({m, i}), c2 = a2.cap({m, i});
        const Point2 d1 = c1.base.b - c1.base.a, d2 = c2.base.b - c2.base.a;
        CapPlacement p;
        p.index = {m, i};
        p.rotation = std::atan2(cross(d1, d2), dot(d1, d2));
        if (c1.orientation != c2.orientation) p.rotation += M_PI;
        p.translation = c2.base.mid() - rotate(c1.base.mid(), p.rotation);
        p.contained = true;
        for (const Point2& q : c1.vertices())
            if (!c2.contains(p.apply(q), 1e-9)) p.contained = false;
        all = all && p.contained;
        out.placements.push_back(p);
    }
    out.status = all ? CenteringResult::Status::yes : CenteringResult::Status::no;
    out.reason = all ? "every stage-" + std::to_string(m) + " cap fits after a midpoint-centred rigid motion"
                     : "a moved cap leaves its target cap";
    return out;
}

double delta1_bound(double eps) { return (31.0 * eps / 32.0) / (65.0 / 128.0); }

SpiralDiagnostics spiral_diagnostics(const AngleSchedule& s, double target_turn) {
    if (!s.stage_uniform()) throw Error(ErrorKind::mismatch, "spiral diagnostics need a parametric schedule");
    if (!(target_turn > 0.0)) throw Error(ErrorKind::invalid_argument, "target turn must be > 0");
    SpiralDiagnostics out;
    if (s.kind() == ScheduleKind::aeps) out.delta1 = delta1_bound(s.param("eps"));
    switch (s.kind()) {
        case ScheduleKind::constant:
            if (s.param("theta") == 0.0) out.total = 0.0;
            break;
        case ScheduleKind::geometric: out.total = s.param("theta0") / (1.0 - s.param("ratio")); break;
        case ScheduleKind::power:
            if (s.param("p") > 1.0) out.total = s.param("theta0") * boost::math::zeta(s.param("p"));
            break;
        default: break;
    }
    constexpr std::size_t kListed = 4096;
    constexpr int kMaxStages = 10000000;
    CompensatedSum sum;
    for (int n = 0; n < kMaxStages; ++n) {
        sum.add(s.stage_theta(n));
        if (out.partial_sums.size() < kListed) out.partial_sums.push_back(sum.value());
        if (sum.value() > target_turn) {
            out.status = SpiralDiagnostics::Status::reached;
            out.stage = n;
            return out;
        }
        if (out.total && *out.total <= target_turn && n + 1 >= static_cast<int>(kListed)) break;
        if (out.total && *out.total <= target_turn && s.stage_theta(n) == 0.0) break;
    }
    out.status = out.total && *out.total <= target_turn ? SpiralDiagnostics::Status::never
                                                         : SpiralDiagnostics::Status::beyond_limit;
    return out;
}

nlohmann::json to_json(const SpiralDiagnostics& s) {
    nlohmann::json j = {{"partial_sums", s.partial_sums}};
    switch (s.status) {
        case SpiralDiagnostics::Status::reached: j["stage_reaching_target"] = s.stage; break;
        case SpiralDiagnostics::Status::never: j["stage_reaching_target"] = "never"; break;
        case SpiralDiagnostics::Status::beyond_limit: j["stage_reaching_target"] = "beyond_search_limit"; break;
    }
    if (s.total) j["total"] = *s.total;
    if (s.delta1) j["delta1_bound"] = *s.delta1;
    return j;
}

}  // namespace koch
