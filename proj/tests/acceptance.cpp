// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "koch/analysis.hpp"
#include "koch/construction.hpp"
#include "koch/numeric.hpp"
#include "koch/parametrization.hpp"
#include "koch/properties.hpp"
#include "koch/schedule.hpp"
#include "oracle.hpp"

using namespace koch;

namespace {

// Frozen reference values (independent mpmath evaluations, 50 digits, rounded to double).
constexpr double kLn4OverLn3 = 1.2618595071429148;
constexpr double kGeometricLimit = 1.0066979095344688;   // prod_k sec(0.1 * 2^-k)
constexpr double kGeometricMeasure = 1.0016686131634777; // prod_k sec(0.05 * 2^-k)
constexpr double kF1At02 = 1.0299173875961311;           // ln 2 / ln(2 cos 0.2)
constexpr double kDelta1At001 = 0.019076923076923077;    // (31/32 * 0.01) / (65/128)
constexpr int kSpiralStage = 166;                        // first N with sum_{n<=N} theta_n > 2 pi, eps = 0.01

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& measured) {
    if (!pass) ++failures;
    std::printf("%s criterion %2d: %s [%s]\n", pass ? "PASS" : "FAIL", id, what.c_str(), measured.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void run(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [pass, measured] = body();
        report(id, pass, what, measured);
    } catch (const std::exception& e) {
        report(id, false, what, std::string("threw: ") + e.what());
    }
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

DimensionEstimate box_count_of_tree(const CapTree& tree) {
    const auto scales = default_box_scales();
    const auto sample = densify(polyline(tree, tree.depth()), scales.back() / 4);
    return box_counting_dim(sample.points, scales, sample.resolution);
}

// Radii 1, 1/2, ... down to the smallest one still at least 4x the sample resolution.
std::vector<double> admissible_ladder(double resolution) {
    std::vector<double> radii;
    for (double rho = 1.0; rho >= 4.0 * resolution; rho /= 2) radii.push_back(rho);
    return radii;
}

std::vector<Point2> spread_centers(const std::vector<Point2>& points, std::size_t count) {
    std::vector<Point2> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(points[(2 * k + 1) * points.size() / (2 * count)]);
    return out;
}

}  // namespace

int main() {
    run(1, "stage lengths of the shrinking-angle set equal sqrt(1 + 16 n eps^2), n <= 20", [] {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (double eps : {0.001, 0.01}) {
            const auto tree = build_tree(AngleSchedule::aeps(eps), 19);
            for (int n = 0; n <= 20; ++n)
                worst = std::max(worst, relative(total_length(tree, n), std::sqrt(1 + 16 * n * eps * eps)));
        }
        const double t = seconds_since(t0);
        return std::pair{worst <= 1e-9 && t < 5.0, fmt("max rel err %.3g, %.2f s", worst, t)};
    });

    run(2, "telescoping secant product equals sqrt(1 + 16 n eps^2) for n <= 10^4", [] {
        double worst = 0.0;
        for (double eps : {0.001, 0.01, 0.1}) {
            const auto s = AngleSchedule::aeps(eps);
            CompensatedSum log_product;
            for (int n = 0; n <= 10000; ++n) {
                if (n > 0) log_product.add(-std::log(std::cos(s.stage_theta(n - 1))));
                const double expected = std::sqrt(1 + 16 * n * eps * eps);
                worst = std::max(worst, relative(schedule_product(s, n), expected));
                worst = std::max(worst, relative(std::exp(log_product.value()), expected));
            }
        }
        return std::pair{worst <= 1e-12, fmt("max rel err %.3g", worst)};
    });

    run(3, "the two similarity maps send stage n of the constant-angle set onto stage n+1, n <= 10", [] {
        const double eps = 0.01;
        const auto [s1, s2] = ifs_maps_gamma(eps);
        const auto tree = build_tree(AngleSchedule::constant(std::atan(2 * eps)), 10);
        double worst = 0.0;
        for (int n = 0; n <= 10; ++n) {
            std::vector<Point2> image;
            for (const Point2& p : tree.stage_vertices(n)) image.push_back(s1(p));
            for (const Point2& p : tree.stage_vertices(n)) image.push_back(s2(p));
            worst = std::max(worst, oracle::hausdorff(image, tree.stage_vertices(n + 1)));
        }
        return std::pair{worst <= 1e-9, fmt("max Hausdorff distance %.3g", worst)};
    });

    run(4, "Moran solution matches the closed dimension formula; four thirds give ln4/ln3", [] {
        double worst = 0.0;
        for (double r : {0.01, 0.05, 0.1, 0.2, 0.3}) {
            const double ratio = 1.0 / (2 * std::cos(r));
            worst = std::max(worst, std::abs(dim_formula_ar(r) - moran_solve({{ratio, ratio}})));
        }
        const double koch = moran_solve({{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3}});
        const double koch_err = std::max(std::abs(koch - kLn4OverLn3), std::abs(koch - std::log(4.0) / std::log(3.0)));
        return std::pair{worst < 1e-10 && koch_err < 1e-10, fmt("max diff %.3g, ln4/ln3 err %.3g", worst, koch_err)};
    });

    run(5, "box count of the classic Koch curve (theta = pi/6, depth 12) within 0.03 of ln4/ln3", [] {
        const auto t0 = Clock::now();
        const auto est = box_count_of_tree(build_tree(AngleSchedule::constant(M_PI / 6), 12));
        const double t = seconds_since(t0);
        return std::pair{std::abs(est.value - kLn4OverLn3) <= 0.03 && t < 30.0,
                         fmt("estimate %.4f, target %.4f, %.2f s", est.value, kLn4OverLn3, t)};
    });

    run(6, "box count of the shrinking-angle set (eps = 0.01, depth 16) within 0.05 of 1", [] {
        const auto est = box_count_of_tree(build_tree(AngleSchedule::aeps(0.01), 16));
        return std::pair{std::abs(est.value - 1.0) <= 0.05, fmt("estimate %.4f", est.value)};
    });

    run(7, "constant-angle set (eps = 0.005, depth 14) has uniform property (v) at 1.1 sin(4 atan(2 eps))", [] {
        const double eps = 0.005;
        const auto tree = build_tree(AngleSchedule::constant(std::atan(2 * eps)), 14);
        const auto sample = sample_limit_set(tree, 16384);
        const auto radii = admissible_ladder(sample.resolution);
        const auto centers = spread_centers(sample.points, 16);
        PropertyOptions opt;
        opt.rho0 = 1.0;
        opt.resolution = sample.resolution;
        const double delta = 1.1 * std::sin(4 * std::atan(2 * eps));
        const auto rep = check_property(sample.points, PropertyId::v, delta, centers, radii, opt);
        const std::size_t pairs = centers.size() * radii.size();
        return std::pair{pairs >= 100 && rep.holds(),
                         fmt("%zu center-radius pairs, %zu balls, %zu failures, delta %.6f", pairs, rep.tested_balls(),
                             rep.failures(), delta)};
    });

    run(8, "near the root apex of the shrinking-angle set the flatness at radius 1/2 is at least 0.95 delta_1", [] {
        const double eps = 0.01;
        const auto tree = build_tree(AngleSchedule::aeps(eps), 14);
        const auto sample = sample_limit_set(tree, 16384);
        const Point2 apex{0.5, 0.5 * std::tan(tree.schedule().stage_theta(0))};
        const auto nearest = *std::min_element(sample.points.begin(), sample.points.end(),
                                               [&](Point2 a, Point2 b) { return dist(a, apex) < dist(b, apex); });
        const std::vector<double> radius{0.5};
        const auto prof = flatness_profile(sample.points, nearest, radius, true);
        const double beta = prof.entries[0].beta_through;
        const double d1 = delta1_bound(eps);
        return std::pair{dist(nearest, apex) <= eps / 32 && std::abs(d1 - kDelta1At001) < 1e-15 && beta >= 0.95 * d1,
                         fmt("center offset %.3g, beta %.6f, delta_1 %.6f", dist(nearest, apex), beta, d1)};
    });

    run(9, "spiral diagnostics: the shrinking-angle set turns past 2 pi at a finite stage; geometric never", [] {
        const auto a = spiral_diagnostics(AngleSchedule::aeps(0.01), 2 * M_PI);
        const auto g = spiral_diagnostics(AngleSchedule::geometric(0.1, 0.5), 2 * M_PI);
        const bool pass = a.status == SpiralDiagnostics::Status::reached && a.stage == kSpiralStage &&
                          g.status == SpiralDiagnostics::Status::never;
        return std::pair{pass, fmt("stage %d (frozen %d), geometric %s", a.stage, kSpiralStage,
                                   g.status == SpiralDiagnostics::Status::never ? "never" : "reached")};
    });

    run(10, "stretch ratios of the depth-20 parametrization stay below 4 m^2 (geometric 0.1, 1/2)", [] {
        const auto s = AngleSchedule::geometric(0.1, 0.5);
        const double m = limit_stretch_product(s);
        const auto tree = build_tree(s, 20);
        const auto scan = lipschitz_ratio_scan(tree, m, 10000, 20240601);
        return std::pair{std::abs(m - kGeometricLimit) < 1e-12 && scan.pairs == 10000 && scan.max_ratio <= scan.bound,
                         fmt("m %.16f, max ratio %.6f, bound %.6f", m, scan.max_ratio, scan.bound)};
    });

    run(11, "measure of the image at stage 30 matches the infinite product; half interval gives half", [] {
        const auto tree = build_tree(AngleSchedule::geometric(0.05, 0.5), 0);
        const DyadicIndex all{0, 0}, left{1, 0};
        const auto full = measure_of_image(tree, std::span(&all, 1), 30);
        const auto half = measure_of_image(tree, std::span(&left, 1), 30);
        const double e1 = std::abs(full.value - kGeometricMeasure), e2 = std::abs(half.value - full.value / 2);
        return std::pair{e1 <= 1e-6 && e2 <= 1e-12, fmt("full err %.3g, half err %.3g", e1, e2)};
    });

    run(12, "rectifiability verdicts for the shrinking, power and constant schedules", [] {
        const auto a = rectifiability_report(build_tree(AngleSchedule::aeps(0.01), 10));
        const auto p = rectifiability_report(build_tree(AngleSchedule::power(0.05, 1.0), 10));
        const auto c = rectifiability_report(build_tree(AngleSchedule::constant(0.2), 10));
        const bool pass = a.verdict == "not_rectifiable" && p.verdict == "rectifiable" &&
                          c.verdict == "not_rectifiable" && std::abs(c.dim_estimate.value - kF1At02) < 1e-12;
        return std::pair{pass, fmt("%s / %s / %s, dim %.16f", a.verdict.c_str(), p.verdict.c_str(),
                                   c.verdict.c_str(), c.dim_estimate.value)};
    });

    run(13, "mixed table (left constant 0.2, right shrinking 0.01): box count within 0.05 of f1(0.2)", [] {
        TableData t;
        t.entries[{0, 0}] = 0.2;
        t.tails.push_back({{1, 0}, std::make_shared<const AngleSchedule>(AngleSchedule::constant(0.2)), 0});
        t.tails.push_back({{1, 1}, std::make_shared<const AngleSchedule>(AngleSchedule::aeps(0.01)), 0});
        const auto tree = build_tree(AngleSchedule::table(t), 16);
        const auto box = box_count_of_tree(tree);
        const auto bounds = dim_bounds_koch(tree);
        const bool pass = std::abs(box.value - kF1At02) <= 0.05 && bounds.determined &&
                          std::abs(bounds.bounds->first - kF1At02) < 1e-12 &&
                          std::abs(bounds.bounds->second - kF1At02) < 1e-12;
        return std::pair{pass, fmt("box %.4f, bounds [%.6f, %.6f], f1 %.6f", box.value, bounds.bounds->first,
                                   bounds.bounds->second, kF1At02)};
    });

    run(14, "both min-max fitters agree with a 10^5-angle grid oracle on 200 random clouds", [] {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_int_distribution<int> size(1, 50);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<Point2> pts(static_cast<std::size_t>(size(rng)));
            for (auto& p : pts) p = {u(rng), 0.3 * u(rng)};
            const Point2 c = pts[0];
            worst = std::max(worst, std::abs(minmax_fit_through(pts, c).width - oracle::fit_through(pts, c)));
            worst = std::max(worst, std::abs(minmax_fit_free(pts).width - oracle::fit_free(pts)));
        }
        return std::pair{worst <= 1e-6, fmt("max |fitter - oracle| %.3g", worst)};
    });

    run(15, "property implications (viii)=>(vii)=>(vi) and (iv)=>(iii)=>(i) on every gallery set", [] {
        std::size_t checked = 0, violations = 0;
        const double delta = 0.1;
        for (GalleryName name : {GalleryName::lines_n, GalleryName::lambda_delta, GalleryName::lambda_sq,
                                 GalleryName::gamma_eps, GalleryName::aeps, GalleryName::script_aeps}) {
            GalleryParams gp;
            gp.n_max = 16;
            gp.depth = 12;
            const auto s = gallery(name, gp, 8192);
            const auto radii = admissible_ladder(s.resolution);
            const auto centers = spread_centers(s.points, 12);
            PropertyOptions opt;
            opt.resolution = s.resolution;
            auto verdicts = [&](PropertyId p) {
                const auto r = check_property(s.points, p, delta, centers, radii, opt);
                std::vector<bool> v;
                for (const auto& c : r.centers) v.push_back(c.holds && r.contained);
                return v;
            };
            const auto v8 = verdicts(PropertyId::viii), v7 = verdicts(PropertyId::vii), v6 = verdicts(PropertyId::vi);
            const auto v4 = verdicts(PropertyId::iv), v3 = verdicts(PropertyId::iii), v1 = verdicts(PropertyId::i);
            for (std::size_t k = 0; k < centers.size(); ++k) {
                checked += 4;
                violations += (v8[k] && !v7[k]) + (v7[k] && !v6[k]) + (v4[k] && !v3[k]) + (v3[k] && !v1[k]);
            }
        }
        return std::pair{checked > 0 && violations == 0, fmt("%zu implications checked, %zu violated", checked, violations)};
    });

    std::printf("%d of 15 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
