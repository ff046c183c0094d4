#include <doctest.h>

#include <cmath>
#include <random>

#include "koch/analysis.hpp"
#include "koch/error.hpp"
#include "koch/properties.hpp"

using namespace koch;

namespace {

std::vector<Point2> line_points(std::size_t n) {
    std::vector<Point2> pts;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        pts.push_back({-1 + 2 * t, 0.3 * (-1 + 2 * t) + 0.1});
    }
    return pts;
}

const std::vector<double> kRadii{0.5, 0.25, 0.125, 0.0625};

}  // namespace

TEST_CASE("flatness of a line is zero") {
    const auto pts = line_points(2001);
    const auto prof = flatness_profile(pts, pts[1000], kRadii, true);
    REQUIRE(prof.entries.size() == 4);
    for (const auto& e : prof.entries) {
        CHECK_FALSE(e.empty);
        CHECK(e.beta_through < 1e-12);
        CHECK(e.beta_free <= e.beta_through + 1e-15);
    }
}

TEST_CASE("flatness of a full circle at radius 2") {
    std::vector<Point2> circle;
    for (int k = 0; k < 3600; ++k) circle.push_back({std::cos(k * M_PI / 1800), std::sin(k * M_PI / 1800)});
    const std::vector<double> r{2.0};
    const auto prof = flatness_profile(circle, circle[0], r, true);
    CHECK(prof.entries[0].beta_through == doctest::Approx(0.5).epsilon(1e-9));
    // The sample is a regular 3600-gon: its narrowest strip is cos(pi/3600) times the diameter.
    CHECK(prof.entries[0].beta_free == doctest::Approx(0.5 * std::cos(M_PI / 3600)).epsilon(1e-12));
}

TEST_CASE("empty balls pass vacuously") {
    const std::vector<Point2> pts{{5, 5}, {6, 6}};
    const auto prof = flatness_profile(pts, {0, 0}, kRadii, true);
    for (const auto& e : prof.entries) CHECK(e.empty);
}

TEST_CASE("every property holds on a line") {
    const auto pts = line_points(4001);
    const std::vector<Point2> centers{pts[500], pts[2000], pts[3500]};
    for (int p = 0; p < 8; ++p) {
        PropertyOptions opt;
        opt.rho0 = 2.0;
        opt.resolution = 0.001;
        const std::vector<double> radii{2.0, 0.5, 0.25, 0.125};
        const auto r = check_property(pts, static_cast<PropertyId>(p), 0.01, centers, radii, opt);
        CHECK(r.holds());
    }
}

TEST_CASE("resolution guard") {
    const auto pts = line_points(100);
    PropertyOptions opt;
    opt.resolution = 0.05;
    try {
        check_property(pts, PropertyId::i, 0.1, std::span(pts.data(), 1), kRadii, opt);
        FAIL("expected a resolution error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resolution);
    }
}

TEST_CASE("the lines gallery set satisfies (vii) away from the accumulation line") {
    GalleryParams gp;
    gp.box_min_x = 0.2;
    gp.n_max = 10;
    const auto s = gallery(GalleryName::lines_n, gp, 20000);
    std::vector<Point2> centers;
    for (std::size_t k = 0; k < s.points.size() && centers.size() < 12; k += 7)
        if (s.points[k].y > 0.3) centers.push_back(s.points[k]);
    REQUIRE(centers.size() >= 5);
    // Radii below half the gap between the lines y = 1/2 and y = 1/3.
    const std::vector<double> radii{0.08, 0.04, 0.02};
    PropertyOptions opt;
    opt.resolution = s.resolution;
    CHECK(check_property(s.points, PropertyId::vii, 0.1, centers, radii, opt).holds());
}

TEST_CASE("the cone gallery set is flat through the origin") {
    GalleryParams gp;
    gp.delta = 0.1;
    const auto s = gallery(GalleryName::lambda_delta, gp, 20000);
    const std::vector<double> radii{1.0, 0.5, 0.25};
    const auto prof = flatness_profile(s.points, {0, 0}, radii, true);
    for (const auto& e : prof.entries) CHECK(e.beta_through <= 0.1 + 1e-12);
}

TEST_CASE("aeps fails (v) below the spiral threshold with a reproducible witness") {
    const auto tree = build_tree(AngleSchedule::aeps(0.01), 14);
    const auto s = sample_limit_set(tree, 16384);
    const std::vector<Point2> centers{F_n(tree, 0.5, 13)};
    const std::vector<double> radii{0.5};
    PropertyOptions opt;
    opt.resolution = s.resolution;
    const double d1 = delta1_bound(0.01);
    const auto r = check_property(s.points, PropertyId::v, 0.5 * d1, centers, radii, opt);
    REQUIRE_FALSE(r.holds());
    const auto& w = *r.centers[0].witness;
    CHECK(w.beta > 0.5 * d1);
    CHECK(std::abs(recheck_witness(s.points, w) - w.beta) < 1e-9);
}

TEST_CASE("scaling and rigid motions leave betas and verdicts unchanged") {
    const auto tree = build_tree(AngleSchedule::constant(0.2), 10);
    const auto s = sample_limit_set(tree, 1024);
    std::vector<Point2> centers;
    for (std::size_t k = 0; k < s.points.size(); k += 200) centers.push_back(s.points[k]);
    const std::vector<double> radii{0.25, 0.125, 0.0625};
    PropertyOptions opt;
    opt.resolution = s.resolution;
    const auto base = check_property(s.points, PropertyId::ii, 0.08, centers, radii, opt);

    const double scale = 3.7, angle = 0.9;
    const Point2 shift{2.5, -1.25};
    auto move = [&](Point2 p) { return rotate(scale * p, angle) + shift; };
    std::vector<Point2> pts2, centers2, radii_unused;
    for (const Point2& p : s.points) pts2.push_back(move(p));
    for (const Point2& c : centers) centers2.push_back(move(c));
    std::vector<double> radii2;
    for (double r : radii) radii2.push_back(scale * r);
    PropertyOptions opt2 = opt;
    opt2.resolution = scale * s.resolution;
    const auto moved = check_property(pts2, PropertyId::ii, 0.08, centers2, radii2, opt2);
    REQUIRE(moved.centers.size() == base.centers.size());
    for (std::size_t k = 0; k < base.centers.size(); ++k) {
        CHECK(moved.centers[k].holds == base.centers[k].holds);
        for (std::size_t j = 0; j < radii.size(); ++j)
            CHECK(moved.profiles[k].entries[j].beta_through ==
                  doctest::Approx(base.profiles[k].entries[j].beta_through).epsilon(1e-9));
    }
}

TEST_CASE("(v) verdicts are monotone in delta") {
    const auto tree = build_tree(AngleSchedule::constant(0.05), 12);
    const auto s = sample_limit_set(tree, 4096);
    std::vector<Point2> centers;
    for (std::size_t k = 0; k < s.points.size(); k += 400) centers.push_back(s.points[k]);
    const std::vector<double> radii{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    PropertyOptions opt;
    opt.resolution = s.resolution;
    bool held = false;
    for (double d : {0.05, 0.1, 0.15, 0.2, 0.3}) {
        const bool holds = check_property(s.points, PropertyId::v, d, centers, radii, opt).holds();
        CHECK((!held || holds));
        held = held || holds;
    }
    CHECK(held);
}

TEST_CASE("strong variants reuse one line per center") {
    const auto pts = line_points(1001);
    const std::vector<Point2> centers{pts[300]};
    const auto r = check_property(pts, PropertyId::vi, 0.01, centers, kRadii, {});
    REQUIRE(r.centers[0].reused_line);
    CHECK(distance_to_line(pts[300], *r.centers[0].reused_line) < 1e-12);
    PropertyOptions coarse;
    coarse.line_policy = LinePolicy::coarsest;
    CHECK(check_property(pts, PropertyId::vi, 0.01, centers, kRadii, coarse).line_policy == "coarsest");
}

TEST_CASE("local finiteness scan") {
    const auto pts = line_points(20001);
    std::vector<double> w(pts.size(), std::sqrt(1.09) * 2.0 / 20000);
    const std::vector<Point2> centers{pts[10000]};
    const auto g = local_finiteness_scan(pts, w, centers, kRadii);
    for (const auto& row : g[0].rows) CHECK(row.length == doctest::Approx(2 * row.rho).epsilon(0.002));
    CHECK_FALSE(g[0].diverging);

    // Truncated cone family: N lines through the origin each add about 2 rho.
    GalleryParams gp;
    std::vector<double> ratios;
    for (int n : {5, 10, 20}) {
        gp.n_max = n;
        const auto s = gallery(GalleryName::lambda_delta, gp, 64 * static_cast<std::size_t>(n) * 16);
        const std::vector<Point2> origin{{0, 0}};
        const std::vector<double> r{0.5};
        const auto scan = local_finiteness_scan(s.points, s.weights, origin, r);
        CHECK(scan[0].rows[0].length >= 2 * n * 0.5 * std::cos(0.1) * 0.95);
        ratios.push_back(scan[0].rows[0].length);
    }
    CHECK(ratios[1] > ratios[0]);
    CHECK(ratios[2] > ratios[1]);
}

TEST_CASE("delta ladders") {
    const auto pts = line_points(2001);
    const std::vector<Point2> centers{pts[400], pts[1600]};
    const std::vector<double> deltas{0.2, 0.1, 0.05};
    const auto report = delta_ladder_check(pts, PropertyId::i, deltas, centers, [](double) { return kRadii; });
    CHECK(report.reports.size() == 3);
    CHECK(*report.smallest_holding == 0.05);

    // The constant-angle set fails once delta drops below its cone angle.
    const auto tree = build_tree(AngleSchedule::constant(0.1), 12);
    const auto s = sample_limit_set(tree, 4096);
    const std::vector<Point2> apex{tree.cap({0, 0}).apex};
    PropertyOptions opt;
    opt.resolution = s.resolution;
    // The apex sits tan(0.1)/2 above the base ends, so every line through it leaves beta ~ 0.1 at
    // radius 1/2.
    const std::vector<double> low{0.05};
    const auto fails = delta_ladder_check(s.points, PropertyId::ii, low, apex,
                                          [](double) { return std::vector<double>{0.5}; }, opt);
    CHECK_FALSE(fails.reports[0].holds());
    CHECK_FALSE(fails.smallest_holding);
}

TEST_CASE("report serialisation") {
    const auto pts = line_points(201);
    const std::vector<Point2> centers{pts[100]};
    const auto r = check_property(pts, PropertyId::viii, 0.1, centers, kRadii, {});
    const auto j = to_json(r);
    CHECK(j["property"] == "viii");
    CHECK(j["centers"][0].contains("reused_line"));
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("center_x,center_y,rho,beta_through,beta_free,verdict\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
