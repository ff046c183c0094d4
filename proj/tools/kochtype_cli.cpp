// Command-line front end: build, render, dim, measure, report, check, gallery.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "koch/analysis.hpp"
#include "koch/construction.hpp"
#include "koch/error.hpp"
#include "koch/io.hpp"
#include "koch/properties.hpp"
#include "koch/schedule.hpp"

namespace {

using namespace koch;

constexpr int kExitUsage = 2;
constexpr int kExitDepthGuard = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitResolution = 5;
constexpr int kExitCheckFailed = 10;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::depth_guard: return kExitDepthGuard;
        case ErrorKind::mismatch: return kExitMismatch;
        case ErrorKind::resolution: return kExitResolution;
        default: return kExitUsage;
    }
}

struct Options {
    std::string schedule;
    std::string in;
    std::string out;
    std::string csv;
    std::string method = "box";
    std::string property = "i";
    std::string gallery_name;
    std::vector<double> ratios;
    std::vector<double> scales;
    int depth = 12;
    int width = 800;
    int centers = 16;
    std::size_t samples = 4096;
    std::size_t neighbours = 8;
    double delta = 0.1;
    double eps = 0.01;
    double gallery_delta = 0.1;
    std::uint64_t seed = 1;
    bool free_lines = false;
    bool coarsest = false;
};

void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") std::cout << contents;
    else write_file_atomic(path, contents);
}

CapTree tree_from(const Options& o) { return build_tree(parse_schedule(o.schedule), o.depth); }

PolylineDocument read_polyline(const std::string& path) {
    const std::string text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::parse, path + ": " + e.what());
    }
    return polyline_from_json(j);
}

int cmd_build(const Options& o) {
    const CapTree tree = tree_from(o);
    emit(o.out, dump_json(polyline_to_json(tree, polyline(tree, o.depth))));
    return 0;
}

int cmd_render(const Options& o) {
    const PolylineDocument doc = read_polyline(o.in);
    emit(o.out, render_svg(doc.vertices, o.width));
    return 0;
}

std::vector<double> scales_or_default(const Options& o) {
    return o.scales.empty() ? default_box_scales() : o.scales;
}

int cmd_dim(const Options& o) {
    DimensionEstimate est;
    nlohmann::json doc;
    if (o.method == "moran") {
        MoranProblem p;
        if (!o.ratios.empty()) {
            p.ratios = o.ratios;
        } else {
            const AngleSchedule s = parse_schedule(o.schedule);
            if (s.kind() != ScheduleKind::constant)
                throw Error(ErrorKind::mismatch, "moran needs --ratios or a constant-angle schedule");
            const double l = 1.0 / (2.0 * std::cos(s.param("theta")));
            p.ratios = {l, l};
            doc["schedule"] = s.to_json();
        }
        est.method = DimensionMethod::moran;
        est.value = moran_solve(p);
        doc["ratios"] = p.ratios;
        doc["residual"] = moran_residual(p, est.value);
    } else if (o.method == "formula") {
        const AngleSchedule s = parse_schedule(o.schedule);
        if (s.kind() != ScheduleKind::constant)
            throw Error(ErrorKind::mismatch, "the closed-form dimension needs a constant-angle schedule");
        est.method = DimensionMethod::formula;
        est.value = dim_formula_ar(s.param("theta"));
        doc["schedule"] = s.to_json();
    } else if (o.method == "box") {
        const std::vector<double> scales = scales_or_default(o);
        Polyline line;
        if (!o.in.empty()) {
            const PolylineDocument d = read_polyline(o.in);
            line.vertices = d.vertices;
            line.stage = d.depth;
            doc["schedule"] = d.schedule;
        } else {
            const CapTree tree = tree_from(o);
            line = polyline(tree, o.depth);
            doc["schedule"] = tree.schedule().to_json();
        }
        const PointSample sample = densify(line, scales.back() / 4.0);
        est = box_counting_dim(sample.points, scales, sample.resolution);
        doc["points"] = sample.points.size();
        doc["resolution"] = sample.resolution;
        if (!o.csv.empty()) {
            std::vector<std::vector<double>> rows;
            for (const auto& r : est.fit) rows.push_back({r.scale, static_cast<double>(r.count)});
            emit(o.csv, csv_table({"scale", "box_count"}, rows));
        }
    } else if (o.method == "bounds") {
        const AngleSchedule s = parse_schedule(o.schedule);
        est = dim_bounds_koch(build_tree(s, std::min(o.depth, 4)));
        doc["schedule"] = s.to_json();
    } else {
        throw Error(ErrorKind::parse, "unknown method '" + o.method + "' (expected moran, formula, box, bounds)");
    }
    doc["estimate"] = to_json(est);
    emit(o.out, dump_json(doc));
    return 0;
}

int cmd_measure(const Options& o) {
    const CapTree tree = tree_from(o);
    std::vector<std::vector<double>> rows;
    for (int n = 0; n <= o.depth; ++n) rows.push_back({static_cast<double>(n), total_length(tree, n)});
    emit(o.out, csv_table({"stage", "total_length"}, rows));
    return 0;
}

int cmd_report(const Options& o) {
    const CapTree tree = tree_from(o);
    nlohmann::json doc = to_json(rectifiability_report(tree));
    doc["schedule"] = tree.schedule().to_json();
    doc["depth"] = o.depth;
    emit(o.out, dump_json(doc));
    return 0;
}

PointSample sample_for_check(const Options& o, nlohmann::json& source) {
    if (!o.gallery_name.empty()) {
        const GalleryName g = parse_gallery_name(o.gallery_name);
        GalleryParams p;
        p.depth = o.depth;
        p.eps = o.eps;
        p.delta = o.gallery_delta;
        source = {{"gallery", to_string(g)}, {"count", o.samples}};
        return gallery(g, p, o.samples);
    }
    if (!o.in.empty()) {
        const PolylineDocument d = read_polyline(o.in);
        source = {{"schedule", d.schedule}, {"depth", d.depth}};
        PointSample s;
        s.points = d.vertices;
        for (std::size_t k = 0; k + 1 < d.vertices.size(); ++k)
            s.resolution = std::max(s.resolution, dist(d.vertices[k], d.vertices[k + 1]));
        s.weights.assign(s.points.size(), 0.0);
        return s;
    }
    const CapTree tree = tree_from(o);
    source = {{"schedule", tree.schedule().to_json()}, {"depth", o.depth}};
    return sample_limit_set(tree, std::min<std::size_t>(o.samples, std::size_t{1} << o.depth));
}

int cmd_check(const Options& o) {
    const PropertyId property = parse_property(o.property);
    nlohmann::json source;
    const PointSample sample = sample_for_check(o, source);
    std::vector<double> radii = o.scales;
    if (radii.empty()) {
        // Default ladder 2^-1 .. 2^-6, cut at the sample resolution (explicit radii are not cut).
        for (int k = 1; k <= 6; ++k) radii.push_back(std::ldexp(1.0, -k));
        const auto fine = std::erase_if(radii, [&](double r) { return r < 4.0 * sample.resolution; });
        if (radii.empty()) throw Error(ErrorKind::resolution, "sample too coarse for the default radii");
        if (fine > 0) std::fprintf(stderr, "note: default radii cut at %g (4x the sample resolution)\n", radii.back());
    }

    std::mt19937_64 rng(o.seed);
    std::vector<Point2> centers;
    for (int k = 0; k < o.centers; ++k) centers.push_back(sample.points[rng() % sample.points.size()]);

    PropertyOptions opt;
    opt.neighbours = o.neighbours;
    opt.line_mode = o.free_lines ? LineMode::free : LineMode::through_point;
    opt.line_policy = o.coarsest ? LinePolicy::coarsest : LinePolicy::finest;
    opt.resolution = sample.resolution;
    const PropertyReport report = check_property(sample.points, property, o.delta, centers, radii, opt);

    nlohmann::json doc = to_json(report);
    doc["source"] = source;
    doc["seed"] = o.seed;
    doc["resolution"] = sample.resolution;
    emit(o.out, dump_json(doc));
    if (!o.csv.empty()) emit(o.csv, to_csv(report));
    return report.holds() ? 0 : kExitCheckFailed;
}

int cmd_gallery(const Options& o) {
    const GalleryName g = parse_gallery_name(o.gallery_name);
    GalleryParams p;
    p.depth = o.depth;
    p.eps = o.eps;
    p.delta = o.gallery_delta;
    const PointSample s = gallery(g, p, o.samples);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < s.points.size(); ++k) rows.push_back({s.points[k].x, s.points[k].y, s.weights[k]});
    emit(o.out, csv_table({"x", "y", "weight"}, rows));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koch-type set construction, analysis and property checks"};
    app.require_subcommand(1);
    Options o;

    auto* build = app.add_subcommand("build", "Build the stage-depth polyline and write it as JSON");
    build->add_option("--schedule", o.schedule, "Angle schedule, e.g. aeps:eps=0.01")->required();
    build->add_option("--depth", o.depth, "Construction depth");
    build->add_option("--out", o.out, "Output JSON path (stdout when omitted)");

    auto* render = app.add_subcommand("render", "Render a polyline JSON file as SVG");
    render->add_option("--in", o.in, "Polyline JSON")->required();
    render->add_option("--out", o.out, "Output SVG path");
    render->add_option("--width", o.width, "Width in pixels");

    auto* dim = app.add_subcommand("dim", "Estimate or compute a dimension");
    dim->add_option("--method", o.method, "moran | formula | box | bounds");
    dim->add_option("--schedule", o.schedule, "Angle schedule");
    dim->add_option("--in", o.in, "Polyline JSON (box method)");
    dim->add_option("--depth", o.depth, "Construction depth (box method)");
    dim->add_option("--ratios", o.ratios, "Similarity ratios (moran method)")->delimiter(',');
    dim->add_option("--scales", o.scales, "Box sizes, decreasing")->delimiter(',');
    dim->add_option("--out", o.out, "Output JSON path");
    dim->add_option("--csv", o.csv, "Output (scale, box_count) CSV path");

    auto* measure = app.add_subcommand("measure", "Write (stage, total_length) rows");
    measure->add_option("--schedule", o.schedule, "Angle schedule")->required();
    measure->add_option("--depth", o.depth, "Last stage");
    measure->add_option("--out", o.out, "Output CSV path");

    auto* report = app.add_subcommand("report", "Write the rectifiability report");
    report->add_option("--schedule", o.schedule, "Angle schedule")->required();
    report->add_option("--depth", o.depth, "Construction depth for the cell classification");
    report->add_option("--out", o.out, "Output JSON path");

    auto* check = app.add_subcommand("check", "Check an approximation property on a sample");
    check->add_option("--schedule", o.schedule, "Angle schedule");
    check->add_option("--in", o.in, "Polyline JSON");
    check->add_option("--gallery", o.gallery_name, "Gallery set: N, LambdaDelta, LambdaSq, GammaEps, AEps, ScriptAEps");
    check->add_option("--property", o.property, "i .. viii")->required();
    check->add_option("--delta", o.delta, "Flatness threshold");
    check->add_option("--centers", o.centers, "Number of sampled centers");
    check->add_option("--scales", o.scales, "Radii, decreasing")->delimiter(',');
    check->add_option("--samples", o.samples, "Sample size");
    check->add_option("--depth", o.depth, "Construction depth");
    check->add_option("--eps", o.eps, "eps of the gallery sets");
    check->add_option("--gallery-delta", o.gallery_delta, "slope parameter of LambdaDelta");
    check->add_option("--neighbours", o.neighbours, "Points near each center tested by (ii), (iv), (v), (vii), (viii)");
    check->add_flag("--free-lines", o.free_lines, "Use unconstrained lines for (ii)/(iv)/(v)");
    check->add_flag("--coarsest", o.coarsest, "Reuse the coarsest-scale line for (vi)-(viii)");
    check->add_option("--seed", o.seed, "Seed for center selection");
    check->add_option("--out", o.out, "Output JSON path");
    check->add_option("--csv", o.csv, "Output CSV path");

    auto* gallery_cmd = app.add_subcommand("gallery", "Write a gallery sample as (x, y, weight) CSV");
    gallery_cmd->add_option("--name", o.gallery_name, "Gallery set")->required();
    gallery_cmd->add_option("--samples", o.samples, "Point count");
    gallery_cmd->add_option("--depth", o.depth, "Construction depth");
    gallery_cmd->add_option("--eps", o.eps, "eps");
    gallery_cmd->add_option("--gallery-delta", o.gallery_delta, "slope parameter of LambdaDelta");
    gallery_cmd->add_option("--out", o.out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*build) return cmd_build(o);
        if (*render) return cmd_render(o);
        if (*dim) return cmd_dim(o);
        if (*measure) return cmd_measure(o);
        if (*report) return cmd_report(o);
        if (*check) return cmd_check(o);
        if (*gallery_cmd) return cmd_gallery(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
