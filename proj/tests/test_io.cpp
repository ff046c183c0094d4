#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "koch/error.hpp"
#include "koch/io.hpp"

using namespace koch;

TEST_CASE("doubles print round-trip exact") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    const nlohmann::json j = {{"a", 0.1}, {"b", {1, 2}}, {"c", "x"}, {"d", std::nan("")}};
    const std::string text = dump_json(j);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("null") != std::string::npos);
    CHECK(nlohmann::json::parse(text)["a"].get<double>() == 0.1);
}

TEST_CASE("csv tables use a header and LF endings") {
    const std::string csv = csv_table({"stage", "total_length"}, {{0, 1.0}, {1, 1.5}});
    CHECK(csv == "stage,total_length\n0,1\n1,1.5\n");
}

TEST_CASE("polyline documents round-trip") {
    const auto tree = build_tree(AngleSchedule::aeps(0.01), 4);
    const auto j = polyline_to_json(tree, polyline(tree, 4));
    const auto doc = polyline_from_json(nlohmann::json::parse(dump_json(j)));
    CHECK(doc.vertices.size() == 17);
    CHECK(doc.depth == 4);
    CHECK(doc.vertices[5] == tree.stage_vertices(4)[5]);
    CHECK(AngleSchedule::from_json(doc.schedule).kind() == ScheduleKind::aeps);
    CHECK_THROWS_AS(polyline_from_json(nlohmann::json::array()), Error);
    CHECK_THROWS_AS(polyline_from_json({{"depth", 1}}), Error);
}

TEST_CASE("atomic writes replace the target") {
    const auto path = std::filesystem::temp_directory_path() / "koch_io_test.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    CHECK(read_file(path) == "second");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_file(path), Error);
}

TEST_CASE("svg output is a single flipped path") {
    const std::vector<Point2> v{{0, 0}, {0.5, 0.25}, {1, 0}};
    const std::string svg = render_svg(v, 400);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find("<path", svg.find("<path") + 1) == std::string::npos);
    CHECK(svg.find("M0 -0 L0.5 -0.25 L1 -0") != std::string::npos);
    CHECK(svg.find("viewBox=\"-0.050000000000000003 -0.29999999999999999 1.1000000000000001 0.34999999999999998") != std::string::npos);
}
