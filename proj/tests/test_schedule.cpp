#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "koch/error.hpp"
#include "koch/schedule.hpp"

using namespace koch;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        parse_schedule(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error for " << text);
    return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("dyadic index navigation") {
    const DyadicIndex idx{3, 5};
    CHECK(idx.left() == DyadicIndex{4, 10});
    CHECK(idx.right() == DyadicIndex{4, 11});
    CHECK(idx.parent() == DyadicIndex{2, 2});
    CHECK(idx.ancestor(1) == DyadicIndex{1, 1});
    CHECK(idx.is_descendant_of({1, 1}));
    CHECK_FALSE(idx.is_descendant_of({1, 0}));
    CHECK_THROWS_AS(validate_index({2, 4}), Error);
}

TEST_CASE("aeps angles follow the closed form") {
    const auto s = AngleSchedule::aeps(0.01);
    for (int n : {0, 1, 10, 1000})
        CHECK(s.stage_theta(n) == doctest::Approx(std::atan(0.04 / std::sqrt(1 + 16 * n * 1e-4))).epsilon(1e-15));
    CHECK(s.theta({5, 17}) == s.stage_theta(5));
}

TEST_CASE("parametric schedules parse") {
    CHECK(parse_schedule("const:theta=0.2").stage_theta(7) == 0.2);
    CHECK(parse_schedule("geom:theta0=0.1,ratio=0.5").stage_theta(2) == doctest::Approx(0.025));
    CHECK(parse_schedule("power:theta0=0.05,p=1").stage_theta(4) == doctest::Approx(0.01));
    CHECK(parse_schedule("aeps:eps=0.01").kind() == ScheduleKind::aeps);
}

TEST_CASE("schedule grammar errors are located") {
    CHECK(kind_of("const") == ErrorKind::parse);
    CHECK(kind_of("const:theta=abc") == ErrorKind::parse);
    CHECK(kind_of("geom:theta0=0.1") == ErrorKind::parse);
    CHECK(kind_of("nope:theta=1") == ErrorKind::parse);
    CHECK(kind_of("const:theta=0.6") == ErrorKind::schedule);
    CHECK(kind_of("geom:theta0=0.1,ratio=1.5") == ErrorKind::schedule);
    try {
        parse_schedule("geom:theta0=0.1,ratio=x");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
}

TEST_CASE("schedules round-trip through their JSON echo") {
    for (const char* text : {"const:theta=0.2", "aeps:eps=0.01", "geom:theta0=0.1,ratio=0.5", "power:theta0=0.05,p=2"}) {
        const auto s = parse_schedule(text);
        const auto back = AngleSchedule::from_json(s.to_json());
        CHECK(back.to_json() == s.to_json());
        CHECK(back.stage_theta(3) == s.stage_theta(3));
    }
}

TEST_CASE("table schedules with tails") {
    const nlohmann::json doc = {
        {"entries", {{{"n", 0}, {"i", 0}, {"theta", 0.2}}}},
        {"tails", {{{"n", 1}, {"i", 0}, {"schedule", "const:theta=0.2"}}, {{"n", 1}, {"i", 1}, {"schedule", "aeps:eps=0.01"}}}}};
    const auto s = AngleSchedule::table(table_from_json(doc));
    CHECK_FALSE(s.stage_uniform());
    CHECK(s.theta({0, 0}) == 0.2);
    CHECK(s.theta({3, 1}) == 0.2);
    CHECK(s.theta({1, 1}) == doctest::Approx(std::atan(0.04)));
    CHECK(s.theta({3, 7}) == doctest::Approx(AngleSchedule::aeps(0.01).stage_theta(2)));
    REQUIRE(s.tail_for({4, 3}) != nullptr);
    CHECK(s.tail_for({4, 3})->root == DyadicIndex{1, 0});

    const auto path = std::filesystem::temp_directory_path() / "koch_table_test.json";
    std::ofstream(path) << doc.dump();
    const auto parsed = parse_schedule("table:" + path.string());
    CHECK(parsed.theta({3, 7}) == s.theta({3, 7}));
    std::filesystem::remove(path);
}

TEST_CASE("table schedules reject nested tails and missing files") {
    const nlohmann::json nested = {
        {"tails", {{{"n", 1}, {"i", 0}, {"schedule", "const:theta=0.1"}}, {{"n", 2}, {"i", 0}, {"schedule", "const:theta=0.1"}}}}};
    CHECK_THROWS_AS(AngleSchedule::table(table_from_json(nested)), Error);
    CHECK(kind_of("table:/nonexistent/table.json") == ErrorKind::parse);
}
