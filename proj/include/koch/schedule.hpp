#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace koch {

// Names segment A_{n,i}, cap T_{n,i} and dyadic interval D_{n,i} at once (0-based i).
struct DyadicIndex {
    int n = 0;
    std::uint64_t i = 0;

    DyadicIndex left() const { return {n + 1, 2 * i}; }
    DyadicIndex right() const { return {n + 1, 2 * i + 1}; }
    DyadicIndex parent() const { return {n - 1, i / 2}; }
    // Ancestor at stage m <= n (the cell itself when m == n).
    DyadicIndex ancestor(int m) const { return {m, i >> (n - m)}; }
    bool is_descendant_of(const DyadicIndex& other) const {
        return other.n <= n && ancestor(other.n).i == other.i;
    }
    auto operator<=>(const DyadicIndex&) const = default;
};

void validate_index(const DyadicIndex& idx);

// Largest base angle accepted anywhere: the classic Koch angle pi/6 (caps stay disjoint and
// nested well below the pi/4 overlap limit).
double max_base_angle();
// Angles at or below this value are in the "flat" regime used by the neighbour-angle lemmas.
double flat_regime_angle();

enum class ScheduleKind { constant, aeps, geometric, power, table };

const char* to_string(ScheduleKind kind);

class AngleSchedule;

// A parametric schedule grafted below a table cell: cell (root.n + k, *) gets angle
// schedule.stage_theta(k + offset).
struct TableTail {
    DyadicIndex root;
    std::shared_ptr<const AngleSchedule> schedule;
    int offset = 0;
};

struct TableData {
    std::map<DyadicIndex, double> entries;
    std::vector<TableTail> tails;
};

// Rule assigning a base angle to every cap index. Validated eagerly on construction.
class AngleSchedule {
public:
    static AngleSchedule constant(double theta);
    static AngleSchedule aeps(double eps);
    static AngleSchedule geometric(double theta0, double ratio);
    static AngleSchedule power(double theta0, double p);
    static AngleSchedule table(TableData data);

    ScheduleKind kind() const { return kind_; }
    // Stage-uniform schedules assign one angle per stage (every kind except table).
    bool stage_uniform() const { return kind_ != ScheduleKind::table; }

    double theta(const DyadicIndex& idx) const;
    // Stage angle of a stage-uniform schedule.
    double stage_theta(int n) const;

    double param(const char* name) const;  // parametric parameters by name
    const TableData& table_data() const;
    // Tail covering idx (idx at or below the tail root), if any.
    const TableTail* tail_for(const DyadicIndex& idx) const;

    // {kind, params} echo used by every serialized output.
    nlohmann::json to_json() const;
    static AngleSchedule from_json(const nlohmann::json& j);
    // Grammar text for parametric kinds (tables render as "table").
    std::string describe() const;

private:
    ScheduleKind kind_ = ScheduleKind::constant;
    double a_ = 0.0;  // theta | eps | theta0
    double b_ = 0.0;  // ratio | p
    std::shared_ptr<const TableData> table_;
};

// Parses `const:theta=<f>` | `aeps:eps=<f>` | `geom:theta0=<f>,ratio=<f>` |
// `power:theta0=<f>,p=<f>` | `table:<path.json>`. Throws Error(parse) with the offending
// position, or Error(schedule) when the parsed values violate the invariants.
AngleSchedule parse_schedule(const std::string& text);

// Table document: {"entries":[{"n":..,"i":..,"theta":..}], "tails":[{"n":..,"i":..,
// "schedule":"<grammar>","offset":0}]}.
TableData table_from_json(const nlohmann::json& j);
nlohmann::json table_to_json(const TableData& t);

}  // namespace koch
