#include "koch/schedule.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "koch/error.hpp"

namespace koch {

namespace {

constexpr double kAngleSlack = 1e-9;  // lets decimal literals of pi/6 through
constexpr double kMonotoneSlack = 1e-15;

void check_angle(double theta, const std::string& where) {
    if (!std::isfinite(theta) || theta < 0.0 || theta > max_base_angle() + kAngleSlack) {
        std::ostringstream os;
        os << "base angle " << theta << " at " << where << " outside [0, pi/6]";
        throw Error(ErrorKind::schedule, os.str());
    }
}

std::string index_label(const DyadicIndex& idx) {
    // Paper-facing labels are 1-based in the position.
    return "T(" + std::to_string(idx.n) + "," + std::to_string(idx.i + 1) + ")";
}

double parse_number(const std::string& text, const std::string& full, std::size_t pos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw Error(ErrorKind::parse, "schedule '" + full + "': invalid number '" + text + "' at column " +
                                          std::to_string(pos + 1));
    return v;
}

}  // namespace

void validate_index(const DyadicIndex& idx) {
    if (idx.n < 0 || idx.n > 62 || idx.i >= (std::uint64_t{1} << idx.n))
        throw Error(ErrorKind::invalid_argument, "dyadic index out of range: n=" + std::to_string(idx.n) +
                                                     " i=" + std::to_string(idx.i));
}

double max_base_angle() { return std::numbers::pi / 6.0; }
double flat_regime_angle() { return std::numbers::pi / 32.0; }

const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::aeps: return "aeps";
        case ScheduleKind::geometric: return "geometric";
        case ScheduleKind::power: return "power";
        case ScheduleKind::table: return "table";
    }
    return "unknown";
}

AngleSchedule AngleSchedule::constant(double theta) {
    check_angle(theta, "every cap");
    AngleSchedule s;
    s.kind_ = ScheduleKind::constant;
    s.a_ = theta;
    return s;
}

AngleSchedule AngleSchedule::aeps(double eps) {
    if (!std::isfinite(eps) || eps <= 0.0) throw Error(ErrorKind::schedule, "aeps requires eps > 0");
    AngleSchedule s;
    s.kind_ = ScheduleKind::aeps;
    s.a_ = eps;
    check_angle(s.stage_theta(0), "stage 0");
    return s;
}

AngleSchedule AngleSchedule::geometric(double theta0, double ratio) {
    check_angle(theta0, "stage 0");
    if (!std::isfinite(ratio) || ratio <= 0.0 || ratio >= 1.0)
        throw Error(ErrorKind::schedule, "geometric ratio must lie in (0, 1)");
    AngleSchedule s;
    s.kind_ = ScheduleKind::geometric;
    s.a_ = theta0;
    s.b_ = ratio;
    return s;
}

AngleSchedule AngleSchedule::power(double theta0, double p) {
    check_angle(theta0, "stage 0");
    if (!std::isfinite(p) || p <= 0.0) throw Error(ErrorKind::schedule, "power exponent must be > 0");
    AngleSchedule s;
    s.kind_ = ScheduleKind::power;
    s.a_ = theta0;
    s.b_ = p;
    return s;
}

AngleSchedule AngleSchedule::table(TableData data) {
    for (const auto& [idx, theta] : data.entries) {
        validate_index(idx);
        check_angle(theta, index_label(idx));
    }
    for (const auto& tail : data.tails) {
        validate_index(tail.root);
        if (!tail.schedule || !tail.schedule->stage_uniform())
            throw Error(ErrorKind::schedule, "table tails must be parametric schedules");
        if (tail.offset < 0) throw Error(ErrorKind::schedule, "table tail offset must be >= 0");
        for (const auto& other : data.tails)
            if (&other != &tail && tail.root.is_descendant_of(other.root))
                throw Error(ErrorKind::schedule, "nested table tails at " + index_label(tail.root));
        for (const auto& [idx, theta] : data.entries)
            if (idx.is_descendant_of(tail.root))
                throw Error(ErrorKind::schedule, "explicit entry " + index_label(idx) + " inside a declared tail");
    }
    AngleSchedule s;
    s.kind_ = ScheduleKind::table;
    s.table_ = std::make_shared<const TableData>(std::move(data));

    // Monotonicity along descent wherever both parent and child are declared.
    auto declared = [&](const DyadicIndex& idx) -> std::optional<double> {
        if (auto it = s.table_->entries.find(idx); it != s.table_->entries.end()) return it->second;
        if (s.tail_for(idx)) return s.theta(idx);
        return std::nullopt;
    };
    auto check_child = [&](const DyadicIndex& child) {
        if (child.n == 0) return;
        const auto parent = declared(child.parent());
        const auto mine = declared(child);
        if (parent && mine && *mine > *parent + kMonotoneSlack)
            throw Error(ErrorKind::schedule, "angle increases from " + index_label(child.parent()) + " to " +
                                                 index_label(child));
    };
    for (const auto& [idx, theta] : s.table_->entries) check_child(idx);
    for (const auto& tail : s.table_->tails) check_child(tail.root);
    return s;
}

double AngleSchedule::stage_theta(int n) const {
    if (n < 0) throw Error(ErrorKind::invalid_argument, "negative stage");
    const double k = static_cast<double>(n);
    switch (kind_) {
        case ScheduleKind::constant: return a_;
        case ScheduleKind::aeps: return std::atan(4.0 * a_ / std::sqrt(1.0 + 16.0 * k * a_ * a_));
        case ScheduleKind::geometric: return a_ * std::pow(b_, k);
        case ScheduleKind::power: return a_ * std::pow(k + 1.0, -b_);
        case ScheduleKind::table: break;
    }
    throw Error(ErrorKind::mismatch, "stage angle requested from a table schedule");
}

const TableTail* AngleSchedule::tail_for(const DyadicIndex& idx) const {
    if (!table_) return nullptr;
    for (const auto& tail : table_->tails)
        if (idx.is_descendant_of(tail.root)) return &tail;
    return nullptr;
}

double AngleSchedule::theta(const DyadicIndex& idx) const {
    if (stage_uniform()) return stage_theta(idx.n);
    if (auto it = table_->entries.find(idx); it != table_->entries.end()) return it->second;
    if (const TableTail* tail = tail_for(idx)) return tail->schedule->stage_theta(idx.n - tail->root.n + tail->offset);
    throw Error(ErrorKind::schedule, "table schedule declares no angle for " + index_label(idx));
}

double AngleSchedule::param(const char* name) const {
    const std::string k = name;
    switch (kind_) {
        case ScheduleKind::constant: if (k == "theta") return a_; break;
        case ScheduleKind::aeps: if (k == "eps") return a_; break;
        case ScheduleKind::geometric:
            if (k == "theta0") return a_;
            if (k == "ratio") return b_;
            break;
        case ScheduleKind::power:
            if (k == "theta0") return a_;
            if (k == "p") return b_;
            break;
        case ScheduleKind::table: break;
    }
    throw Error(ErrorKind::invalid_argument, std::string("schedule has no parameter '") + name + "'");
}

const TableData& AngleSchedule::table_data() const {
    if (!table_) throw Error(ErrorKind::mismatch, "not a table schedule");
    return *table_;
}

nlohmann::json AngleSchedule::to_json() const {
    nlohmann::json params;
    switch (kind_) {
        case ScheduleKind::constant: params = {{"theta", a_}}; break;
        case ScheduleKind::aeps: params = {{"eps", a_}}; break;
        case ScheduleKind::geometric: params = {{"theta0", a_}, {"ratio", b_}}; break;
        case ScheduleKind::power: params = {{"theta0", a_}, {"p", b_}}; break;
        case ScheduleKind::table: params = table_to_json(*table_); break;
    }
    return {{"kind", to_string(kind_)}, {"params", params}};
}

AngleSchedule AngleSchedule::from_json(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const auto& p = j.at("params");
        if (kind == "constant") return constant(p.at("theta").get<double>());
        if (kind == "aeps") return aeps(p.at("eps").get<double>());
        if (kind == "geometric") return geometric(p.at("theta0").get<double>(), p.at("ratio").get<double>());
        if (kind == "power") return power(p.at("theta0").get<double>(), p.at("p").get<double>());
        if (kind == "table") return table(table_from_json(p));
        throw Error(ErrorKind::parse, "unknown schedule kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("malformed schedule object: ") + e.what());
    }
}

std::string AngleSchedule::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case ScheduleKind::constant: os << "const:theta=" << a_; break;
        case ScheduleKind::aeps: os << "aeps:eps=" << a_; break;
        case ScheduleKind::geometric: os << "geom:theta0=" << a_ << ",ratio=" << b_; break;
        case ScheduleKind::power: os << "power:theta0=" << a_ << ",p=" << b_; break;
        case ScheduleKind::table: os << "table"; break;
    }
    return os.str();
}

TableData table_from_json(const nlohmann::json& j) {
    TableData t;
    try {
        if (j.contains("entries"))
            for (const auto& e : j.at("entries"))
                t.entries[DyadicIndex{e.at("n").get<int>(), e.at("i").get<std::uint64_t>()}] = e.at("theta").get<double>();
        if (j.contains("tails"))
            for (const auto& e : j.at("tails")) {
                TableTail tail;
                tail.root = DyadicIndex{e.at("n").get<int>(), e.at("i").get<std::uint64_t>()};
                const auto& s = e.at("schedule");
                tail.schedule = std::make_shared<const AngleSchedule>(
                    s.is_string() ? parse_schedule(s.get<std::string>()) : AngleSchedule::from_json(s));
                tail.offset = e.value("offset", 0);
                t.tails.push_back(tail);
            }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("malformed table schedule: ") + e.what());
    }
    if (t.entries.empty() && t.tails.empty()) throw Error(ErrorKind::parse, "table schedule declares nothing");
    return t;
}

nlohmann::json table_to_json(const TableData& t) {
    nlohmann::json entries = nlohmann::json::array(), tails = nlohmann::json::array();
    for (const auto& [idx, theta] : t.entries) entries.push_back({{"n", idx.n}, {"i", idx.i}, {"theta", theta}});
    for (const auto& tail : t.tails)
        tails.push_back({{"n", tail.root.n}, {"i", tail.root.i}, {"schedule", tail.schedule->to_json()},
                         {"offset", tail.offset}});
    return {{"entries", entries}, {"tails", tails}};
}

AngleSchedule parse_schedule(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorKind::parse, "schedule '" + text + "': expected '<kind>:<params>' (missing ':')");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);

    if (kind == "table") {
        if (rest.empty()) throw Error(ErrorKind::parse, "schedule '" + text + "': missing table path");
        std::ifstream in(rest);
        if (!in) throw Error(ErrorKind::parse, "schedule '" + text + "': cannot open '" + rest + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse, "table file '" + rest + "': " + e.what());
        }
        return AngleSchedule::table(table_from_json(j));
    }

    // key=value pairs separated by commas; every key must be present exactly once.
    std::map<std::string, double> kv;
    std::size_t pos = colon + 1;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, end - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorKind::parse, "schedule '" + text + "': expected key=value at column " + std::to_string(pos + 1));
        const std::string key = item.substr(0, eq);
        if (kv.count(key)) throw Error(ErrorKind::parse, "schedule '" + text + "': duplicate key '" + key + "'");
        kv[key] = parse_number(item.substr(eq + 1), text, pos + eq + 1);
        pos = end + 1;
    }
    auto take = [&](std::initializer_list<const char*> keys) {
        if (kv.size() != keys.size())
            throw Error(ErrorKind::parse, "schedule '" + text + "': wrong parameter set for kind '" + kind + "'");
        std::vector<double> v;
        for (const char* k : keys) {
            auto it = kv.find(k);
            if (it == kv.end()) throw Error(ErrorKind::parse, "schedule '" + text + "': missing parameter '" + k + "'");
            v.push_back(it->second);
        }
        return v;
    };
    if (kind == "const") return AngleSchedule::constant(take({"theta"})[0]);
    if (kind == "aeps") return AngleSchedule::aeps(take({"eps"})[0]);
    if (kind == "geom") {
        const auto v = take({"theta0", "ratio"});
        return AngleSchedule::geometric(v[0], v[1]);
    }
    if (kind == "power") {
        const auto v = take({"theta0", "p"});
        return AngleSchedule::power(v[0], v[1]);
    }
    throw Error(ErrorKind::parse, "schedule '" + text + "': unknown kind '" + kind + "' at column 1");
}

}  // namespace koch
