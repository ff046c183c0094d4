#include "koch/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "koch/error.hpp"

namespace koch {

namespace {

void dump_value(const nlohmann::json& j, int indent, int level, std::string& out) {
    const auto newline = [&](int lvl) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * lvl), ' ');
    };
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(level + 1);
                out += nlohmann::json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_value(it.value(), indent, level + 1, out);
            }
            newline(level);
            out += '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Short numeric arrays (points, pairs) stay on one line.
            const bool inline_array = j.size() <= 2 && std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_number(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += (inline_array && indent >= 0) ? ", " : ",";
                first = false;
                if (!inline_array) newline(level + 1);
                dump_value(e, indent, level + 1, out);
            }
            if (!inline_array) newline(level);
            out += ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    dump_value(j, indent, 0, out);
    out += '\n';
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::invalid_argument, "cannot open " + tmp.string() + " for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorKind::invalid_argument, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::invalid_argument, "cannot move output into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::parse, "cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            const double v = row[k];
            // Integral values (stages, counts) print without an exponent or fraction.
            if (v == std::floor(v) && std::abs(v) < 1e15) out += std::to_string(static_cast<long long>(v));
            else out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

nlohmann::json point_json(Point2 p) { return nlohmann::json::array({p.x, p.y}); }

Point2 point_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorKind::parse, "point must be an [x, y] number pair");
    const Point2 p{j[0].get<double>(), j[1].get<double>()};
    if (!is_finite(p)) throw Error(ErrorKind::parse, "point coordinates must be finite");
    return p;
}

}  // namespace

nlohmann::json polyline_to_json(const CapTree& tree, const Polyline& line) {
    nlohmann::json vertices = nlohmann::json::array();
    for (const Point2& p : line.vertices) vertices.push_back(point_json(p));
    return {{"schedule", tree.schedule().to_json()},
            {"depth", line.stage},
            {"base", nlohmann::json::array({point_json(tree.base().a), point_json(tree.base().b)})},
            {"vertices", vertices}};
}

PolylineDocument polyline_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::parse, "polyline document must be a JSON object");
    PolylineDocument d;
    try {
        d.schedule = j.at("schedule");
        d.depth = j.at("depth").get<int>();
        const auto& base = j.at("base");
        if (!base.is_array() || base.size() != 2) throw Error(ErrorKind::parse, "base must hold two points");
        d.base = {point_from(base[0]), point_from(base[1])};
        for (const auto& v : j.at("vertices")) d.vertices.push_back(point_from(v));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("malformed polyline document: ") + e.what());
    }
    if (d.vertices.size() < 2) throw Error(ErrorKind::parse, "polyline needs at least two vertices");
    return d;
}

std::string render_svg(std::span<const Point2> vertices, int width_px) {
    if (vertices.size() < 2) throw Error(ErrorKind::invalid_argument, "render needs at least two vertices");
    if (width_px <= 0) throw Error(ErrorKind::invalid_argument, "render width must be positive");
    double minx = vertices[0].x, maxx = minx, miny = vertices[0].y, maxy = miny;
    for (const Point2& p : vertices) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    const double span = std::max({maxx - minx, maxy - miny, 1e-12});
    const double margin = 0.05 * span;
    const double vx = minx - margin, vw = (maxx - minx) + 2 * margin;
    const double vy = -maxy - margin, vh = (maxy - miny) + 2 * margin;  // y flipped
    const double height_px = width_px * vh / vw;
    const double stroke = vw / width_px;  // 1px in user units

    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width_px) +
           "\" height=\"" + format_double(height_px) + "\" viewBox=\"" + format_double(vx) + " " + format_double(vy) + " " +
           format_double(vw) + " " + format_double(vh) + "\">\n";
    out += "<path fill=\"none\" stroke=\"black\" stroke-width=\"" + format_double(stroke) + "\" d=\"";
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        out += k == 0 ? "M" : " L";
        out += format_double(vertices[k].x) + " " + format_double(-vertices[k].y);
    }
    out += "\"/>\n</svg>\n";
    return out;
}

}  // namespace koch
