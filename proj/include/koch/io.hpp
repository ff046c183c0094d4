#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "koch/construction.hpp"

namespace koch {

// Shortest-free, round-trip exact rendering: 17 significant digits ("%.17g").
std::string format_double(double v);

// JSON text with every floating-point number printed by format_double; non-finite numbers become
// null. Object keys keep nlohmann's sorted order, so equal documents give equal bytes.
std::string dump_json(const nlohmann::json& j, int indent = 2);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// Comma-separated, header row, LF line endings; numbers via format_double.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

struct PolylineDocument {
    nlohmann::json schedule;  // {kind, params}
    int depth = 0;
    Segment base;
    std::vector<Point2> vertices;
};

// {schedule: {kind, params}, depth, base: [[x,y],[x,y]], vertices: [[x,y],...]}
nlohmann::json polyline_to_json(const CapTree& tree, const Polyline& line);
// Throws Error(parse) on malformed documents.
PolylineDocument polyline_from_json(const nlohmann::json& j);

// Single-path SVG 1.1 document: viewBox fitted to the bounding box with a 5% margin, y flipped,
// stroke width 1px at the requested pixel width.
std::string render_svg(std::span<const Point2> vertices, int width_px);

}  // namespace koch
