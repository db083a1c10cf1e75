#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "crashspot/types.hpp"

namespace crashspot {

// Maps the canonical record fields onto the input file's column names.
struct ColumnMap {
  std::string id = "id";
  std::string timestamp = "timestamp";
  std::string lon = "lon";
  std::string lat = "lat";
  std::string category = "category";
  std::string severity = "severity";
};

struct Rejection {
  std::size_t line = 0;  // physical line number, header is line 1
  std::string reason;
};

struct ParseResult {
  std::vector<EventRecord> events;
  std::vector<Rejection> rejections;
};

// Parses a delimited-text stream with a header row. Well-formed rows become
// EventRecords; malformed rows are collected as rejections with line number
// and reason, never silently dropped. Throws IoError when the stream is
// unreadable and SchemaError when a mapped column is missing from the header.
ParseResult parse_events(std::istream& source, const ColumnMap& columns, char delimiter = ',');

struct FilterResult {
  std::vector<EventRecord> kept;
  std::size_t removed = 0;
};

// Keeps events whose date lies in [window.start, window.end], inclusive.
FilterResult filter_window(std::span<const EventRecord> events, const StudyWindow& window);

// At most one record per id; first occurrence wins.
FilterResult dedupe(std::span<const EventRecord> events);

// Closed coordinate rings in lon/lat degrees; first ring outer, rest holes.
// Containment uses the even-odd rule, so disjoint polygons can simply
// concatenate their rings.
struct BoundaryPolygon {
  std::vector<std::vector<std::array<double, 2>>> rings;
};

// Validates ring closure/size and rejects a zero-area outer ring.
// Throws ConfigError on violations.
void validate_boundary(const BoundaryPolygon& boundary);

// Even-odd ray casting; a point exactly on an edge counts as inside.
bool point_in_boundary(double lon, double lat, const BoundaryPolygon& boundary);

// Keeps events inside the polygon (edges inclusive).
FilterResult spatial_filter(std::span<const EventRecord> events, const BoundaryPolygon& boundary);

// Loads rings from a GeoJSON Polygon, MultiPolygon, Feature, or
// FeatureCollection (all polygonal geometries are merged).
BoundaryPolygon load_boundary_geojson(const std::filesystem::path& path);

struct CategoryShare {
  Category category = Category::VehicleObject;
  std::uint64_t count = 0;
  double percent = 0.0;  // 100 * count / total, unrounded
};

// Per-category counts and percentages, ordered by descending count.
// Empty input yields an empty table.
std::vector<CategoryShare> subcategory_shares(std::span<const EventRecord> events);

}  // namespace crashspot
