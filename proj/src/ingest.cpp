#include "crashspot/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "crashspot/csv.hpp"

namespace crashspot {

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double ring_area(const std::vector<std::array<double, 2>>& ring) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    acc += ring[i][0] * ring[i + 1][1] - ring[i + 1][0] * ring[i][1];
  }
  return 0.5 * acc;
}

bool on_segment(double px, double py, const std::array<double, 2>& a,
                const std::array<double, 2>& b) {
  const double cross = (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
  if (cross != 0.0) return false;
  return px >= std::min(a[0], b[0]) && px <= std::max(a[0], b[0]) &&
         py >= std::min(a[1], b[1]) && py <= std::max(a[1], b[1]);
}

std::vector<std::array<double, 2>> read_ring(const nlohmann::json& coords) {
  std::vector<std::array<double, 2>> ring;
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2) {
      throw ConfigError("boundary GeoJSON: ring position must be [lon, lat]");
    }
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

void collect_geometry(const nlohmann::json& geom, BoundaryPolygon& out) {
  if (!geom.is_object() || !geom.contains("type")) return;
  const std::string type = geom["type"].get<std::string>();
  if (type == "Polygon") {
    for (const auto& ring : geom.at("coordinates")) out.rings.push_back(read_ring(ring));
  } else if (type == "MultiPolygon") {
    for (const auto& poly : geom.at("coordinates")) {
      for (const auto& ring : poly) out.rings.push_back(read_ring(ring));
    }
  } else if (type == "Feature") {
    if (geom.contains("geometry")) collect_geometry(geom["geometry"], out);
  } else if (type == "FeatureCollection") {
    for (const auto& feature : geom.at("features")) collect_geometry(feature, out);
  }
}

}  // namespace

ParseResult parse_events(std::istream& source, const ColumnMap& columns, char delimiter) {
  if (!source.good()) {
    throw IoError("event source stream is not readable");
  }
  CsvReader reader(source, delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields)) {
    throw IoError("event source is empty: no header row");
  }
  const std::map<std::string, int> mapping = {
      {"id", find_column(fields, columns.id)},
      {"timestamp", find_column(fields, columns.timestamp)},
      {"lon", find_column(fields, columns.lon)},
      {"lat", find_column(fields, columns.lat)},
      {"category", find_column(fields, columns.category)},
      {"severity", find_column(fields, columns.severity)},
  };
  for (const auto& [field, index] : mapping) {
    if (index < 0) {
      throw SchemaError("mapped column for '" + field + "' not found in header");
    }
  }
  const int max_index = std::max({mapping.at("id"), mapping.at("timestamp"), mapping.at("lon"),
                                  mapping.at("lat"), mapping.at("category"),
                                  mapping.at("severity")});

  ParseResult result;
  while (reader.next(fields)) {
    const std::size_t line = reader.line_number();
    auto reject = [&](std::string reason) {
      result.rejections.push_back({line, std::move(reason)});
    };
    if (static_cast<int>(fields.size()) <= max_index) {
      reject("too few fields");
      continue;
    }
    EventRecord e;
    e.id = fields[static_cast<std::size_t>(mapping.at("id"))];
    if (e.id.empty()) {
      reject("empty id");
      continue;
    }
    const auto ts = parse_datetime(fields[static_cast<std::size_t>(mapping.at("timestamp"))]);
    if (!ts) {
      reject("unparseable timestamp");
      continue;
    }
    e.timestamp = *ts;
    if (!parse_double(fields[static_cast<std::size_t>(mapping.at("lon"))], e.lon)) {
      reject("unparseable longitude");
      continue;
    }
    if (!parse_double(fields[static_cast<std::size_t>(mapping.at("lat"))], e.lat)) {
      reject("unparseable latitude");
      continue;
    }
    if (e.lon < -180.0 || e.lon > 180.0) {
      reject("longitude out of range");
      continue;
    }
    if (e.lat < -90.0 || e.lat > 90.0) {
      reject("latitude out of range");
      continue;
    }
    const auto cat = category_from_string(fields[static_cast<std::size_t>(mapping.at("category"))]);
    if (!cat) {
      reject("unknown category");
      continue;
    }
    e.category = *cat;
    const auto sev = severity_from_string(fields[static_cast<std::size_t>(mapping.at("severity"))]);
    if (!sev) {
      reject("unknown severity");
      continue;
    }
    e.severity = *sev;
    result.events.push_back(std::move(e));
  }
  return result;
}

FilterResult filter_window(std::span<const EventRecord> events, const StudyWindow& window) {
  FilterResult result;
  result.kept.reserve(events.size());
  for (const auto& e : events) {
    if (window.contains(e.timestamp.date)) {
      result.kept.push_back(e);
    } else {
      ++result.removed;
    }
  }
  return result;
}

FilterResult dedupe(std::span<const EventRecord> events) {
  FilterResult result;
  result.kept.reserve(events.size());
  std::unordered_set<std::string> seen;
  seen.reserve(events.size());
  for (const auto& e : events) {
    if (seen.insert(e.id).second) {
      result.kept.push_back(e);
    } else {
      ++result.removed;
    }
  }
  return result;
}

void validate_boundary(const BoundaryPolygon& boundary) {
  if (boundary.rings.empty()) {
    throw ConfigError("boundary polygon has no rings");
  }
  for (const auto& ring : boundary.rings) {
    if (ring.size() < 4) {
      throw ConfigError("boundary ring must have at least 4 vertices");
    }
    if (ring.front() != ring.back()) {
      throw ConfigError("boundary ring must be closed (first vertex == last)");
    }
  }
  if (ring_area(boundary.rings.front()) == 0.0) {
    throw ConfigError("boundary outer ring has zero area");
  }
}

bool point_in_boundary(double lon, double lat, const BoundaryPolygon& boundary) {
  bool inside = false;
  for (const auto& ring : boundary.rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const auto& a = ring[i];
      const auto& b = ring[i + 1];
      if (on_segment(lon, lat, a, b)) return true;
      if ((a[1] > lat) != (b[1] > lat)) {
        const double x_int = a[0] + (lat - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
        if (lon < x_int) inside = !inside;
      }
    }
  }
  return inside;
}

FilterResult spatial_filter(std::span<const EventRecord> events,
                            const BoundaryPolygon& boundary) {
  validate_boundary(boundary);
  FilterResult result;
  result.kept.reserve(events.size());
  for (const auto& e : events) {
    if (point_in_boundary(e.lon, e.lat, boundary)) {
      result.kept.push_back(e);
    } else {
      ++result.removed;
    }
  }
  return result;
}

BoundaryPolygon load_boundary_geojson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open boundary file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("boundary file is not valid JSON: " + std::string(e.what()));
  }
  BoundaryPolygon boundary;
  collect_geometry(doc, boundary);
  if (boundary.rings.empty()) {
    throw ConfigError("boundary file contains no Polygon or MultiPolygon geometry");
  }
  validate_boundary(boundary);
  return boundary;
}

std::vector<CategoryShare> subcategory_shares(std::span<const EventRecord> events) {
  if (events.empty()) return {};
  std::array<std::uint64_t, kCategoryCount> counts{};
  for (const auto& e : events) ++counts[static_cast<std::size_t>(e.category)];
  std::vector<CategoryShare> shares;
  const double total = static_cast<double>(events.size());
  for (int c = 0; c < kCategoryCount; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) continue;
    CategoryShare s;
    s.category = static_cast<Category>(c);
    s.count = counts[static_cast<std::size_t>(c)];
    s.percent = 100.0 * static_cast<double>(s.count) / total;
    shares.push_back(s);
  }
  std::sort(shares.begin(), shares.end(), [](const CategoryShare& a, const CategoryShare& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.category < b.category;
  });
  return shares;
}

}  // namespace crashspot
