#include "crashspot/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "crashspot/csv.hpp"
#include "crashspot/hotspot.hpp"
#include "crashspot/synth.hpp"

namespace crashspot::pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes everywhere
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path not configured");
  if (!fs::exists(path)) {
    throw ConfigError(std::string(what) + " does not exist: " + path.string());
  }
}

StudyWindow parse_window(const json& w) {
  const auto start = parse_date(w.at("start").get<std::string>());
  const auto end = parse_date(w.at("end").get<std::string>());
  if (!start || !end) throw ConfigError("config window: dates must be YYYY-MM-DD");
  std::set<CivilDate> missing;
  if (w.contains("missing")) {
    for (const auto& m : w["missing"]) {
      const auto d = parse_date(m.get<std::string>());
      if (!d) throw ConfigError("config window: bad missing date");
      missing.insert(*d);
    }
  }
  return StudyWindow(*start, *end, std::move(missing));
}

json window_to_json(const StudyWindow& w) {
  json out;
  out["start"] = format_date(w.start());
  out["end"] = format_date(w.end());
  json missing = json::array();
  for (const auto& d : w.missing_dates()) missing.push_back(format_date(d));
  out["missing"] = missing;
  return out;
}

void echo_config(const RunConfig& config) {
  json doc;
  doc["input"] = config.input.string();
  doc["boundary"] = config.boundary.string();
  doc["out"] = config.out.string();
  doc["scenario"] = config.scenario.string();
  doc["delimiter"] = std::string(1, config.delimiter);
  doc["columns"] = {{"id", config.columns.id},       {"timestamp", config.columns.timestamp},
                    {"lon", config.columns.lon},     {"lat", config.columns.lat},
                    {"category", config.columns.category}, {"severity", config.columns.severity}};
  if (config.window) doc["window"] = window_to_json(*config.window);
  json factors = json::array();
  for (FactorKind f : config.factors) factors.push_back(std::string(to_string(f)));
  doc["factors"] = factors;
  doc["category_filter"] = config.category_filter;
  doc["cell_size_m"] = config.cell_size_m;
  doc["band_m"] = config.band_m;
  doc["idw"]["power"] = config.idw.power;
  doc["idw"]["neighbors"] = config.idw.neighbors;
  if (std::isfinite(config.idw.max_search_radius)) {
    doc["idw"]["max_radius_m"] = config.idw.max_search_radius;
  } else {
    doc["idw"]["max_radius_m"] = nullptr;
  }
  doc["idw"]["raster_cell_m"] = config.raster_cell_m;
  doc["fdr"] = config.fdr;
  if (config.seed_override) doc["seed"] = *config.seed_override;
  auto out = open_output(config.out / files::kConfigEcho);
  out << doc.dump(2) << "\n";
}

void ensure_out_dir(const RunConfig& config) {
  if (config.out.empty()) throw ConfigError("output directory not configured");
  fs::create_directories(config.out);
  echo_config(config);
}

std::optional<Category> filter_category(const RunConfig& config) {
  if (config.category_filter.empty() || config.category_filter == "all") return std::nullopt;
  const auto cat = category_from_string(config.category_filter);
  if (!cat) throw ConfigError("unknown category filter: " + config.category_filter);
  return cat;
}

std::string render_p(double p) {
  if (p < 0.001) return "<0.001";
  return fmt("%.3f", p);
}

}  // namespace

std::string files::temporal_table(FactorKind factor) {
  return "temporal_" + std::string(to_string(factor)) + ".csv";
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  RunConfig config;
  try {
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
      const fs::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    if (doc.contains("input")) config.input = resolve(doc["input"].get<std::string>());
    if (doc.contains("boundary")) config.boundary = resolve(doc["boundary"].get<std::string>());
    if (doc.contains("out")) config.out = resolve(doc["out"].get<std::string>());
    if (doc.contains("scenario")) config.scenario = resolve(doc["scenario"].get<std::string>());
    if (doc.contains("delimiter")) {
      const auto d = doc["delimiter"].get<std::string>();
      if (d.size() != 1) throw ConfigError("delimiter must be a single character");
      config.delimiter = d[0];
    }
    if (doc.contains("columns")) {
      const auto& c = doc["columns"];
      config.columns.id = c.value("id", config.columns.id);
      config.columns.timestamp = c.value("timestamp", config.columns.timestamp);
      config.columns.lon = c.value("lon", config.columns.lon);
      config.columns.lat = c.value("lat", config.columns.lat);
      config.columns.category = c.value("category", config.columns.category);
      config.columns.severity = c.value("severity", config.columns.severity);
    }
    if (doc.contains("window")) config.window = parse_window(doc["window"]);
    if (doc.contains("factors")) {
      config.factors.clear();
      for (const auto& f : doc["factors"]) {
        const auto kind = factor_from_string(f.get<std::string>());
        if (!kind) throw ConfigError("unknown factor: " + f.get<std::string>());
        config.factors.push_back(*kind);
      }
    }
    config.category_filter = doc.value("category_filter", config.category_filter);
    config.cell_size_m = doc.value("cell_size_m", config.cell_size_m);
    config.band_m = doc.value("band_m", config.band_m);
    if (doc.contains("idw")) {
      const auto& i = doc["idw"];
      config.idw.power = i.value("power", config.idw.power);
      config.idw.neighbors = i.value("neighbors", config.idw.neighbors);
      if (i.contains("max_radius_m") && !i["max_radius_m"].is_null()) {
        config.idw.max_search_radius = i["max_radius_m"].get<double>();
      }
      if (i.contains("raster_cell_m") && !i["raster_cell_m"].is_null()) {
        config.raster_cell_m = i["raster_cell_m"].get<double>();
      }
    }
    config.fdr = doc.value("fdr", false);
    if (doc.contains("seed")) config.seed_override = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("config file: " + std::string(e.what()));
  }
  if (config.cell_size_m <= 0.0) throw ConfigError("cell_size_m must be positive");
  if (config.band_m <= 0.0) throw ConfigError("band_m must be positive");
  return config;
}

void write_events_csv(const fs::path& path, std::span<const EventRecord> events,
                      char delimiter) {
  auto out = open_output(path);
  const std::vector<std::string> header = {"id", "timestamp", "lon", "lat", "category",
                                           "severity"};
  out << join_csv(header, delimiter) << "\n";
  for (const auto& e : events) {
    const std::vector<std::string> row = {
        e.id,
        format_datetime(e.timestamp),
        fmt("%.7f", e.lon),
        fmt("%.7f", e.lat),
        std::string(to_string(e.category)),
        std::string(to_string(e.severity)),
    };
    out << join_csv(row, delimiter) << "\n";
  }
}

std::vector<EventRecord> read_cleaned_events(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cleaned dataset: " + path.string());
  ParseResult result = parse_events(in, ColumnMap{});
  if (!result.rejections.empty()) {
    throw DataError("cleaned dataset has malformed rows: " + path.string());
  }
  return std::move(result.events);
}

std::size_t cmd_synth(const RunConfig& config) {
  require_file(config.scenario, "scenario");
  ensure_out_dir(config);
  synth::SynthScenario scenario = synth::load_scenario(config.scenario);
  if (config.seed_override) scenario.seed = *config.seed_override;
  const auto events = synth::generate(scenario);
  write_events_csv(config.out / files::kSyntheticEvents, events, config.delimiter);
  return events.size();
}

ValidateSummary cmd_validate(const RunConfig& config) {
  require_file(config.input, "input");
  if (!config.window) throw ConfigError("validate requires a study window");
  ensure_out_dir(config);

  std::ifstream in(config.input, std::ios::binary);
  if (!in) throw IoError("cannot open input: " + config.input.string());
  ParseResult parsed = parse_events(in, config.columns, config.delimiter);

  ValidateSummary summary;
  summary.input_rows = parsed.events.size() + parsed.rejections.size();
  summary.parse_rejected = parsed.rejections.size();

  FilterResult windowed = filter_window(parsed.events, *config.window);
  summary.window_removed = windowed.removed;
  FilterResult unique = dedupe(windowed.kept);
  summary.duplicates_removed = unique.removed;

  std::vector<EventRecord> cleaned;
  if (!config.boundary.empty()) {
    require_file(config.boundary, "boundary");
    const BoundaryPolygon boundary = load_boundary_geojson(config.boundary);
    FilterResult inside = spatial_filter(unique.kept, boundary);
    summary.outside_boundary_removed = inside.removed;
    cleaned = std::move(inside.kept);
  } else {
    cleaned = std::move(unique.kept);
  }

  if (const auto cat = filter_category(config)) {
    std::vector<EventRecord> filtered;
    filtered.reserve(cleaned.size());
    for (auto& e : cleaned) {
      if (e.category == *cat) filtered.push_back(std::move(e));
    }
    summary.category_removed = cleaned.size() - filtered.size();
    cleaned = std::move(filtered);
  }
  summary.retained = cleaned.size();

  // Cleaned output is always the canonical comma-delimited schema so the
  // downstream stages can read it regardless of the input's delimiter.
  write_events_csv(config.out / files::kCleaned, cleaned);

  {
    auto out = open_output(config.out / files::kRejections);
    out << "line,reason\n";
    for (const auto& r : parsed.rejections) {
      out << r.line << "," << csv_escape(r.reason, ',') << "\n";
    }
  }
  {
    json doc;
    doc["input_rows"] = summary.input_rows;
    doc["parse_rejected"] = summary.parse_rejected;
    doc["window_removed"] = summary.window_removed;
    doc["duplicates_removed"] = summary.duplicates_removed;
    doc["outside_boundary_removed"] = summary.outside_boundary_removed;
    doc["category_removed"] = summary.category_removed;
    doc["retained"] = summary.retained;
    auto out = open_output(config.out / files::kValidateSummary);
    out << doc.dump(2) << "\n";
  }
  {
    auto out = open_output(config.out / files::kSubcategoryShares);
    out << "category,count,percent\n";
    for (const auto& s : subcategory_shares(cleaned)) {
      out << to_string(s.category) << "," << s.count << "," << fmt("%.2f", s.percent) << "\n";
    }
  }
  return summary;
}

void cmd_temporal(const RunConfig& config) {
  if (!config.window) throw ConfigError("temporal analysis requires a study window");
  ensure_out_dir(config);
  const fs::path cleaned_path = config.out / files::kCleaned;
  require_file(cleaned_path, "cleaned dataset (run validate first)");
  const auto events = read_cleaned_events(cleaned_path);
  if (events.empty()) throw DataError("cleaned dataset is empty");
  const StudyWindow& window = *config.window;

  auto stats = open_output(config.out / files::kTemporalStats);
  stats << "factor,chi2,df,p_value,cramers_v,n\n";
  for (FactorKind factor : config.factors) {
    const auto shares = severity_share_by_bin(events, factor, &window);
    {
      auto table = open_output(config.out / files::temporal_table(factor));
      table << "category,n_low,n_high,percent_high\n";
      for (const auto& s : shares) {
        table << csv_escape(s.label, ',') << "," << s.n_low << "," << s.n_high << ",";
        if (s.percent_high) table << fmt("%.2f", *s.percent_high);
        table << "\n";
      }
    }
    try {
      const ChiSquareReport report = chi_square(build_table(events, factor, &window));
      stats << to_string(factor) << "," << fmt("%.4f", report.chi2) << "," << report.df << ","
            << fmt("%.6g", report.p_value) << "," << fmt("%.4f", report.cramers_v) << ","
            << report.n << "\n";
    } catch (const DataError& e) {
      std::cerr << "warning: factor " << to_string(factor) << ": " << e.what() << "\n";
      stats << to_string(factor) << ",,,,," << events.size() << "\n";
    }
  }

  json doc;
  doc["n_events"] = events.size();
  doc["observed_days"] = window.observed_days();
  doc["daily_mean"] = daily_mean(events.size(), window);
  const auto ratio = severity_risk_ratio(events, Period::Night, Period::Afternoon);
  if (ratio) {
    doc["night_vs_afternoon_high_severity_ratio"] = *ratio;
  } else {
    doc["night_vs_afternoon_high_severity_ratio"] = nullptr;
  }
  auto out = open_output(config.out / files::kTemporalSummary);
  out << doc.dump(2) << "\n";
}

namespace {

HotspotOutput run_hotspot(const RunConfig& config, const std::vector<EventRecord>& events) {
  if (config.band_m < config.cell_size_m) {
    std::cerr << "warning: band " << config.band_m << " m is below the cell size "
              << config.cell_size_m << " m; cells may have only themselves as neighbor\n";
  }
  return hotspot_pipeline(events, config.cell_size_m, config.band_m, config.fdr);
}

json cell_polygon(const GridSpec& grid, const Projection& proj, const CellIndex& c) {
  const double x0 = grid.origin.x + c.col * grid.cell_size;
  const double y0 = grid.origin.y + c.row * grid.cell_size;
  const double x1 = x0 + grid.cell_size;
  const double y1 = y0 + grid.cell_size;
  json ring = json::array();
  for (const auto& [px, py] : {std::pair{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}) {
    const LonLat ll = proj.to_lonlat({px, py});
    ring.push_back(json::array({ll.lon, ll.lat}));
  }
  json coords = json::array();
  coords.push_back(ring);
  return coords;
}

}  // namespace

void cmd_hotspot(const RunConfig& config) {
  ensure_out_dir(config);
  const fs::path cleaned_path = config.out / files::kCleaned;
  require_file(cleaned_path, "cleaned dataset (run validate first)");
  const auto events = read_cleaned_events(cleaned_path);
  const HotspotOutput result = run_hotspot(config, events);
  const GridSpec& grid = result.cells.spec;

  {
    auto out = open_output(config.out / files::kHotspotCells);
    out << "col,row,center_lon,center_lat,x,n_events,z,p,class\n";
    for (int idx = 0; idx < grid.cell_count(); ++idx) {
      const CellIndex c = grid.from_linear(idx);
      const LonLat center = result.projection.to_lonlat(grid.cell_center(c));
      const auto i = static_cast<std::size_t>(idx);
      out << c.col << "," << c.row << "," << fmt("%.7f", center.lon) << ","
          << fmt("%.7f", center.lat) << "," << fmt("%.1f", result.cells.x[i]) << ","
          << result.cells.n_events[i] << "," << fmt("%.6f", result.gi.z[i]) << ","
          << fmt("%.6g", result.gi.p[i]) << "," << to_string(result.gi.cls[i]) << "\n";
    }
  }
  {
    json fc;
    fc["type"] = "FeatureCollection";
    json features = json::array();
    for (int idx = 0; idx < grid.cell_count(); ++idx) {
      const CellIndex c = grid.from_linear(idx);
      const auto i = static_cast<std::size_t>(idx);
      json feature;
      feature["type"] = "Feature";
      feature["geometry"]["type"] = "Polygon";
      feature["geometry"]["coordinates"] = cell_polygon(grid, result.projection, c);
      feature["properties"] = {{"col", c.col},
                               {"row", c.row},
                               {"x", result.cells.x[i]},
                               {"n_events", result.cells.n_events[i]},
                               {"z", result.gi.z[i]},
                               {"p", result.gi.p[i]},
                               {"class", std::string(to_string(result.gi.cls[i]))}};
      features.push_back(std::move(feature));
    }
    fc["features"] = std::move(features);
    auto out = open_output(config.out / files::kHotspotGeojson);
    out << fc.dump(2) << "\n";
  }
}

void cmd_idw(const RunConfig& config) {
  ensure_out_dir(config);
  const fs::path cleaned_path = config.out / files::kCleaned;
  require_file(cleaned_path, "cleaned dataset (run validate first)");
  const auto events = read_cleaned_events(cleaned_path);
  const HotspotOutput result = run_hotspot(config, events);
  const GridSpec& grid = result.cells.spec;

  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (int idx = 0; idx < grid.cell_count(); ++idx) {
    samples.push_back(
        {grid.cell_center(grid.from_linear(idx)), result.gi.z[static_cast<std::size_t>(idx)]});
  }

  double raster_cell = config.raster_cell_m > 0.0 ? config.raster_cell_m
                                                  : config.cell_size_m / 4.0;
  GridSpec raster_spec;
  raster_spec.origin = grid.origin;
  raster_spec.cell_size = raster_cell;
  raster_spec.n_cols = std::max(1, static_cast<int>(std::ceil(grid.n_cols * grid.cell_size / raster_cell - 1e-9)));
  raster_spec.n_rows = std::max(1, static_cast<int>(std::ceil(grid.n_rows * grid.cell_size / raster_cell - 1e-9)));

  const RasterGrid raster = idw_raster(samples, raster_spec, config.idw);
  {
    auto out = open_output(config.out / files::kIdwRaster);
    write_esri_ascii(raster, out);
  }
  {
    auto out = open_output(config.out / files::kIdwAnchor);
    out << "anchor_lon " << fmt("%.9f", result.projection.anchor().lon) << "\n";
    out << "anchor_lat " << fmt("%.9f", result.projection.anchor().lat) << "\n";
    out << "note planar meters are equirectangular about the anchor\n";
  }
}

namespace {

std::optional<json> read_json(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json doc;
  try {
    in >> doc;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return doc;
}

}  // namespace

void cmd_report(const RunConfig& config) {
  ensure_out_dir(config);
  std::ostringstream md;
  md << "# Collision analysis report\n";

  md << "\n## Dataset\n\n";
  if (const auto summary = read_json(config.out / files::kValidateSummary)) {
    md << "| stage | count |\n|---|---|\n";
    md << "| input rows | " << (*summary)["input_rows"].get<std::uint64_t>() << " |\n";
    md << "| parse rejected | " << (*summary)["parse_rejected"].get<std::uint64_t>() << " |\n";
    md << "| outside window | " << (*summary)["window_removed"].get<std::uint64_t>() << " |\n";
    md << "| duplicates | " << (*summary)["duplicates_removed"].get<std::uint64_t>() << " |\n";
    md << "| outside boundary | " << (*summary)["outside_boundary_removed"].get<std::uint64_t>()
       << " |\n";
    md << "| category filtered | " << (*summary)["category_removed"].get<std::uint64_t>()
       << " |\n";
    md << "| retained | " << (*summary)["retained"].get<std::uint64_t>() << " |\n";
  } else {
    md << "stage not run: validate\n";
  }

  md << "\n## Subcategory shares\n\n";
  {
    std::ifstream in(config.out / files::kSubcategoryShares, std::ios::binary);
    if (in) {
      md << "| category | count | percent |\n|---|---|---|\n";
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line, ',');
        if (fields.size() == 3) {
          md << "| " << fields[0] << " | " << fields[1] << " | " << fields[2] << " |\n";
        }
      }
    } else {
      md << "stage not run: validate\n";
    }
  }

  md << "\n## Temporal association\n\n";
  {
    std::ifstream in(config.out / files::kTemporalStats, std::ios::binary);
    if (in) {
      md << "| factor | chi2 | df | p | Cramer's V | N |\n|---|---|---|---|---|---|\n";
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line, ',');
        if (fields.size() == 6) {
          std::string p = fields[3];
          if (!p.empty()) p = render_p(std::strtod(p.c_str(), nullptr));
          md << "| " << fields[0] << " | " << fields[1] << " | " << fields[2] << " | " << p
             << " | " << fields[4] << " | " << fields[5] << " |\n";
        }
      }
      md << "\nSignificance evaluated at alpha = 0.05.\n";
    } else {
      md << "stage not run: temporal\n";
    }
    if (const auto summary = read_json(config.out / files::kTemporalSummary)) {
      md << "\n- events: " << (*summary)["n_events"].get<std::uint64_t>() << "\n";
      md << "- observed days: " << (*summary)["observed_days"].get<std::int64_t>() << "\n";
      md << "- daily mean: " << fmt("%.2f", (*summary)["daily_mean"].get<double>()) << "\n";
      const auto& ratio = (*summary)["night_vs_afternoon_high_severity_ratio"];
      if (!ratio.is_null()) {
        md << "- night vs afternoon high-severity ratio: "
           << fmt("%+.1f%%", 100.0 * ratio.get<double>()) << "\n";
      }
    }
  }

  md << "\n## Hotspots\n\n";
  if (const auto fc = read_json(config.out / files::kHotspotGeojson)) {
    std::map<std::string, int> tally;
    int total = 0;
    for (const auto& feature : (*fc)["features"]) {
      ++tally[feature["properties"]["class"].get<std::string>()];
      ++total;
    }
    md << "| class | cells |\n|---|---|\n";
    for (const char* cls : {"hot99", "hot95", "hot90", "not_significant", "cold90", "cold95",
                            "cold99"}) {
      md << "| " << cls << " | " << (tally.contains(cls) ? tally[cls] : 0) << " |\n";
    }
    md << "\ntotal cells: " << total << "\n";
  } else {
    md << "stage not run: hotspot\n";
  }

  if (!fs::exists(config.out / files::kIdwRaster)) {
    md << "\nstage not run: idw\n";
  } else {
    md << "\nIDW surface written to " << files::kIdwRaster << "\n";
  }

  auto out = open_output(config.out / files::kReport);
  out << md.str();
}

}  // namespace crashspot::pipeline
