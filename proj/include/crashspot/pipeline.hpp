#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashspot/idw.hpp"
#include "crashspot/ingest.hpp"
#include "crashspot/temporal.hpp"
#include "crashspot/types.hpp"

namespace crashspot::pipeline {

// Resolved run configuration: one structured config file plus flag
// overrides. Every run echoes the effective values to
// <out>/config_used.json for provenance.
struct RunConfig {
  std::filesystem::path input;      // raw events, delimited text
  std::filesystem::path boundary;   // GeoJSON Polygon/MultiPolygon
  std::filesystem::path out;        // output directory
  std::filesystem::path scenario;   // synth scenario file

  char delimiter = ',';
  ColumnMap columns;
  std::optional<StudyWindow> window;
  std::vector<FactorKind> factors = {FactorKind::TimeOfDay, FactorKind::DayOfWeek,
                                     FactorKind::Month};
  std::string category_filter = "all";  // "all" or a category name
  double cell_size_m = 500.0;
  double band_m = 1000.0;
  IdwParams idw;
  double raster_cell_m = 0.0;  // 0 -> cell_size_m / 4
  bool fdr = false;
  std::optional<std::uint64_t> seed_override;  // synth only
};

RunConfig load_config(const std::filesystem::path& path);

// File names produced under RunConfig::out.
namespace files {
inline constexpr const char* kConfigEcho = "config_used.json";
inline constexpr const char* kSyntheticEvents = "synthetic_events.csv";
inline constexpr const char* kCleaned = "cleaned.csv";
inline constexpr const char* kRejections = "rejections.csv";
inline constexpr const char* kValidateSummary = "validate_summary.json";
inline constexpr const char* kSubcategoryShares = "subcategory_shares.csv";
inline constexpr const char* kTemporalStats = "temporal_stats.csv";
inline constexpr const char* kTemporalSummary = "temporal_summary.json";
inline constexpr const char* kHotspotCells = "hotspot_cells.csv";
inline constexpr const char* kHotspotGeojson = "hotspot.geojson";
inline constexpr const char* kIdwRaster = "idw.asc";
inline constexpr const char* kIdwAnchor = "idw_anchor.txt";
inline constexpr const char* kReport = "report.md";

std::string temporal_table(FactorKind factor);  // temporal_<factor>.csv
}  // namespace files

struct ValidateSummary {
  std::size_t input_rows = 0;
  std::size_t parse_rejected = 0;
  std::size_t window_removed = 0;
  std::size_t duplicates_removed = 0;
  std::size_t outside_boundary_removed = 0;
  std::size_t category_removed = 0;
  std::size_t retained = 0;
};

// parse -> window filter -> dedupe -> spatial filter (-> category filter).
// Writes the cleaned dataset, the rejection report, per-stage counts, and
// the subcategory share table.
ValidateSummary cmd_validate(const RunConfig& config);

// Generates scenario events and writes them in the ingest schema.
std::size_t cmd_synth(const RunConfig& config);

// Per-factor contingency tables, chi-square statistics, and daily-mean
// summary over the cleaned dataset. A degenerate factor (zero margin) is
// reported as a warning and leaves its statistics columns empty.
void cmd_temporal(const RunConfig& config);

// Severity-weighted Gi* per cell, written as delimited text and GeoJSON.
void cmd_hotspot(const RunConfig& config);

// IDW interpolation of the Gi* surface onto a finer raster (ESRI ASCII),
// with a sidecar recording the projection anchor.
void cmd_idw(const RunConfig& config);

// Collates prior stage outputs into a single markdown report. Missing
// stages produce an explicit "stage not run" notice.
void cmd_report(const RunConfig& config);

// Reads a canonical cleaned-events file (as written by cmd_validate).
std::vector<EventRecord> read_cleaned_events(const std::filesystem::path& path);

void write_events_csv(const std::filesystem::path& path, std::span<const EventRecord> events,
                      char delimiter = ',');

}  // namespace crashspot::pipeline
