#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crashspot/pipeline.hpp"

namespace {

using crashspot::pipeline::RunConfig;

struct CliOverrides {
  std::string config_path;
  std::string input, boundary, out, scenario, category;
  double cell_size = 0.0, band = 0.0, power = 0.0;
  int neighbors = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "run configuration file (JSON)");
  cmd->add_option("--input", o.input, "events file (delimited text with header)");
  cmd->add_option("--boundary", o.boundary, "boundary GeoJSON file");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--scenario", o.scenario, "synthetic scenario file (JSON)");
  cmd->add_option("--category", o.category, "category filter: all or a category name");
  cmd->add_option("--cell-size", o.cell_size, "analysis cell size in meters");
  cmd->add_option("--band", o.band, "fixed distance band in meters");
  cmd->add_option("--power", o.power, "IDW distance decay power");
  cmd->add_option("--neighbors", o.neighbors, "IDW neighbor count");
  cmd->add_option("--seed", o.seed, "seed override for synthetic generation")
      ->each([&o](const std::string&) { o.seed_set = true; });
}

RunConfig resolve(const CliOverrides& o) {
  RunConfig config;
  if (!o.config_path.empty()) {
    config = crashspot::pipeline::load_config(o.config_path);
  }
  if (!o.input.empty()) config.input = o.input;
  if (!o.boundary.empty()) config.boundary = o.boundary;
  if (!o.out.empty()) config.out = o.out;
  if (!o.scenario.empty()) config.scenario = o.scenario;
  if (!o.category.empty()) config.category_filter = o.category;
  if (o.cell_size > 0.0) config.cell_size_m = o.cell_size;
  if (o.band > 0.0) config.band_m = o.band;
  if (o.power > 0.0) config.idw.power = o.power;
  if (o.neighbors > 0) config.idw.neighbors = o.neighbors;
  if (o.seed_set) config.seed_override = o.seed;
  return config;
}

void print_validate_summary(const crashspot::pipeline::ValidateSummary& s) {
  std::cout << "input rows:        " << s.input_rows << "\n"
            << "parse rejected:    " << s.parse_rejected << "\n"
            << "outside window:    " << s.window_removed << "\n"
            << "duplicates:        " << s.duplicates_removed << "\n"
            << "outside boundary:  " << s.outside_boundary_removed << "\n"
            << "category filtered: " << s.category_removed << "\n"
            << "retained:          " << s.retained << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Severity-weighted collision analysis: temporal association, "
               "Gi* hotspots, and IDW surfaces"};
  app.require_subcommand(1);

  CliOverrides o;
  auto* synth = app.add_subcommand("synth", "generate synthetic events from a scenario");
  auto* validate = app.add_subcommand("validate", "parse, filter, and clean raw events");
  auto* temporal = app.add_subcommand("temporal", "temporal severity association analysis");
  auto* hotspot = app.add_subcommand("hotspot", "severity-weighted Gi* hotspot analysis");
  auto* idw = app.add_subcommand("idw", "IDW interpolation of the Gi* surface");
  auto* report = app.add_subcommand("report", "collate stage outputs into one report");
  auto* run = app.add_subcommand("run", "validate, temporal, hotspot, idw, report");
  for (auto* cmd : {synth, validate, temporal, hotspot, idw, report, run}) {
    add_common_flags(cmd, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig config = resolve(o);
    if (synth->parsed()) {
      const std::size_t n = crashspot::pipeline::cmd_synth(config);
      std::cout << "generated " << n << " events\n";
    } else if (validate->parsed()) {
      print_validate_summary(crashspot::pipeline::cmd_validate(config));
    } else if (temporal->parsed()) {
      crashspot::pipeline::cmd_temporal(config);
    } else if (hotspot->parsed()) {
      crashspot::pipeline::cmd_hotspot(config);
    } else if (idw->parsed()) {
      crashspot::pipeline::cmd_idw(config);
    } else if (report->parsed()) {
      crashspot::pipeline::cmd_report(config);
    } else if (run->parsed()) {
      print_validate_summary(crashspot::pipeline::cmd_validate(config));
      crashspot::pipeline::cmd_temporal(config);
      crashspot::pipeline::cmd_hotspot(config);
      crashspot::pipeline::cmd_idw(config);
      crashspot::pipeline::cmd_report(config);
    }
  } catch (const crashspot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const crashspot::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const crashspot::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const crashspot::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
