#include "crashspot/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "crashspot/geo.hpp"
#include "crashspot/temporal.hpp"

namespace crashspot::synth {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// First minute of each period, Morning/Afternoon/Evening/Night order.
constexpr std::array<int, 4> kPeriodStartHour = {6, 12, 18, 0};

CivilDate parse_date_or_throw(const std::string& s, const char* what) {
  const auto d = parse_date(s);
  if (!d) throw ConfigError(std::string("scenario: bad ") + what + " date: " + s);
  return *d;
}

}  // namespace

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t stream_index) {
  return SplitMix64(mix64(seed + mix64(stream_index + kGamma)));
}

std::uint64_t SplitMix64::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double SplitMix64::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
  if (n == 0) throw DataError("next_below: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

SynthScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario file is not valid JSON: " + std::string(e.what()));
  }
  SynthScenario s;
  try {
    s.seed = doc.at("seed").get<std::uint64_t>();
    const auto& bbox = doc.at("bbox");
    s.bbox = {bbox.at("min_lon").get<double>(), bbox.at("min_lat").get<double>(),
              bbox.at("max_lon").get<double>(), bbox.at("max_lat").get<double>()};
    s.n_background = doc.at("n_background").get<int>();
    s.background_high_share = doc.value("background_high_share", 0.0);
    if (doc.contains("clusters")) {
      for (const auto& c : doc["clusters"]) {
        ClusterSpec spec;
        spec.center_lon = c.at("center_lon").get<double>();
        spec.center_lat = c.at("center_lat").get<double>();
        spec.radius_m = c.at("radius_m").get<double>();
        spec.n_events = c.at("n_events").get<int>();
        spec.high_severity_share = c.value("high_severity_share", 0.0);
        s.clusters.push_back(spec);
      }
    }
    const auto& w = doc.at("window");
    std::set<CivilDate> missing;
    if (w.contains("missing")) {
      for (const auto& m : w["missing"]) {
        missing.insert(parse_date_or_throw(m.get<std::string>(), "missing"));
      }
    }
    s.window = StudyWindow(parse_date_or_throw(w.at("start").get<std::string>(), "start"),
                           parse_date_or_throw(w.at("end").get<std::string>(), "end"),
                           std::move(missing));
    if (doc.contains("period_weights")) {
      const auto& pw = doc["period_weights"];
      s.period_weights = {pw.value("morning", 1.0), pw.value("afternoon", 1.0),
                          pw.value("evening", 1.0), pw.value("night", 1.0)};
    }
    if (doc.contains("category")) {
      const auto cat = category_from_string(doc["category"].get<std::string>());
      if (!cat) throw ConfigError("scenario: unknown category");
      s.category = *cat;
    }
    s.id_prefix = doc.value("id_prefix", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario file: " + std::string(e.what()));
  }
  return s;
}

namespace {

struct ScenarioValidation {
  std::vector<CivilDate> observed_dates;
  double period_total = 0.0;
};

ScenarioValidation validate_scenario(const SynthScenario& s) {
  if (s.n_background < 0) throw ConfigError("scenario: n_background must be >= 0");
  if (s.background_high_share < 0.0 || s.background_high_share > 1.0) {
    throw ConfigError("scenario: background_high_share must lie in [0, 1]");
  }
  if (s.bbox.max_lon <= s.bbox.min_lon || s.bbox.max_lat <= s.bbox.min_lat) {
    throw ConfigError("scenario: bounding box is empty");
  }
  for (const auto& c : s.clusters) {
    if (c.radius_m <= 0.0) throw ConfigError("scenario: cluster radius must be positive");
    if (c.n_events < 0) throw ConfigError("scenario: cluster n_events must be >= 0");
    if (c.high_severity_share < 0.0 || c.high_severity_share > 1.0) {
      throw ConfigError("scenario: cluster high_severity_share must lie in [0, 1]");
    }
  }
  ScenarioValidation v;
  for (double w : s.period_weights) {
    if (w < 0.0) throw ConfigError("scenario: period weights must be >= 0");
    v.period_total += w;
  }
  if (v.period_total <= 0.0) throw ConfigError("scenario: period weights sum to zero");
  const std::int64_t first = days_from_civil(s.window.start());
  const std::int64_t last = days_from_civil(s.window.end());
  for (std::int64_t d = first; d <= last; ++d) {
    const CivilDate date = civil_from_days(d);
    if (!s.window.missing_dates().contains(date)) v.observed_dates.push_back(date);
  }
  return v;
}

CivilDateTime draw_timestamp(SplitMix64& rng, const ScenarioValidation& v,
                             const std::array<double, 4>& period_weights) {
  CivilDateTime t;
  t.date = v.observed_dates[rng.next_below(v.observed_dates.size())];
  const double u = rng.next_double() * v.period_total;
  std::size_t period = 3;
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    acc += period_weights[i];
    if (u < acc) {
      period = i;
      break;
    }
  }
  const auto offset = static_cast<int>(rng.next_below(360));  // minutes within the period
  t.hour = kPeriodStartHour[period] + offset / 60;
  t.minute = offset % 60;
  return t;
}

Severity draw_severity(SplitMix64& rng, double high_share) {
  return rng.next_double() < high_share ? Severity::High : Severity::Low;
}

}  // namespace

std::vector<EventRecord> generate(const SynthScenario& scenario) {
  const ScenarioValidation v = validate_scenario(scenario);
  std::vector<EventRecord> events;
  events.reserve(static_cast<std::size_t>(scenario.n_background));

  char idbuf[32];
  SplitMix64 bg = SplitMix64::stream(scenario.seed, 0);
  for (int i = 0; i < scenario.n_background; ++i) {
    EventRecord e;
    std::snprintf(idbuf, sizeof(idbuf), "bg-%06d", i + 1);
    e.id = scenario.id_prefix + idbuf;
    e.lon = scenario.bbox.min_lon + bg.next_double() * (scenario.bbox.max_lon - scenario.bbox.min_lon);
    e.lat = scenario.bbox.min_lat + bg.next_double() * (scenario.bbox.max_lat - scenario.bbox.min_lat);
    e.severity = draw_severity(bg, scenario.background_high_share);
    e.timestamp = draw_timestamp(bg, v, scenario.period_weights);
    e.category = scenario.category;
    events.push_back(std::move(e));
  }

  constexpr double kDegToRad = std::numbers::pi / 180.0;
  for (std::size_t k = 0; k < scenario.clusters.size(); ++k) {
    const ClusterSpec& c = scenario.clusters[k];
    SplitMix64 rng = SplitMix64::stream(scenario.seed, k + 1);
    const double m_per_deg_lat = kEarthRadiusM * kDegToRad;
    const double m_per_deg_lon = m_per_deg_lat * std::cos(c.center_lat * kDegToRad);
    for (int i = 0; i < c.n_events; ++i) {
      // Uniform over the disk by rejection from the bounding square.
      double dx, dy;
      do {
        dx = (2.0 * rng.next_double() - 1.0) * c.radius_m;
        dy = (2.0 * rng.next_double() - 1.0) * c.radius_m;
      } while (dx * dx + dy * dy > c.radius_m * c.radius_m);
      EventRecord e;
      std::snprintf(idbuf, sizeof(idbuf), "c%zu-%06d", k + 1, i + 1);
      e.id = scenario.id_prefix + idbuf;
      e.lon = c.center_lon + dx / m_per_deg_lon;
      e.lat = c.center_lat + dy / m_per_deg_lat;
      e.severity = draw_severity(rng, c.high_severity_share);
      e.timestamp = draw_timestamp(rng, v, scenario.period_weights);
      e.category = scenario.category;
      events.push_back(std::move(e));
    }
  }
  return events;
}

std::vector<double> oracle_gi_star(const CellGrid& cells, const SpatialWeights& weights) {
  const std::size_t n = cells.x.size();
  if (n < 2) throw DataError("oracle_gi_star requires at least two cells");
  if (weights.neighbors.size() != n) {
    throw DataError("oracle_gi_star: weights do not match the cell grid");
  }
  std::vector<double> z(n, 0.0);

  double min_x = cells.x[0], max_x = cells.x[0];
  for (double v : cells.x) {
    min_x = std::min(min_x, v);
    max_x = std::max(max_x, v);
  }
  if (min_x == max_x) return z;  // S = 0 convention

  // Dense weight lookup so the formula below is a literal transcription.
  std::vector<std::uint8_t> w(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : weights.neighbors[i]) {
      w[i * n + static_cast<std::size_t>(j)] = 1;
    }
  }

  const double dn = static_cast<double>(n);
  double sum_x = 0.0, sum_x2 = 0.0;
  for (double v : cells.x) {
    sum_x += v;
    sum_x2 += v * v;
  }
  const double xbar = sum_x / dn;
  const double s = std::sqrt(std::max(0.0, sum_x2 / dn - xbar * xbar));
  if (s == 0.0) return z;

  for (std::size_t i = 0; i < n; ++i) {
    double sum_w = 0.0, sum_wx = 0.0, sum_w2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wij = static_cast<double>(w[i * n + j]);
      sum_w += wij;
      sum_wx += wij * cells.x[j];
      sum_w2 += wij * wij;
    }
    const double var_term = (dn * sum_w2 - sum_w * sum_w) / (dn - 1.0);
    if (var_term <= 0.0) continue;
    z[i] = (sum_wx - xbar * sum_w) / (s * std::sqrt(var_term));
  }
  return z;
}

SpatialWeights oracle_band_neighbors(const GridSpec& grid, double band_distance) {
  SpatialWeights w;
  w.band_distance = band_distance;
  const int n = grid.cell_count();
  w.neighbors.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const PlanarPoint ci = grid.cell_center(grid.from_linear(i));
    for (int j = 0; j < n; ++j) {
      const PlanarPoint cj = grid.cell_center(grid.from_linear(j));
      if (std::hypot(cj.x - ci.x, cj.y - ci.y) <= band_distance) {
        w.neighbors[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  return w;
}

namespace {

// Composite trapezoid with the last node clamped to the upper limit.
template <typename F>
double trapezoid(F&& f, double lo, double hi, double step) {
  if (hi <= lo) return 0.0;
  const auto n_steps = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  double prev_t = lo;
  double prev_f = f(lo);
  double acc = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double t = std::min(lo + static_cast<double>(i) * step, hi);
    const double cur = f(t);
    acc += 0.5 * (prev_f + cur) * (t - prev_t);
    prev_t = t;
    prev_f = cur;
  }
  return acc;
}

}  // namespace

double oracle_chi2_p(double x, int df) {
  if (x < 0.0 || df < 1) throw DataError("oracle_chi2_p: x >= 0 and df >= 1 required");
  const double a = 0.5 * static_cast<double>(df);
  const double log_norm = a * std::numbers::ln2 + std::lgamma(a);

  double p = 0.0;
  double lo = x;
  if (x < 0.1) {
    // The density (or its derivative) is singular at t = 0 for small df.
    // Substituting t = u^2 gives the smooth integrand
    // 2 u^{df-1} exp(-u^2/2) / (2^{df/2} Gamma(df/2)) on the head.
    auto head = [&](double u) {
      return 2.0 * std::pow(u, df - 1) * std::exp(-0.5 * u * u - log_norm);
    };
    p += trapezoid(head, std::sqrt(x), std::sqrt(0.1), 1e-3);
    lo = 0.1;
  }
  auto density = [&](double t) {
    return std::exp((a - 1.0) * std::log(t) - 0.5 * t - log_norm);
  };
  p += trapezoid(density, lo, x + 60.0 * static_cast<double>(df), 1e-3);
  return std::min(1.0, p);
}

RecallReport recall_report(const SynthScenario& scenario, const HotspotOutput& output) {
  if (scenario.clusters.empty()) {
    throw DataError("recall_report requires a scenario with at least one cluster");
  }
  RecallReport report;
  int hot_cluster = 0, hot_other = 0;
  const GridSpec& grid = output.cells.spec;
  for (int idx = 0; idx < grid.cell_count(); ++idx) {
    const PlanarPoint center = grid.cell_center(grid.from_linear(idx));
    const LonLat ll = output.projection.to_lonlat(center);
    bool in_cluster = false;
    for (const auto& c : scenario.clusters) {
      if (haversine_m(ll, LonLat{c.center_lon, c.center_lat}) <= c.radius_m) {
        in_cluster = true;
        break;
      }
    }
    const bool hot = is_hot(output.gi.cls[static_cast<std::size_t>(idx)]);
    if (in_cluster) {
      ++report.cluster_cells;
      if (hot) ++hot_cluster;
    } else {
      ++report.non_cluster_cells;
      if (hot) ++hot_other;
    }
  }
  if (report.cluster_cells > 0) {
    report.recall = static_cast<double>(hot_cluster) / report.cluster_cells;
  }
  if (report.non_cluster_cells > 0) {
    report.false_positive_rate = static_cast<double>(hot_other) / report.non_cluster_cells;
  }
  return report;
}

}  // namespace crashspot::synth
