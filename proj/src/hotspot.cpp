#include "crashspot/hotspot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crashspot/stats.hpp"

namespace crashspot {

int severity_weight(Severity s) {
  return s == Severity::High ? 2 : 1;
}

CellGrid aggregate(std::span<const PlanarPoint> points, std::span<const Severity> severities,
                   const GridSpec& grid) {
  if (points.size() != severities.size()) {
    throw DataError("aggregate: points and severities must align");
  }
  CellGrid cells;
  cells.spec = grid;
  cells.x.assign(static_cast<std::size_t>(grid.cell_count()), 0.0);
  cells.n_events.assign(static_cast<std::size_t>(grid.cell_count()), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto idx = static_cast<std::size_t>(grid.linear_index(cell_of(points[i], grid)));
    cells.x[idx] += static_cast<double>(severity_weight(severities[i]));
    ++cells.n_events[idx];
  }
  return cells;
}

SpatialWeights build_weights(const GridSpec& grid, double band_distance) {
  if (band_distance <= 0.0) {
    throw ConfigError("spatial weights band distance must be positive");
  }
  SpatialWeights w;
  w.band_distance = band_distance;
  const int n = grid.cell_count();
  w.neighbors.resize(static_cast<std::size_t>(n));
  const int reach = static_cast<int>(std::floor(band_distance / grid.cell_size)) + 1;
  for (int row = 0; row < grid.n_rows; ++row) {
    for (int col = 0; col < grid.n_cols; ++col) {
      const CellIndex here{col, row};
      const PlanarPoint center = grid.cell_center(here);
      auto& list = w.neighbors[static_cast<std::size_t>(grid.linear_index(here))];
      for (int dr = -reach; dr <= reach; ++dr) {
        const int r2 = row + dr;
        if (r2 < 0 || r2 >= grid.n_rows) continue;
        for (int dc = -reach; dc <= reach; ++dc) {
          const int c2 = col + dc;
          if (c2 < 0 || c2 >= grid.n_cols) continue;
          const CellIndex there{c2, r2};
          const PlanarPoint other = grid.cell_center(there);
          if (std::hypot(other.x - center.x, other.y - center.y) <= band_distance) {
            list.push_back(grid.linear_index(there));
          }
        }
      }
      // dr/dc iteration already yields ascending linear indices.
    }
  }
  return w;
}

std::string_view to_string(ConfidenceClass c) {
  switch (c) {
    case ConfidenceClass::Cold99: return "cold99";
    case ConfidenceClass::Cold95: return "cold95";
    case ConfidenceClass::Cold90: return "cold90";
    case ConfidenceClass::NotSignificant: return "not_significant";
    case ConfidenceClass::Hot90: return "hot90";
    case ConfidenceClass::Hot95: return "hot95";
    case ConfidenceClass::Hot99: return "hot99";
  }
  return "?";
}

bool is_hot(ConfidenceClass c) {
  return c == ConfidenceClass::Hot90 || c == ConfidenceClass::Hot95 ||
         c == ConfidenceClass::Hot99;
}

bool is_cold(ConfidenceClass c) {
  return c == ConfidenceClass::Cold90 || c == ConfidenceClass::Cold95 ||
         c == ConfidenceClass::Cold99;
}

ConfidenceClass classify(double z) {
  const double a = std::abs(z);
  if (a >= 2.576) return z > 0 ? ConfidenceClass::Hot99 : ConfidenceClass::Cold99;
  if (a >= 1.960) return z > 0 ? ConfidenceClass::Hot95 : ConfidenceClass::Cold95;
  if (a >= 1.645) return z > 0 ? ConfidenceClass::Hot90 : ConfidenceClass::Cold90;
  return ConfidenceClass::NotSignificant;
}

GiStarResult gi_star(const CellGrid& cells, const SpatialWeights& weights) {
  const std::size_t n = cells.x.size();
  if (n < 2) {
    throw DataError("gi_star requires at least two cells");
  }
  if (weights.neighbors.size() != n) {
    throw DataError("gi_star: weights do not match the cell grid");
  }
  GiStarResult result;
  result.z.assign(n, 0.0);
  result.p.assign(n, 1.0);
  result.cls.assign(n, ConfidenceClass::NotSignificant);

  const auto [min_it, max_it] = std::minmax_element(cells.x.begin(), cells.x.end());
  if (*min_it == *max_it) {
    return result;  // S = 0: all z defined as 0
  }

  const double dn = static_cast<double>(n);
  double sum_x = 0.0, sum_x2 = 0.0;
  for (double v : cells.x) {
    sum_x += v;
    sum_x2 += v * v;
  }
  const double xbar = sum_x / dn;
  const double s2 = sum_x2 / dn - xbar * xbar;
  if (s2 <= 0.0) {
    return result;
  }
  const double s = std::sqrt(s2);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& nbrs = weights.neighbors[i];
    double sum_w = 0.0, sum_wx = 0.0, sum_w2 = 0.0;
    for (int j : nbrs) {
      sum_w += 1.0;
      sum_wx += cells.x[static_cast<std::size_t>(j)];
      sum_w2 += 1.0;
    }
    const double var_term = (dn * sum_w2 - sum_w * sum_w) / (dn - 1.0);
    if (var_term <= 0.0) {
      continue;  // neighborhood is the whole grid: z defined as 0
    }
    const double z = (sum_wx - xbar * sum_w) / (s * std::sqrt(var_term));
    result.z[i] = z;
    result.p[i] = two_tailed_p(z);
    result.cls[i] = classify(z);
  }
  return result;
}

void apply_fdr(GiStarResult& result) {
  const std::size_t n = result.p.size();
  if (n == 0) return;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return result.p[a] < result.p[b]; });

  // Benjamini-Hochberg cutoff per significance level: the largest p(k) with
  // p(k) <= (k/n) * alpha.
  auto cutoff = [&](double alpha) {
    double cut = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double p = result.p[order[k]];
      if (p <= alpha * static_cast<double>(k + 1) / static_cast<double>(n)) cut = p;
    }
    return cut;
  };
  const double cut99 = cutoff(0.01);
  const double cut95 = cutoff(0.05);
  const double cut90 = cutoff(0.10);

  for (std::size_t i = 0; i < n; ++i) {
    const double z = result.z[i];
    const double p = result.p[i];
    ConfidenceClass c = ConfidenceClass::NotSignificant;
    if (p <= cut99 && std::abs(z) >= 2.576) {
      c = z > 0 ? ConfidenceClass::Hot99 : ConfidenceClass::Cold99;
    } else if (p <= cut95 && std::abs(z) >= 1.960) {
      c = z > 0 ? ConfidenceClass::Hot95 : ConfidenceClass::Cold95;
    } else if (p <= cut90 && std::abs(z) >= 1.645) {
      c = z > 0 ? ConfidenceClass::Hot90 : ConfidenceClass::Cold90;
    }
    result.cls[i] = c;
  }
}

HotspotOutput hotspot_pipeline(std::span<const EventRecord> events, double cell_size,
                               double band_distance, bool fdr) {
  std::vector<LonLat> coords;
  std::vector<Severity> severities;
  coords.reserve(events.size());
  severities.reserve(events.size());
  for (const auto& e : events) {
    coords.push_back({e.lon, e.lat});
    severities.push_back(e.severity);
  }
  Projection proj = make_projection(coords);
  const std::vector<PlanarPoint> pts = project_all(proj, coords);
  const GridSpec grid = build_grid(pts, cell_size);
  if (grid.cell_count() < 2) {
    throw DataError("hotspot analysis requires at least two cells; "
                    "reduce the cell size or widen the data extent");
  }
  HotspotOutput out{std::move(proj), aggregate(pts, severities, grid),
                    build_weights(grid, band_distance), {}};
  out.gi = gi_star(out.cells, out.weights);
  if (fdr) apply_fdr(out.gi);
  return out;
}

}  // namespace crashspot
