#include "crashspot/idw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "crashspot/types.hpp"

namespace crashspot {

namespace {

struct Candidate {
  double dist;
  int index;
};

}  // namespace

std::optional<double> idw_at(const PlanarPoint& s0, std::span<const Sample> samples,
                             const IdwParams& params) {
  if (params.power <= 0.0) throw ConfigError("IDW power must be positive");
  if (params.neighbors < 1) throw ConfigError("IDW neighbor count must be >= 1");

  std::vector<Candidate> candidates;
  candidates.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double d = std::hypot(samples[k].pos.x - s0.x, samples[k].pos.y - s0.y);
    if (d > params.max_search_radius) continue;
    if (d == 0.0) return samples[k].value;  // exact interpolator at sample sites
    candidates.push_back({d, static_cast<int>(k)});
  }
  if (candidates.empty()) return std::nullopt;

  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(params.neighbors),
                                              candidates.size());
  auto by_dist_then_index = [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.index < b.index;
  };
  std::nth_element(candidates.begin(), candidates.begin() + (m - 1), candidates.end(),
                   by_dist_then_index);
  const double cutoff = candidates[m - 1].dist;
  // Keep the m nearest plus everything tied at the cutoff distance.
  std::vector<Candidate> chosen;
  chosen.reserve(m + 4);
  for (const auto& c : candidates) {
    if (c.dist <= cutoff) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(), by_dist_then_index);
  if (chosen.size() == 1) {
    return samples[static_cast<std::size_t>(chosen.front().index)].value;
  }

  double num = 0.0, den = 0.0;
  for (const auto& c : chosen) {
    const double w = std::pow(c.dist, -params.power);
    num += samples[static_cast<std::size_t>(c.index)].value * w;
    den += w;
  }
  if (den == 0.0 || !std::isfinite(den)) {
    // Extreme powers can underflow every weight; fall back to the nearest
    // sample, which is the p -> infinity limit.
    return samples[static_cast<std::size_t>(chosen.front().index)].value;
  }
  return num / den;
}

RasterGrid idw_raster(std::span<const Sample> samples, const GridSpec& raster_spec,
                      const IdwParams& params) {
  if (samples.empty()) throw DataError("IDW raster requires at least one sample");
  RasterGrid raster;
  raster.spec = raster_spec;
  raster.values.assign(static_cast<std::size_t>(raster_spec.cell_count()), raster.nodata);
  for (int row = 0; row < raster_spec.n_rows; ++row) {
    for (int col = 0; col < raster_spec.n_cols; ++col) {
      const PlanarPoint center = raster_spec.cell_center({col, row});
      const auto value = idw_at(center, samples, params);
      if (value) {
        raster.values[static_cast<std::size_t>(raster_spec.linear_index({col, row}))] = *value;
      }
    }
  }
  return raster;
}

void write_esri_ascii(const RasterGrid& raster, std::ostream& out) {
  char buf[64];
  out << "ncols " << raster.spec.n_cols << "\n";
  out << "nrows " << raster.spec.n_rows << "\n";
  std::snprintf(buf, sizeof(buf), "%.3f", raster.spec.origin.x);
  out << "xllcorner " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.3f", raster.spec.origin.y);
  out << "yllcorner " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.3f", raster.spec.cell_size);
  out << "cellsize " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%g", raster.nodata);
  out << "NODATA_value " << buf << "\n";
  for (int row = raster.spec.n_rows - 1; row >= 0; --row) {
    for (int col = 0; col < raster.spec.n_cols; ++col) {
      const double v = raster.values[static_cast<std::size_t>(raster.spec.linear_index({col, row}))];
      std::snprintf(buf, sizeof(buf), "%.6f", v);
      out << buf;
      out << (col + 1 == raster.spec.n_cols ? "\n" : " ");
    }
  }
}

}  // namespace crashspot
