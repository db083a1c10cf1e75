#include "crashspot/geo.hpp"

#include <cmath>
#include <numbers>

namespace crashspot {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double haversine_m(const LonLat& a, const LonLat& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlam = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

Projection::Projection(LonLat anchor) : anchor_(anchor), cos_lat0_(std::cos(anchor.lat * kDegToRad)) {
  if (std::abs(anchor.lat) > 89.0) {
    throw DataError("projection anchor too close to a pole");
  }
}

PlanarPoint Projection::to_planar(const LonLat& p) const {
  return {kEarthRadiusM * (p.lon - anchor_.lon) * kDegToRad * cos_lat0_,
          kEarthRadiusM * (p.lat - anchor_.lat) * kDegToRad};
}

LonLat Projection::to_lonlat(const PlanarPoint& p) const {
  return {anchor_.lon + p.x / (kEarthRadiusM * cos_lat0_) / kDegToRad,
          anchor_.lat + p.y / kEarthRadiusM / kDegToRad};
}

Projection make_projection(std::span<const LonLat> points) {
  if (points.empty()) {
    throw DataError("projection requires at least one point");
  }
  double slon = 0.0, slat = 0.0;
  for (const auto& p : points) {
    slon += p.lon;
    slat += p.lat;
  }
  const double n = static_cast<double>(points.size());
  return Projection(LonLat{slon / n, slat / n});
}

std::vector<PlanarPoint> project_all(const Projection& proj, std::span<const LonLat> points) {
  std::vector<PlanarPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(proj.to_planar(p));
  return out;
}

GridSpec build_grid(std::span<const PlanarPoint> points, double cell_size) {
  if (cell_size <= 0.0) {
    throw ConfigError("grid cell size must be positive");
  }
  if (points.empty()) {
    throw DataError("grid construction requires at least one point");
  }
  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  GridSpec g;
  g.cell_size = cell_size;
  g.origin = {std::floor(min_x / cell_size) * cell_size,
              std::floor(min_y / cell_size) * cell_size};
  g.n_cols = std::max(1, static_cast<int>(std::ceil((max_x - g.origin.x) / cell_size)));
  g.n_rows = std::max(1, static_cast<int>(std::ceil((max_y - g.origin.y) / cell_size)));
  // ceil can land exactly on the max point; the extent must contain it.
  while (g.max_x() < max_x) ++g.n_cols;
  while (g.max_y() < max_y) ++g.n_rows;
  return g;
}

CellIndex cell_of(const PlanarPoint& p, const GridSpec& grid) {
  if (p.x < grid.origin.x || p.y < grid.origin.y || p.x > grid.max_x() || p.y > grid.max_y()) {
    throw DataError("point outside grid extent");
  }
  int col = static_cast<int>(std::floor((p.x - grid.origin.x) / grid.cell_size));
  int row = static_cast<int>(std::floor((p.y - grid.origin.y) / grid.cell_size));
  // Upper/right boundary belongs to the last cell.
  col = std::min(col, grid.n_cols - 1);
  row = std::min(row, grid.n_rows - 1);
  return {col, row};
}

}  // namespace crashspot
