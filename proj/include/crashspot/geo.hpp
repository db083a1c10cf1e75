#pragma once

#include <span>
#include <vector>

#include "crashspot/types.hpp"

namespace crashspot {

inline constexpr double kEarthRadiusM = 6371000.0;

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;
};

// Great-circle distance on a sphere of radius kEarthRadiusM, in meters.
double haversine_m(const LonLat& a, const LonLat& b);

struct PlanarPoint {
  double x = 0.0;  // meters east of the projection anchor
  double y = 0.0;  // meters north of the projection anchor
};

// Equirectangular local projection anchored at the coordinate mean:
//   x = R * (lon - lon0) * cos(lat0),  y = R * (lat - lat0)   (radians)
// Analytically invertible; accurate to well under 1% at city scale.
class Projection {
 public:
  explicit Projection(LonLat anchor);

  const LonLat& anchor() const { return anchor_; }
  PlanarPoint to_planar(const LonLat& p) const;
  LonLat to_lonlat(const PlanarPoint& p) const;

 private:
  LonLat anchor_;
  double cos_lat0_;
};

// Anchor at the mean of the input coordinates. Throws DataError on empty input.
Projection make_projection(std::span<const LonLat> points);

std::vector<PlanarPoint> project_all(const Projection& proj, std::span<const LonLat> points);

struct CellIndex {
  int col = 0;
  int row = 0;
  auto operator<=>(const CellIndex&) const = default;
};

// Square aggregation lattice over projected points. Cells are indexed
// (col, row) from the lower-left origin; linear index is row-major.
struct GridSpec {
  PlanarPoint origin;     // lower-left corner
  double cell_size = 0.0; // meters
  int n_cols = 0;
  int n_rows = 0;

  int cell_count() const { return n_cols * n_rows; }
  int linear_index(const CellIndex& c) const { return c.row * n_cols + c.col; }
  CellIndex from_linear(int idx) const { return {idx % n_cols, idx / n_cols}; }
  PlanarPoint cell_center(const CellIndex& c) const {
    return {origin.x + (c.col + 0.5) * cell_size, origin.y + (c.row + 0.5) * cell_size};
  }
  double max_x() const { return origin.x + n_cols * cell_size; }
  double max_y() const { return origin.y + n_rows * cell_size; }
};

// Bounding grid with origin snapped to multiples of cell_size. Throws
// ConfigError when cell_size <= 0, DataError on empty input.
GridSpec build_grid(std::span<const PlanarPoint> points, double cell_size);

// col = floor((x - origin.x) / cell_size), row likewise; a point exactly on
// the upper/right extent boundary belongs to the last cell. Throws DataError
// for points outside the extent.
CellIndex cell_of(const PlanarPoint& p, const GridSpec& grid);

}  // namespace crashspot
