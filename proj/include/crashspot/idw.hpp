#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "crashspot/geo.hpp"

namespace crashspot {

struct IdwParams {
  double power = 2.0;  // distance decay exponent, > 0
  int neighbors = 12;  // number of nearest samples used, >= 1
  double max_search_radius = std::numeric_limits<double>::infinity();
};

struct Sample {
  PlanarPoint pos;
  double value = 0.0;
};

// Inverse-distance-weighted estimate at s0 from the `neighbors` nearest
// samples (ties at the cutoff distance are all included; ordering is by
// distance then sample index). A zero-distance sample is returned exactly.
// Returns nullopt when no sample lies within the search radius.
std::optional<double> idw_at(const PlanarPoint& s0, std::span<const Sample> samples,
                             const IdwParams& params);

// Regular raster of interpolated values; nodata marks pixels with no sample
// in the search neighborhood. Rows are stored bottom-up (row 0 = south).
struct RasterGrid {
  GridSpec spec;
  std::vector<double> values;
  double nodata = -9999.0;
};

// Evaluates idw_at at every pixel center. Throws DataError on empty samples.
RasterGrid idw_raster(std::span<const Sample> samples, const GridSpec& raster_spec,
                      const IdwParams& params);

// ESRI ASCII grid: six-line header (ncols, nrows, xllcorner, yllcorner,
// cellsize, NODATA_value) followed by row-major values, north row first.
void write_esri_ascii(const RasterGrid& raster, std::ostream& out);

}  // namespace crashspot
