#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "crashspot/geo.hpp"
#include "crashspot/types.hpp"

namespace crashspot {

// Severity weight: Low -> 1, High -> 2.
int severity_weight(Severity s);

// Aggregation lattice holding the severity-weighted value x_j and raw event
// count per cell. Sum of x over cells equals the sum of event weights.
struct CellGrid {
  GridSpec spec;
  std::vector<double> x;        // row-major, spec.linear_index ordering
  std::vector<int> n_events;
};

// Bins projected events into grid cells, accumulating severity weights.
// Throws DataError when a point falls outside the grid extent.
CellGrid aggregate(std::span<const PlanarPoint> points, std::span<const Severity> severities,
                   const GridSpec& grid);

// Binary fixed-distance-band weights over cell centers: w_ij = 1 iff the
// center-to-center distance is <= band_distance. Self-inclusive (w_ii = 1)
// and symmetric. Neighbor lists are sorted by linear cell index so that
// downstream summation order is deterministic.
struct SpatialWeights {
  std::vector<std::vector<int>> neighbors;
  double band_distance = 0.0;
};

// Window-pruned neighbor search over the regular lattice; results are
// identical to the all-pairs check. band <= 0 is a ConfigError. A band below
// the cell size is legal (cells may end up with only themselves).
SpatialWeights build_weights(const GridSpec& grid, double band_distance);

enum class ConfidenceClass {
  Cold99,
  Cold95,
  Cold90,
  NotSignificant,
  Hot90,
  Hot95,
  Hot99,
};

std::string_view to_string(ConfidenceClass c);
bool is_hot(ConfidenceClass c);
bool is_cold(ConfidenceClass c);

// Per-cell Getis-Ord Gi* z-score with two-tailed normal p-value and
// confidence classification.
struct GiStarResult {
  std::vector<double> z;
  std::vector<double> p;
  std::vector<ConfidenceClass> cls;
};

// Standardized Getis-Ord Gi* over all cells (empty cells included):
//
//   z_i = (sum_j w_ij x_j - xbar * sum_j w_ij)
//         / (S * sqrt((N * sum_j w_ij^2 - (sum_j w_ij)^2) / (N - 1)))
//
// with xbar the global mean and S = sqrt(sum x^2 / N - xbar^2). When all
// values are equal (S = 0) every z is 0 by convention; a cell whose
// bracketed variance term is <= 0 (neighborhood covers all cells) also gets
// z = 0. Throws DataError when the grid has fewer than two cells.
GiStarResult gi_star(const CellGrid& cells, const SpatialWeights& weights);

// |z| >= 2.576 -> 99%, >= 1.960 -> 95%, >= 1.645 -> 90%, else not
// significant; the sign of z selects hot vs cold.
ConfidenceClass classify(double z);

// Benjamini-Hochberg false-discovery-rate correction of the classification,
// applied per confidence level to the two-tailed p-values. Never upgrades a
// cell; off by default in the pipeline.
void apply_fdr(GiStarResult& result);

struct HotspotOutput {
  Projection projection;
  CellGrid cells;
  SpatialWeights weights;
  GiStarResult gi;
};

// events -> projection (anchored at coordinate mean) -> grid -> severity
// aggregation -> band weights -> Gi*. Deterministic for fixed inputs.
HotspotOutput hotspot_pipeline(std::span<const EventRecord> events, double cell_size,
                               double band_distance, bool fdr = false);

}  // namespace crashspot
