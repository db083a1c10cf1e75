#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crashspot/hotspot.hpp"
#include "crashspot/types.hpp"

namespace crashspot::synth {

// SplitMix64 (Steele, Lea & Flood 2014). Fixed 64-bit algorithm so generated
// fixtures are bit-identical across platforms and reimplementations:
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
// Doubles are (z >> 11) * 2^-53 in [0, 1); bounded integers use rejection
// sampling on the high bits. Stream k of seed s starts from
// mix(s + mix(k + GAMMA)) where mix is the output scrambler above.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t next_u64();
  double next_double();                    // uniform [0, 1)
  std::uint64_t next_below(std::uint64_t n);  // uniform {0 .. n-1}, unbiased

 private:
  std::uint64_t state_;
};

struct ClusterSpec {
  double center_lon = 0.0;
  double center_lat = 0.0;
  double radius_m = 0.0;
  int n_events = 0;
  double high_severity_share = 0.0;
};

struct BoundingBox {
  double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;
};

// Synthetic scenario with planted spatio-temporal structure. Background
// points are uniform over bbox; cluster points are uniform within their
// disks (rejection sampling from the bounding square). Period weights are
// relative intensities in Morning/Afternoon/Evening/Night order.
struct SynthScenario {
  std::uint64_t seed = 0;
  BoundingBox bbox;
  int n_background = 0;
  double background_high_share = 0.0;
  std::vector<ClusterSpec> clusters;
  StudyWindow window{CivilDate{2024, 11, 5}, CivilDate{2025, 6, 2}};
  std::array<double, 4> period_weights = {1.0, 1.0, 1.0, 1.0};
  Category category = Category::VehicleVehicle;
  std::string id_prefix;  // keeps ids unique when merging scenario outputs
};

SynthScenario load_scenario(const std::filesystem::path& path);

// Deterministic for a fixed scenario: stream 0 draws the background, stream
// k the k-th cluster. Per event the draw order is position, severity, date,
// period, minute.
std::vector<EventRecord> generate(const SynthScenario& scenario);

// Literal all-pairs transcription of the Gi* formula, no spatial pruning or
// reuse. Independent check for hotspot::gi_star.
std::vector<double> oracle_gi_star(const CellGrid& cells, const SpatialWeights& weights);

// All-pairs fixed-distance-band neighbor search on cell centers; reference
// for build_weights set equality.
SpatialWeights oracle_band_neighbors(const GridSpec& grid, double band_distance);

// Chi-square tail probability by trapezoid integration of the density over
// [x, x + 60*df] with step 1e-3. Below t = 0.1 the density (or its slope)
// is singular for small df, so that head is integrated under the
// substitution t = u^2, which makes the integrand smooth. Shares no code
// with the regularized-gamma route.
double oracle_chi2_p(double x, int df);

struct RecallReport {
  double recall = 0.0;                // cluster cells classified Hot90+
  double false_positive_rate = 0.0;   // non-cluster cells classified Hot90+
  int cluster_cells = 0;
  int non_cluster_cells = 0;
};

// A cell counts as a cluster cell when its center lies within any cluster
// disk (haversine distance). Throws DataError when the scenario has no
// clusters.
RecallReport recall_report(const SynthScenario& scenario, const HotspotOutput& output);

}  // namespace crashspot::synth
