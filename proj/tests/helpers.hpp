#pragma once

#include <string>
#include <vector>

#include <doctest.h>

#include "crashspot/ingest.hpp"
#include "crashspot/synth.hpp"
#include "crashspot/types.hpp"

namespace testhelp {

inline crashspot::EventRecord make_event(std::string id, const std::string& timestamp,
                                         double lon, double lat,
                                         crashspot::Severity sev = crashspot::Severity::Low,
                                         crashspot::Category cat = crashspot::Category::VehicleVehicle) {
  crashspot::EventRecord e;
  e.id = std::move(id);
  const auto t = crashspot::parse_datetime(timestamp);
  REQUIRE(t.has_value());
  e.timestamp = *t;
  e.lon = lon;
  e.lat = lat;
  e.severity = sev;
  e.category = cat;
  return e;
}

// Unit square boundary around the Dubai-ish test area.
inline crashspot::BoundaryPolygon square_boundary(double min_lon, double min_lat,
                                                  double max_lon, double max_lat) {
  crashspot::BoundaryPolygon b;
  b.rings.push_back({{min_lon, min_lat},
                     {max_lon, min_lat},
                     {max_lon, max_lat},
                     {min_lon, max_lat},
                     {min_lon, min_lat}});
  return b;
}

// Deterministic test RNG, independent of the library's generators' streams.
struct TestRng {
  crashspot::synth::SplitMix64 rng;
  explicit TestRng(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return lo + rng.next_double() * (hi - lo); }
  int below(int n) { return static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))); }
};

}  // namespace testhelp
