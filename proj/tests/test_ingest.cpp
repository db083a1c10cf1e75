#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "crashspot/ingest.hpp"
#include "helpers.hpp"

using namespace crashspot;
using testhelp::make_event;

#ifndef CRASHSPOT_TEST_DATA_DIR
#define CRASHSPOT_TEST_DATA_DIR "tests/data"
#endif

namespace {

const std::string kDataDir = CRASHSPOT_TEST_DATA_DIR;

ParseResult parse_text(const std::string& text, char delim = ',') {
  std::istringstream in(text);
  return parse_events(in, ColumnMap{}, delim);
}

}  // namespace

TEST_CASE("parse_events maps well-formed rows") {
  const auto result = parse_text(
      "id,timestamp,lon,lat,category,severity\n"
      "A1,2024-11-05 06:30,55.27,25.20,vehicle_vehicle,High\n");
  REQUIRE(result.events.size() == 1);
  CHECK(result.rejections.empty());
  const EventRecord& e = result.events[0];
  CHECK(e.id == "A1");
  CHECK(e.lon == doctest::Approx(55.27));
  CHECK(e.lat == doctest::Approx(25.20));
  CHECK(e.severity == Severity::High);
  CHECK(e.category == Category::VehicleVehicle);
}

TEST_CASE("parse_events honors the column mapping and extra columns") {
  std::istringstream in(
      "ref;when;x;y;ignored;kind;sev\n"
      "R1;2025-01-02 10:00;55.1;25.1;zzz;pedestrian;low\n");
  ColumnMap columns;
  columns.id = "ref";
  columns.timestamp = "when";
  columns.lon = "x";
  columns.lat = "y";
  columns.category = "kind";
  columns.severity = "sev";
  const auto result = parse_events(in, columns, ';');
  REQUIRE(result.events.size() == 1);
  CHECK(result.events[0].category == Category::Pedestrian);
}

TEST_CASE("parse_events rejects malformed rows with reasons, never silently") {
  const auto result = parse_text(
      "id,timestamp,lon,lat,category,severity\n"
      "A1,2024-11-05 06:30,55.27,95.0,vehicle_vehicle,high\n"
      "A2,2024-11-05 06:30,185.0,25.0,vehicle_vehicle,high\n"
      "A3,not a time,55.27,25.0,vehicle_vehicle,high\n"
      "A4,2024-11-05 06:30,55.27,25.0,ufo,high\n"
      "A5,2024-11-05 06:30,55.27,25.0,vehicle_vehicle,medium\n"
      ",2024-11-05 06:30,55.27,25.0,vehicle_vehicle,high\n"
      "A7,2024-11-05 06:30,55.27,25.0,vehicle_vehicle,high\n");
  CHECK(result.events.size() == 1);
  REQUIRE(result.rejections.size() == 6);
  CHECK(result.rejections[0].line == 2);
  CHECK(result.rejections[0].reason == "latitude out of range");
  CHECK(result.rejections[1].reason == "longitude out of range");
  CHECK(result.rejections[2].reason == "unparseable timestamp");
  CHECK(result.rejections[3].reason == "unknown category");
  CHECK(result.rejections[4].reason == "unknown severity");
  CHECK(result.rejections[5].reason == "empty id");
}

TEST_CASE("parse_events fixture file: 10 valid rows, 2 rejections") {
  std::ifstream in(kDataDir + "/events_mixed.csv");
  REQUIRE(in.good());
  const auto result = parse_events(in, ColumnMap{});
  CHECK(result.events.size() == 10);
  REQUIRE(result.rejections.size() == 2);
  CHECK(result.rejections[0].line == 12);  // header is line 1
  CHECK(result.rejections[0].reason == "latitude out of range");
  CHECK(result.rejections[1].reason == "unparseable timestamp");
}

TEST_CASE("parse_events schema and stream errors are fatal") {
  std::istringstream in("id,timestamp,lon,lat,category\nA,2,3,4,5\n");
  CHECK_THROWS_AS(parse_events(in, ColumnMap{}), SchemaError);

  std::ifstream missing("/nonexistent/file.csv");
  CHECK_THROWS_AS(parse_events(missing, ColumnMap{}), IoError);
}

TEST_CASE("quoted fields with embedded delimiters") {
  const auto result = parse_text(
      "id,timestamp,lon,lat,category,severity\n"
      "\"A,1\",2024-11-05 06:30,55.27,25.20,vehicle_vehicle,low\n");
  REQUIRE(result.events.size() == 1);
  CHECK(result.events[0].id == "A,1");
}

TEST_CASE("window filter is inclusive of both endpoints") {
  StudyWindow w({2024, 11, 5}, {2025, 6, 2});
  std::vector<EventRecord> events = {
      make_event("a", "2024-11-04 23:59", 55, 25),  // before start
      make_event("b", "2024-11-05 00:00", 55, 25),
      make_event("c", "2025-06-02 23:59", 55, 25),  // exactly end date
      make_event("d", "2025-06-03 00:00", 55, 25),
  };
  const FilterResult r = filter_window(events, w);
  CHECK(r.kept.size() == 2);
  CHECK(r.removed == 2);
  CHECK(r.kept[0].id == "b");
  CHECK(r.kept[1].id == "c");

  const FilterResult empty = filter_window({}, w);
  CHECK(empty.kept.empty());
  CHECK(empty.removed == 0);
}

TEST_CASE("dedupe keeps first occurrence per id") {
  std::vector<EventRecord> events = {
      make_event("A1", "2025-01-01 10:00", 55.1, 25.1),
      make_event("A2", "2025-01-01 11:00", 55.2, 25.2),
      make_event("A1", "2025-01-01 12:00", 55.3, 25.3),
      make_event("A3", "2025-01-01 13:00", 55.4, 25.4),
      make_event("A2", "2025-01-01 14:00", 55.5, 25.5),
  };
  const FilterResult r = dedupe(events);
  CHECK(r.kept.size() == 3);
  CHECK(r.removed == 2);
  CHECK(r.kept[0].lon == doctest::Approx(55.1));  // first A1 won

  const FilterResult again = dedupe(r.kept);
  CHECK(again.kept.size() == 3);
  CHECK(again.removed == 0);

  // Five records where exactly two share an id -> four survive.
  std::vector<EventRecord> five = {
      make_event("B1", "2025-01-01 10:00", 55.1, 25.1),
      make_event("B2", "2025-01-01 11:00", 55.2, 25.2),
      make_event("B3", "2025-01-01 12:00", 55.3, 25.3),
      make_event("B3", "2025-01-01 13:00", 55.4, 25.4),
      make_event("B4", "2025-01-01 14:00", 55.5, 25.5),
  };
  CHECK(dedupe(five).kept.size() == 4);
}

TEST_CASE("point in polygon: even-odd with edges inside") {
  const BoundaryPolygon square = testhelp::square_boundary(0, 0, 1, 1);
  CHECK(point_in_boundary(0.5, 0.5, square));
  CHECK_FALSE(point_in_boundary(1.5, 0.5, square));
  CHECK_FALSE(point_in_boundary(-0.1, 0.5, square));
  // Edges and vertices count as inside.
  CHECK(point_in_boundary(0.0, 0.5, square));
  CHECK(point_in_boundary(1.0, 0.5, square));
  CHECK(point_in_boundary(0.5, 0.0, square));
  CHECK(point_in_boundary(0.5, 1.0, square));
  CHECK(point_in_boundary(0.0, 0.0, square));
}

TEST_CASE("point in polygon: holes via even-odd rule") {
  BoundaryPolygon donut = testhelp::square_boundary(0, 0, 10, 10);
  donut.rings.push_back({{4, 4}, {6, 4}, {6, 6}, {4, 6}, {4, 4}});
  CHECK(point_in_boundary(2, 2, donut));
  CHECK_FALSE(point_in_boundary(5, 5, donut));  // inside the hole
  CHECK(point_in_boundary(5, 4, donut));        // on the hole edge
}

TEST_CASE("spatial filter drops outside points and validates the polygon") {
  const BoundaryPolygon square = testhelp::square_boundary(55.0, 24.9, 55.6, 25.5);
  std::vector<EventRecord> events = {
      make_event("in1", "2025-01-01 10:00", 55.3, 25.2),
      make_event("out1", "2025-01-01 10:00", 54.0, 25.2),
      make_event("in2", "2025-01-01 10:00", 55.0, 24.9),  // corner
      make_event("out2", "2025-01-01 10:00", 55.3, 25.6),
  };
  const FilterResult r = spatial_filter(events, square);
  CHECK(r.kept.size() == 2);
  CHECK(r.removed == 2);

  BoundaryPolygon degenerate;
  degenerate.rings.push_back({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  CHECK_THROWS_AS(spatial_filter(events, degenerate), ConfigError);
}

TEST_CASE("spatial filter result is order independent") {
  const BoundaryPolygon square = testhelp::square_boundary(55.0, 24.9, 55.6, 25.5);
  testhelp::TestRng rng(23);
  std::vector<EventRecord> events;
  for (int i = 0; i < 200; ++i) {
    events.push_back(make_event("p" + std::to_string(i), "2025-01-01 10:00",
                                rng.uniform(54.8, 55.8), rng.uniform(24.7, 25.7)));
  }
  auto kept_ids = [&](const std::vector<EventRecord>& input) {
    auto r = spatial_filter(input, square);
    std::vector<std::string> ids;
    for (const auto& e : r.kept) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  std::vector<EventRecord> shuffled = events;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
  }
  CHECK(kept_ids(events) == kept_ids(shuffled));
}

TEST_CASE("filters are idempotent and conserve counts") {
  testhelp::TestRng rng(29);
  std::vector<EventRecord> events;
  for (int i = 0; i < 300; ++i) {
    const int month = 1 + rng.below(12);
    events.push_back(make_event("x" + std::to_string(rng.below(250)),
                                format_date({2025, month, 1 + rng.below(28)}) + " 10:00",
                                rng.uniform(54.8, 55.8), rng.uniform(24.7, 25.7)));
  }
  StudyWindow w({2025, 2, 1}, {2025, 7, 31});
  const BoundaryPolygon square = testhelp::square_boundary(55.0, 24.9, 55.6, 25.5);

  const auto w1 = filter_window(events, w);
  CHECK(w1.kept.size() + w1.removed == events.size());
  const auto w2 = filter_window(w1.kept, w);
  CHECK(w2.kept.size() == w1.kept.size());
  CHECK(w2.removed == 0);

  const auto d1 = dedupe(w1.kept);
  CHECK(d1.kept.size() + d1.removed == w1.kept.size());
  const auto d2 = dedupe(d1.kept);
  CHECK(d2.removed == 0);

  const auto s1 = spatial_filter(d1.kept, square);
  CHECK(s1.kept.size() + s1.removed == d1.kept.size());
  const auto s2 = spatial_filter(s1.kept, square);
  CHECK(s2.removed == 0);
}

TEST_CASE("golden counts: boundary filter at the published proportions") {
  // Synthetic stand-in for the production dataset: 33,604 collision records
  // of which 124 fall outside the boundary; 1,367 pedestrian records of
  // which 2 fall outside.
  const BoundaryPolygon square = testhelp::square_boundary(55.0, 24.9, 55.6, 25.5);
  testhelp::TestRng rng(31);
  std::vector<EventRecord> events;
  events.reserve(33604);
  auto add = [&](int n, bool inside, Category cat, const char* prefix) {
    for (int i = 0; i < n; ++i) {
      const double lon = inside ? rng.uniform(55.01, 55.59) : rng.uniform(55.7, 55.9);
      const double lat = inside ? rng.uniform(24.91, 25.49) : rng.uniform(25.51, 25.7);
      events.push_back(make_event(prefix + std::to_string(i), "2025-01-15 10:00", lon, lat,
                                  Severity::Low, cat));
    }
  };
  add(33480 - 1365, true, Category::VehicleVehicle, "cv");
  add(124 - 2, false, Category::VehicleVehicle, "xv");
  add(1365, true, Category::Pedestrian, "cp");
  add(2, false, Category::Pedestrian, "xp");
  REQUIRE(events.size() == 33604);

  const FilterResult all = spatial_filter(events, square);
  CHECK(all.kept.size() == 33480);
  CHECK(all.removed == 124);

  std::vector<EventRecord> pedestrians;
  for (const auto& e : events) {
    if (e.category == Category::Pedestrian) pedestrians.push_back(e);
  }
  REQUIRE(pedestrians.size() == 1367);
  const FilterResult ped = spatial_filter(pedestrians, square);
  CHECK(ped.kept.size() == 1365);
  CHECK(ped.removed == 2);
}

TEST_CASE("subcategory shares reproduce the published percentage table") {
  // Category counts with the same proportions as the production dataset.
  const std::vector<std::pair<Category, int>> counts = {
      {Category::VehicleObject, 17149}, {Category::VehicleVehicle, 6901},
      {Category::Motorcycle, 3555},     {Category::Rollover, 2271},
      {Category::HitAndRun, 1423},      {Category::Pedestrian, 1367},
      {Category::Bicycle, 719},         {Category::Animal, 158},
      {Category::SpecialVehicle, 61},
  };
  std::vector<EventRecord> events;
  events.reserve(33604);
  int id = 0;
  for (const auto& [cat, n] : counts) {
    for (int i = 0; i < n; ++i) {
      events.push_back(make_event("t" + std::to_string(id++), "2025-01-15 10:00", 55.3, 25.2,
                                  Severity::Low, cat));
    }
  }
  REQUIRE(events.size() == 33604);

  const auto shares = subcategory_shares(events);
  REQUIRE(shares.size() == counts.size());
  const std::vector<double> expected_pct = {51.03, 20.54, 10.58, 6.76, 4.23,
                                            4.07,  2.14,  0.47,  0.18};
  double rounded_sum = 0.0;
  std::uint64_t count_sum = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    CHECK(shares[i].category == counts[i].first);
    CHECK(shares[i].count == static_cast<std::uint64_t>(counts[i].second));
    const double rounded = std::round(shares[i].percent * 100.0) / 100.0;
    CHECK(rounded == doctest::Approx(expected_pct[i]).epsilon(1e-9));
    rounded_sum += rounded;
    count_sum += shares[i].count;
    // Percent recomputes exactly as 100 * count / total.
    CHECK(shares[i].percent ==
          doctest::Approx(100.0 * static_cast<double>(shares[i].count) / 33604.0).epsilon(1e-12));
  }
  CHECK(count_sum == events.size());
  CHECK(std::abs(rounded_sum - 100.00) <= 0.05);
}

TEST_CASE("subcategory shares edge cases") {
  CHECK(subcategory_shares({}).empty());

  std::vector<EventRecord> single = {make_event("a", "2025-01-01 10:00", 55, 25)};
  const auto s1 = subcategory_shares(single);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].percent == doctest::Approx(100.0));

  std::vector<EventRecord> mix = {
      make_event("a", "2025-01-01 10:00", 55, 25, Severity::Low, Category::Bicycle),
      make_event("b", "2025-01-01 10:00", 55, 25, Severity::Low, Category::Bicycle),
      make_event("c", "2025-01-01 10:00", 55, 25, Severity::Low, Category::Bicycle),
      make_event("d", "2025-01-01 10:00", 55, 25, Severity::Low, Category::Animal),
  };
  const auto s2 = subcategory_shares(mix);
  REQUIRE(s2.size() == 2);
  CHECK(s2[0].percent == doctest::Approx(75.0));
  CHECK(s2[1].percent == doctest::Approx(25.0));
}

TEST_CASE("boundary geojson loader handles polygons and feature collections") {
  const BoundaryPolygon b = load_boundary_geojson(kDataDir + "/boundary_square.geojson");
  REQUIRE(b.rings.size() == 1);
  CHECK(b.rings[0].size() == 5);
  CHECK(point_in_boundary(55.3, 25.2, b));
  CHECK_FALSE(point_in_boundary(54.0, 25.2, b));

  CHECK_THROWS_AS(load_boundary_geojson("/nonexistent.geojson"), IoError);
}
