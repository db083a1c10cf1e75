#include <doctest.h>

#include <cmath>
#include <vector>

#include "crashspot/temporal.hpp"
#include "helpers.hpp"

using namespace crashspot;
using testhelp::make_event;

namespace {

CivilDateTime at_clock(int hour, int minute) {
  return CivilDateTime{{2025, 1, 15}, hour, minute};
}

}  // namespace

TEST_CASE("assign_period boundaries") {
  CHECK(assign_period(at_clock(6, 0)) == Period::Morning);
  CHECK(assign_period(at_clock(11, 59)) == Period::Morning);
  CHECK(assign_period(at_clock(12, 0)) == Period::Afternoon);
  CHECK(assign_period(at_clock(17, 59)) == Period::Afternoon);
  CHECK(assign_period(at_clock(18, 0)) == Period::Evening);
  CHECK(assign_period(at_clock(23, 59)) == Period::Evening);
  CHECK(assign_period(at_clock(0, 0)) == Period::Night);
  CHECK(assign_period(at_clock(5, 59)) == Period::Night);
}

TEST_CASE("assign_period partitions all 1440 minutes") {
  std::array<int, 4> counts{};
  for (int h = 0; h < 24; ++h) {
    for (int m = 0; m < 60; ++m) {
      ++counts[static_cast<std::size_t>(assign_period(at_clock(h, m)))];
    }
  }
  CHECK(counts[0] == 360);
  CHECK(counts[1] == 360);
  CHECK(counts[2] == 360);
  CHECK(counts[3] == 360);
}

TEST_CASE("build_table counts by period and severity") {
  std::vector<EventRecord> events = {
      make_event("a", "2025-01-15 07:00", 55, 25, Severity::Low),
      make_event("b", "2025-01-15 13:00", 55, 25, Severity::Low),
      make_event("c", "2025-01-15 19:00", 55, 25, Severity::Low),
      make_event("d", "2025-01-15 01:00", 55, 25, Severity::Low),
  };
  const ContingencyTable t = build_table(events, FactorKind::TimeOfDay);
  REQUIRE(t.rows() == 4);
  for (const auto& row : t.observed) {
    CHECK(row[0] == 0);  // High column
    CHECK(row[1] == 1);  // Low column
  }
  CHECK(t.total() == events.size());
}

TEST_CASE("build_table hand tally over a 12-event fixture") {
  std::vector<EventRecord> events;
  // Morning: 2 high 1 low; afternoon: 0 high 3 low; evening: 1 high 2 low;
  // night: 2 high 1 low.
  int id = 0;
  auto add = [&](int hour, Severity s) {
    events.push_back(make_event("e" + std::to_string(id++),
                                "2025-01-15 " + std::string(hour < 10 ? "0" : "") +
                                    std::to_string(hour) + ":30",
                                55, 25, s));
  };
  add(7, Severity::High); add(8, Severity::High); add(9, Severity::Low);
  add(13, Severity::Low); add(14, Severity::Low); add(15, Severity::Low);
  add(19, Severity::High); add(20, Severity::Low); add(21, Severity::Low);
  add(1, Severity::High); add(2, Severity::High); add(3, Severity::Low);

  const ContingencyTable t = build_table(events, FactorKind::TimeOfDay);
  REQUIRE(t.rows() == 4);
  CHECK(t.observed[0] == std::array<std::uint64_t, 2>{2, 1});
  CHECK(t.observed[1] == std::array<std::uint64_t, 2>{0, 3});
  CHECK(t.observed[2] == std::array<std::uint64_t, 2>{1, 2});
  CHECK(t.observed[3] == std::array<std::uint64_t, 2>{2, 1});
}

TEST_CASE("expected counts reproduce margins") {
  ContingencyTable t;
  t.row_labels = {"a", "b"};
  SUBCASE("uniform") {
    t.observed = {{10, 10}, {10, 10}};
    const auto e = expected_counts(t);
    CHECK(e[0][0] == doctest::Approx(10.0));
    CHECK(e[1][1] == doctest::Approx(10.0));
  }
  SUBCASE("hand-evaluated cross table") {
    t.observed = {{20, 30}, {30, 20}};
    const auto e = expected_counts(t);
    for (const auto& row : e) {
      CHECK(row[0] == doctest::Approx(25.0).epsilon(1e-12));
      CHECK(row[1] == doctest::Approx(25.0).epsilon(1e-12));
    }
  }
  SUBCASE("margins preserved") {
    t.observed = {{7, 3}, {12, 41}};
    const auto e = expected_counts(t);
    CHECK(e[0][0] + e[0][1] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(e[1][0] + e[1][1] == doctest::Approx(53.0).epsilon(1e-12));
    CHECK(e[0][0] + e[1][0] == doctest::Approx(19.0).epsilon(1e-12));
    CHECK(e[0][0] + e[0][1] + e[1][0] + e[1][1] == doctest::Approx(63.0).epsilon(1e-9));
  }
}

TEST_CASE("chi-square of the hand table is exactly 4") {
  ContingencyTable t;
  t.row_labels = {"a", "b"};
  t.observed = {{20, 30}, {30, 20}};
  const ChiSquareReport r = chi_square(t);
  CHECK(r.chi2 == 4.0);  // exact in IEEE arithmetic
  CHECK(r.df == 1);
  CHECK(r.n == 100);
  CHECK(r.cramers_v == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("chi-square is zero iff observed equals expected") {
  ContingencyTable t;
  t.row_labels = {"a", "b", "c"};
  t.observed = {{10, 20}, {20, 40}, {5, 10}};  // perfectly proportional rows
  const ChiSquareReport r = chi_square(t);
  CHECK(r.chi2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.df == 2);
}

TEST_CASE("chi-square invariant under row permutation") {
  ContingencyTable a, b;
  a.row_labels = {"r1", "r2", "r3"};
  a.observed = {{12, 7}, {4, 19}, {8, 8}};
  b.row_labels = {"r3", "r1", "r2"};
  b.observed = {{8, 8}, {12, 7}, {4, 19}};
  CHECK(chi_square(a).chi2 == doctest::Approx(chi_square(b).chi2).epsilon(1e-12));
}

TEST_CASE("integer scaling of the table scales chi2 linearly") {
  ContingencyTable t;
  t.row_labels = {"a", "b", "c"};
  t.observed = {{13, 7}, {4, 21}, {9, 2}};
  const double base = chi_square(t).chi2;
  for (std::uint64_t c : {2ULL, 7ULL, 100ULL}) {
    ContingencyTable scaled = t;
    for (auto& row : scaled.observed) {
      row[0] *= c;
      row[1] *= c;
    }
    const double got = chi_square(scaled).chi2;
    CHECK(std::abs(got - static_cast<double>(c) * base) <=
          1e-12 * static_cast<double>(c) * base);
  }
}

TEST_CASE("degenerate margins raise instead of collapsing") {
  ContingencyTable t;
  t.row_labels = {"a", "b"};
  SUBCASE("all-zero row") {
    t.observed = {{0, 0}, {10, 10}};
    CHECK_THROWS_WITH_AS(chi_square(t), doctest::Contains("degenerate margin"), DataError);
  }
  SUBCASE("all-zero column") {
    t.observed = {{10, 0}, {10, 0}};
    CHECK_THROWS_AS(chi_square(t), DataError);
  }
}

TEST_CASE("factor category layouts and df") {
  std::vector<EventRecord> events;
  int id = 0;
  // One low + one high event in every month of the study window and every
  // weekday, spread over periods.
  constexpr std::array<const char*, 4> kHours = {"03:00", "09:00", "15:00", "21:00"};
  for (int m = 0; m < 8; ++m) {
    const int year = m < 2 ? 2024 : 2025;
    const int month = m < 2 ? 11 + m : m - 1;
    for (int day = 1; day <= 14; ++day) {
      events.push_back(make_event(
          "m" + std::to_string(id++),
          format_date({year, month, day}) + " " + kHours[static_cast<std::size_t>(day % 4)],
          55, 25, day % 3 ? Severity::Low : Severity::High));
    }
  }
  StudyWindow window({2024, 11, 5}, {2025, 6, 2}, {{2024, 11, 9}, {2024, 11, 10}});

  const ContingencyTable by_month = build_table(events, FactorKind::Month, &window);
  CHECK(by_month.rows() == 8);
  CHECK(by_month.row_labels.front() == "2024-11");
  CHECK(by_month.row_labels.back() == "2025-06");
  CHECK(chi_square(build_table(events, FactorKind::DayOfWeek)).df == 6);
  // df = r - 1 per factor: 3 for time of day, 6 for day of week, 7 for an
  // eight-month window.
  CHECK(chi_square(by_month).df == 7);
  CHECK(chi_square(build_table(events, FactorKind::TimeOfDay)).df == 3);
}

TEST_CASE("cramers_v reproduces the reported effect sizes") {
  CHECK(std::abs(cramers_v(146.29, 33480) - 0.066) < 0.001);
  CHECK(std::abs(cramers_v(13.34, 33480) - 0.020) < 0.001);
  CHECK(std::abs(cramers_v(45.89, 33480) - 0.037) < 0.001);
  CHECK(std::abs(cramers_v(0.72, 1365) - 0.023) < 0.001);
  CHECK(std::abs(cramers_v(5.72, 1365) - 0.065) < 0.001);
  CHECK(cramers_v(0.0, 100) == 0.0);
  CHECK_THROWS_AS(cramers_v(1.0, 0), DataError);
}

TEST_CASE("daily means over the study window") {
  StudyWindow window({2024, 11, 5}, {2025, 6, 2}, {{2024, 11, 9}, {2024, 11, 10}});
  CHECK(std::abs(daily_mean(33480, window) - 160.96) < 0.01);
  CHECK(std::abs(daily_mean(1365, window) - 6.56) < 0.01);
  CHECK(daily_mean(0, window) == 0.0);
}

TEST_CASE("severity shares per bin, including empty bins") {
  std::vector<EventRecord> events = {
      make_event("a", "2025-01-15 07:00", 55, 25, Severity::High),
      make_event("b", "2025-01-15 08:00", 55, 25, Severity::High),
      make_event("c", "2025-01-15 09:00", 55, 25, Severity::High),
      make_event("d", "2025-01-15 10:00", 55, 25, Severity::Low),
      make_event("e", "2025-01-15 13:00", 55, 25, Severity::Low),
  };
  const auto shares = severity_share_by_bin(events, FactorKind::TimeOfDay);
  REQUIRE(shares.size() == 4);
  CHECK(shares[0].label == "Morning");
  REQUIRE(shares[0].percent_high.has_value());
  CHECK(*shares[0].percent_high == doctest::Approx(75.0));
  REQUIRE(shares[1].percent_high.has_value());
  CHECK(*shares[1].percent_high == doctest::Approx(0.0));
  CHECK_FALSE(shares[2].percent_high.has_value());  // Evening: no events -> null
  CHECK_FALSE(shares[3].percent_high.has_value());
}

TEST_CASE("hand-tallied shares for a 20-event fixture") {
  std::vector<EventRecord> events;
  int id = 0;
  auto add = [&](const char* clock, Severity s) {
    events.push_back(make_event("s" + std::to_string(id++),
                                std::string("2025-02-01 ") + clock, 55, 25, s));
  };
  // Morning 5 events 2 high; afternoon 5 events 1 high; evening 6 events
  // 3 high; night 4 events 4 high.
  add("06:10", Severity::High); add("07:10", Severity::High); add("08:10", Severity::Low);
  add("09:10", Severity::Low);  add("10:10", Severity::Low);
  add("12:10", Severity::High); add("13:10", Severity::Low); add("14:10", Severity::Low);
  add("15:10", Severity::Low);  add("16:10", Severity::Low);
  add("18:10", Severity::High); add("19:10", Severity::High); add("20:10", Severity::High);
  add("21:10", Severity::Low);  add("22:10", Severity::Low);  add("23:10", Severity::Low);
  add("00:10", Severity::High); add("01:10", Severity::High); add("02:10", Severity::High);
  add("03:10", Severity::High);

  const auto shares = severity_share_by_bin(events, FactorKind::TimeOfDay);
  REQUIRE(shares.size() == 4);
  CHECK(*shares[0].percent_high == doctest::Approx(40.0));
  CHECK(*shares[1].percent_high == doctest::Approx(20.0));
  CHECK(*shares[2].percent_high == doctest::Approx(50.0));
  CHECK(*shares[3].percent_high == doctest::Approx(100.0));

  // Night/afternoon high-severity ratio: 1.00 / 0.20 - 1 = +400%.
  const auto ratio = severity_risk_ratio(events, Period::Night, Period::Afternoon);
  REQUIRE(ratio.has_value());
  CHECK(*ratio == doctest::Approx(4.0).epsilon(1e-12));
}
