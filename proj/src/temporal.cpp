#include "crashspot/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "crashspot/stats.hpp"

namespace crashspot {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

std::string month_label(int year, int month) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

// Months are indexed as year*12 + (month-1) so ranges are contiguous.
int month_ordinal(const CivilDate& d) { return d.year * 12 + (d.month - 1); }

std::vector<std::string> month_categories(int first_ordinal, int last_ordinal) {
  std::vector<std::string> out;
  for (int m = first_ordinal; m <= last_ordinal; ++m) {
    out.push_back(month_label(m / 12, m % 12 + 1));
  }
  return out;
}

// Row index of an event under the given factor, relative to the label list.
int category_row(const EventRecord& e, FactorKind kind, int first_month_ordinal) {
  switch (kind) {
    case FactorKind::TimeOfDay:
      return static_cast<int>(assign_period(e.timestamp));
    case FactorKind::DayOfWeek:
      return weekday_index(e.timestamp.date);
    case FactorKind::Month:
      return month_ordinal(e.timestamp.date) - first_month_ordinal;
  }
  return -1;
}

struct FactorLayout {
  std::vector<std::string> labels;
  int first_month_ordinal = 0;
};

FactorLayout factor_layout(FactorKind kind, std::span<const EventRecord> events,
                           const StudyWindow* window) {
  FactorLayout layout;
  switch (kind) {
    case FactorKind::TimeOfDay:
      for (Period p : kAllPeriods) layout.labels.emplace_back(to_string(p));
      break;
    case FactorKind::DayOfWeek:
      layout.labels.assign(kWeekdayNames.begin(), kWeekdayNames.end());
      break;
    case FactorKind::Month: {
      int lo, hi;
      if (window != nullptr) {
        lo = month_ordinal(window->start());
        hi = month_ordinal(window->end());
      } else {
        if (events.empty()) throw DataError("month factor requires events or a window");
        lo = hi = month_ordinal(events[0].timestamp.date);
        for (const auto& e : events) {
          lo = std::min(lo, month_ordinal(e.timestamp.date));
          hi = std::max(hi, month_ordinal(e.timestamp.date));
        }
      }
      layout.labels = month_categories(lo, hi);
      layout.first_month_ordinal = lo;
      break;
    }
  }
  return layout;
}

}  // namespace

std::string_view to_string(Period p) {
  switch (p) {
    case Period::Morning: return "Morning";
    case Period::Afternoon: return "Afternoon";
    case Period::Evening: return "Evening";
    case Period::Night: return "Night";
  }
  return "?";
}

Period assign_period(const CivilDateTime& t) {
  if (t.hour < 6) return Period::Night;
  if (t.hour < 12) return Period::Morning;
  if (t.hour < 18) return Period::Afternoon;
  return Period::Evening;
}

std::string_view to_string(FactorKind f) {
  switch (f) {
    case FactorKind::TimeOfDay: return "time_of_day";
    case FactorKind::DayOfWeek: return "day_of_week";
    case FactorKind::Month: return "month";
  }
  return "?";
}

std::optional<FactorKind> factor_from_string(std::string_view s) {
  if (s == "time_of_day") return FactorKind::TimeOfDay;
  if (s == "day_of_week") return FactorKind::DayOfWeek;
  if (s == "month") return FactorKind::Month;
  return std::nullopt;
}

std::vector<std::string> factor_categories(FactorKind kind, std::span<const EventRecord> events,
                                           const StudyWindow* window) {
  return factor_layout(kind, events, window).labels;
}

std::uint64_t ContingencyTable::total() const {
  std::uint64_t n = 0;
  for (const auto& row : observed) n += row[0] + row[1];
  return n;
}

ContingencyTable build_table(std::span<const EventRecord> events, FactorKind factor,
                             const StudyWindow* window) {
  const FactorLayout layout = factor_layout(factor, events, window);
  ContingencyTable table;
  table.row_labels = layout.labels;
  table.observed.assign(layout.labels.size(), {0, 0});
  for (const auto& e : events) {
    const int row = category_row(e, factor, layout.first_month_ordinal);
    if (row < 0 || row >= table.rows()) {
      throw DataError("event at " + format_datetime(e.timestamp) +
                      " falls outside the factor's category range");
    }
    const int col = e.severity == Severity::High ? 0 : 1;
    ++table.observed[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
  }
  return table;
}

std::vector<std::array<double, 2>> expected_counts(const ContingencyTable& table) {
  const std::uint64_t n = table.total();
  if (n == 0) throw DataError("expected counts require a non-empty table");
  std::array<std::uint64_t, 2> col_totals = {0, 0};
  std::vector<std::uint64_t> row_totals(table.observed.size(), 0);
  for (std::size_t i = 0; i < table.observed.size(); ++i) {
    row_totals[i] = table.observed[i][0] + table.observed[i][1];
    col_totals[0] += table.observed[i][0];
    col_totals[1] += table.observed[i][1];
  }
  std::vector<std::array<double, 2>> expected(table.observed.size());
  for (std::size_t i = 0; i < table.observed.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      expected[i][j] = static_cast<double>(row_totals[i]) * static_cast<double>(col_totals[j]) /
                       static_cast<double>(n);
    }
  }
  return expected;
}

ChiSquareReport chi_square(const ContingencyTable& table) {
  if (table.rows() < 2) throw DataError("chi-square requires at least two categories");
  const auto expected = expected_counts(table);
  for (const auto& row : expected) {
    if (row[0] <= 0.0 || row[1] <= 0.0) {
      throw DataError("degenerate margin: a category or severity column has zero events");
    }
  }
  ChiSquareReport report;
  report.n = table.total();
  report.df = table.rows() - 1;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < table.observed.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double diff = static_cast<double>(table.observed[i][j]) - expected[i][j];
      chi2 += diff * diff / expected[i][j];
    }
  }
  report.chi2 = chi2;
  report.p_value = chi2_sf(chi2, report.df);
  report.cramers_v = cramers_v(chi2, report.n);
  return report;
}

double cramers_v(double chi2, std::uint64_t n) {
  if (n == 0) throw DataError("cramers_v: n must be positive");
  if (chi2 < 0.0) throw DataError("cramers_v: chi2 must be non-negative");
  return std::sqrt(chi2 / static_cast<double>(n));
}

double daily_mean(std::uint64_t count, const StudyWindow& window) {
  const std::int64_t days = window.observed_days();
  if (days <= 0) throw DataError("daily_mean: no observed days");
  return static_cast<double>(count) / static_cast<double>(days);
}

std::vector<BinSeverityShare> severity_share_by_bin(std::span<const EventRecord> events,
                                                    FactorKind factor,
                                                    const StudyWindow* window) {
  const ContingencyTable table = build_table(events, factor, window);
  std::vector<BinSeverityShare> out;
  out.reserve(table.observed.size());
  for (std::size_t i = 0; i < table.observed.size(); ++i) {
    BinSeverityShare share;
    share.label = table.row_labels[i];
    share.n_high = table.observed[i][0];
    share.n_low = table.observed[i][1];
    const std::uint64_t n = share.n_high + share.n_low;
    if (n > 0) {
      share.percent_high = 100.0 * static_cast<double>(share.n_high) / static_cast<double>(n);
    }
    out.push_back(std::move(share));
  }
  return out;
}

std::optional<double> severity_risk_ratio(std::span<const EventRecord> events, Period a,
                                          Period b) {
  std::array<std::uint64_t, 4> high{}, total{};
  for (const auto& e : events) {
    const auto p = static_cast<std::size_t>(assign_period(e.timestamp));
    ++total[p];
    if (e.severity == Severity::High) ++high[p];
  }
  const auto ia = static_cast<std::size_t>(a);
  const auto ib = static_cast<std::size_t>(b);
  if (total[ia] == 0 || total[ib] == 0 || high[ib] == 0) return std::nullopt;
  const double share_a = static_cast<double>(high[ia]) / static_cast<double>(total[ia]);
  const double share_b = static_cast<double>(high[ib]) / static_cast<double>(total[ib]);
  return share_a / share_b - 1.0;
}

}  // namespace crashspot
