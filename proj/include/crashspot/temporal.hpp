#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashspot/types.hpp"

namespace crashspot {

// Civil-clock periods of the day. Boundaries are inclusive at the lower edge:
// Morning 06:00-11:59, Afternoon 12:00-17:59, Evening 18:00-23:59,
// Night 00:00-05:59.
enum class Period { Morning, Afternoon, Evening, Night };

inline constexpr std::array<Period, 4> kAllPeriods = {Period::Morning, Period::Afternoon,
                                                      Period::Evening, Period::Night};

std::string_view to_string(Period p);
Period assign_period(const CivilDateTime& t);

enum class FactorKind { TimeOfDay, DayOfWeek, Month };

std::string_view to_string(FactorKind f);
std::optional<FactorKind> factor_from_string(std::string_view s);

// Ordered category labels for a factor. TimeOfDay and DayOfWeek are fixed;
// Month enumerates the calendar months intersecting the window (or, without
// a window, the span of the events themselves).
std::vector<std::string> factor_categories(FactorKind kind, std::span<const EventRecord> events,
                                           const StudyWindow* window);

// r x 2 observed-count matrix of temporal category (rows) x severity
// (columns: 0 = High, 1 = Low).
struct ContingencyTable {
  std::vector<std::array<std::uint64_t, 2>> observed;
  std::vector<std::string> row_labels;

  std::uint64_t total() const;
  int rows() const { return static_cast<int>(observed.size()); }
};

ContingencyTable build_table(std::span<const EventRecord> events, FactorKind factor,
                             const StudyWindow* window = nullptr);

// E_ij = row_i total * col_j total / N.
std::vector<std::array<double, 2>> expected_counts(const ContingencyTable& table);

struct ChiSquareReport {
  double chi2 = 0.0;
  int df = 0;
  double p_value = 1.0;
  double cramers_v = 0.0;
  std::uint64_t n = 0;
};

// Pearson chi-square test of independence between row category and severity,
// including the survival-function p-value and Cramer's V effect size.
// Throws DataError("degenerate margin") when any expected count is zero,
// i.e. an all-zero row or column; the caller decides whether to collapse.
ChiSquareReport chi_square(const ContingencyTable& table);

// Binary-outcome Cramer's V: sqrt(chi2 / n). Throws DataError when n == 0.
double cramers_v(double chi2, std::uint64_t n);

// Events per observed day; missing dates are excluded from the denominator.
double daily_mean(std::uint64_t count, const StudyWindow& window);

struct BinSeverityShare {
  std::string label;
  std::uint64_t n_low = 0;
  std::uint64_t n_high = 0;
  std::optional<double> percent_high;  // null when the bin has no events
};

std::vector<BinSeverityShare> severity_share_by_bin(std::span<const EventRecord> events,
                                                    FactorKind factor,
                                                    const StudyWindow* window = nullptr);

// Ratio of high-severity shares between two periods minus one, e.g. +0.44
// means 44% higher in `a`. Null when either share is undefined or zero in `b`.
std::optional<double> severity_risk_ratio(std::span<const EventRecord> events, Period a, Period b);

}  // namespace crashspot
