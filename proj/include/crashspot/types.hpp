#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crashspot {

// Error taxonomy used across the library. Config/schema problems are caller
// mistakes; IoError covers unreadable inputs; DataError covers inputs that
// violate an operation's precondition at run time.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Severity { Low, High };

enum class Category {
  VehicleObject,
  VehicleVehicle,
  Motorcycle,
  Rollover,
  HitAndRun,
  Pedestrian,
  Bicycle,
  Animal,
  SpecialVehicle,
  NonCollision,
};

inline constexpr int kCategoryCount = 10;

std::string_view to_string(Severity s);
std::string_view to_string(Category c);
std::optional<Severity> severity_from_string(std::string_view s);
std::optional<Category> category_from_string(std::string_view s);

// Proleptic Gregorian calendar date. Timestamps in this library carry no
// timezone: everything is local civil time and is never converted.
struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  auto operator<=>(const CivilDate&) const = default;
};

bool is_valid_date(const CivilDate& d);

// Days since 1970-01-01 (negative before).
std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t z);

// 0 = Monday .. 6 = Sunday.
int weekday_index(const CivilDate& d);

std::string format_date(const CivilDate& d);                    // YYYY-MM-DD
std::optional<CivilDate> parse_date(std::string_view text);

struct CivilDateTime {
  CivilDate date;
  int hour = 0;    // 0..23
  int minute = 0;  // 0..59
  auto operator<=>(const CivilDateTime&) const = default;
};

bool is_valid_datetime(const CivilDateTime& t);
std::string format_datetime(const CivilDateTime& t);            // YYYY-MM-DD HH:MM
// Accepts "YYYY-MM-DD HH:MM" or "YYYY-MM-DDTHH:MM", optional trailing ":SS"
// (seconds are dropped; records are minute resolution).
std::optional<CivilDateTime> parse_datetime(std::string_view text);

// One geolocated, timestamped, severity-labeled incident.
struct EventRecord {
  std::string id;
  CivilDateTime timestamp;
  double lon = 0.0;  // degrees east, WGS84
  double lat = 0.0;  // degrees north, WGS84
  Category category = Category::VehicleObject;
  Severity severity = Severity::Low;
};

// Inclusive analysis period with known data gaps. observed_days() is the
// denominator for daily means: span minus the missing dates.
class StudyWindow {
 public:
  StudyWindow(CivilDate start, CivilDate end, std::set<CivilDate> missing = {});

  const CivilDate& start() const { return start_; }
  const CivilDate& end() const { return end_; }
  const std::set<CivilDate>& missing_dates() const { return missing_; }

  std::int64_t span_days() const;
  std::int64_t observed_days() const;
  bool contains(const CivilDate& d) const;

 private:
  CivilDate start_;
  CivilDate end_;
  std::set<CivilDate> missing_;
};

}  // namespace crashspot
