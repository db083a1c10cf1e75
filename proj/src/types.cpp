#include "crashspot/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace crashspot {

namespace {

struct CategoryName {
  Category category;
  std::string_view name;
};

constexpr std::array<CategoryName, kCategoryCount> kCategoryNames = {{
    {Category::VehicleObject, "vehicle_object"},
    {Category::VehicleVehicle, "vehicle_vehicle"},
    {Category::Motorcycle, "motorcycle"},
    {Category::Rollover, "rollover"},
    {Category::HitAndRun, "hit_and_run"},
    {Category::Pedestrian, "pedestrian"},
    {Category::Bicycle, "bicycle"},
    {Category::Animal, "animal"},
    {Category::SpecialVehicle, "special_vehicle"},
    {Category::NonCollision, "non_collision"},
}};

std::string normalize_token(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '-' || c == ' ') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::string_view to_string(Severity s) {
  return s == Severity::Low ? "low" : "high";
}

std::string_view to_string(Category c) {
  for (const auto& entry : kCategoryNames) {
    if (entry.category == c) return entry.name;
  }
  return "unknown";
}

std::optional<Severity> severity_from_string(std::string_view s) {
  std::string t = normalize_token(s);
  if (t == "low") return Severity::Low;
  if (t == "high") return Severity::High;
  return std::nullopt;
}

std::optional<Category> category_from_string(std::string_view s) {
  std::string t = normalize_token(s);
  for (const auto& entry : kCategoryNames) {
    if (entry.name == t) return entry.category;
  }
  return std::nullopt;
}

bool is_valid_date(const CivilDate& d) {
  if (d.month < 1 || d.month > 12 || d.day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int dim = kDays[d.month - 1];
  bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
  if (d.month == 2 && leap) dim = 29;
  return d.day <= dim;
}

std::int64_t days_from_civil(const CivilDate& d) {
  // Howard Hinnant's algorithm, epoch 1970-01-01.
  std::int64_t y = d.year;
  const int m = d.month;
  const int dd = d.day;
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(dd) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned dd = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(dd)};
}

int weekday_index(const CivilDate& d) {
  // 1970-01-01 was a Thursday.
  std::int64_t z = days_from_civil(d);
  std::int64_t w = (z + 3) % 7;  // 0 = Monday
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

std::string format_date(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::optional<CivilDate> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  CivilDate d;
  if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
      !parse_int(text.substr(8, 2), d.day)) {
    return std::nullopt;
  }
  if (!is_valid_date(d)) return std::nullopt;
  return d;
}

bool is_valid_datetime(const CivilDateTime& t) {
  return is_valid_date(t.date) && t.hour >= 0 && t.hour <= 23 && t.minute >= 0 &&
         t.minute <= 59;
}

std::string format_datetime(const CivilDateTime& t) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d", t.date.year, t.date.month,
                t.date.day, t.hour, t.minute);
  return buf;
}

std::optional<CivilDateTime> parse_datetime(std::string_view text) {
  if (text.size() < 16) return std::nullopt;
  if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  std::string_view clock = text.substr(11);
  if (clock.size() != 5 && clock.size() != 8) return std::nullopt;
  if (clock[2] != ':') return std::nullopt;
  if (clock.size() == 8 && clock[5] != ':') return std::nullopt;
  CivilDateTime t;
  t.date = *date;
  int sec = 0;
  if (!parse_int(clock.substr(0, 2), t.hour) || !parse_int(clock.substr(3, 2), t.minute)) {
    return std::nullopt;
  }
  if (clock.size() == 8 && !parse_int(clock.substr(6, 2), sec)) return std::nullopt;
  if (sec < 0 || sec > 59) return std::nullopt;
  if (!is_valid_datetime(t)) return std::nullopt;
  return t;
}

StudyWindow::StudyWindow(CivilDate start, CivilDate end, std::set<CivilDate> missing)
    : start_(start), end_(end), missing_(std::move(missing)) {
  if (!is_valid_date(start_) || !is_valid_date(end_)) {
    throw ConfigError("study window: invalid calendar date");
  }
  if (end_ < start_) {
    throw ConfigError("study window: end date before start date");
  }
  for (const auto& d : missing_) {
    if (d < start_ || end_ < d) {
      throw ConfigError("study window: missing date " + format_date(d) +
                        " outside [" + format_date(start_) + ", " + format_date(end_) + "]");
    }
  }
  if (observed_days() <= 0) {
    throw ConfigError("study window: no observed days");
  }
}

std::int64_t StudyWindow::span_days() const {
  return days_from_civil(end_) - days_from_civil(start_) + 1;
}

std::int64_t StudyWindow::observed_days() const {
  return span_days() - static_cast<std::int64_t>(missing_.size());
}

bool StudyWindow::contains(const CivilDate& d) const {
  return !(d < start_) && !(end_ < d);
}

}  // namespace crashspot
