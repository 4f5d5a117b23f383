#include "eventsum/date.hpp"

#include <array>
#include <charconv>
#include <cstdlib>

namespace eventsum {

namespace {

// Howard Hinnant's civil-date algorithms; exact over the full int range.
constexpr int days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

struct Civil {
  int y;
  unsigned m;
  unsigned d;
};

constexpr Civil civil_from_days(int z) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

constexpr int days_in_month(int y, int m) {
  constexpr std::array<int, 12> lens = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) return 29;
  return lens[m - 1];
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  return Date(days_from_civil(year, month, day));
}

std::optional<Date> Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y, m, d;
  if (!parse_int(iso.substr(0, 4), y) || !parse_int(iso.substr(5, 2), m) ||
      !parse_int(iso.substr(8, 2), d))
    return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  return from_ymd(y, m, d);
}

int Date::year() const { return civil_from_days(serial_).y; }
int Date::month() const { return static_cast<int>(civil_from_days(serial_).m); }
int Date::day() const { return static_cast<int>(civil_from_days(serial_).d); }

std::string Date::to_string() const {
  const Civil c = civil_from_days(serial_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.y, c.m, c.d);
  return buf;
}

std::optional<std::int64_t> parse_instant(std::string_view iso) {
  if (iso.size() < 19 || iso[10] != 'T') return std::nullopt;
  auto date = Date::parse(iso.substr(0, 10));
  if (!date) return std::nullopt;
  int hh, mm, ss;
  if (iso[13] != ':' || iso[16] != ':') return std::nullopt;
  if (!parse_int(iso.substr(11, 2), hh) || !parse_int(iso.substr(14, 2), mm) ||
      !parse_int(iso.substr(17, 2), ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  std::string_view rest = iso.substr(19);
  if (!rest.empty() && rest[0] == '.') {  // fractional seconds, truncated
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 1) return std::nullopt;
    rest = rest.substr(i);
  }
  std::int64_t offset = 0;
  if (rest == "Z" || rest.empty()) {
    // treated as UTC
  } else if ((rest[0] == '+' || rest[0] == '-') && rest.size() == 6 && rest[3] == ':') {
    int oh, om;
    if (!parse_int(rest.substr(1, 2), oh) || !parse_int(rest.substr(4, 2), om))
      return std::nullopt;
    offset = (rest[0] == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
  } else {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(date->serial()) * 86400 + hh * 3600 + mm * 60 + ss - offset;
}

Date date_of_instant(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  if (epoch_seconds < 0 && epoch_seconds % 86400 != 0) --days;
  return Date(static_cast<int>(days));
}

}  // namespace eventsum
