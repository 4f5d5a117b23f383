#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace eventsum {

/// Calendar date stored as days since 1970-01-01, UTC everywhere.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(int serial) : serial_(serial) {}

  static Date from_ymd(int year, int month, int day);
  /// Parses "YYYY-MM-DD". Returns nullopt on malformed or out-of-range input.
  static std::optional<Date> parse(std::string_view iso);

  constexpr int serial() const { return serial_; }
  /// 0 = Sunday ... 6 = Saturday.
  constexpr int weekday() const {
    int w = (serial_ + 4) % 7;
    return w < 0 ? w + 7 : w;
  }

  int year() const;
  int month() const;
  int day() const;
  std::string to_string() const;

  constexpr Date operator+(int days) const { return Date(serial_ + days); }
  constexpr Date operator-(int days) const { return Date(serial_ - days); }
  constexpr int operator-(Date other) const { return serial_ - other.serial_; }
  constexpr auto operator<=>(const Date&) const = default;

 private:
  int serial_ = 0;
};

/// Parses an ISO-8601 instant ("2014-04-20T23:59:00Z", offset or fractional
/// seconds allowed) to epoch seconds. Returns nullopt on malformed input.
std::optional<std::int64_t> parse_instant(std::string_view iso);

/// UTC calendar date containing the given epoch instant.
Date date_of_instant(std::int64_t epoch_seconds);

}  // namespace eventsum
