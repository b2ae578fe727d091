#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace evsg {

// Half-open-ish time interval [start, end) in seconds, quantized to 0.1 s.
// Internally stored as integer tenths so comparisons and serialization are
// exact. Construction rounds half-up on the incoming double value.
class TimeSpan {
 public:
  TimeSpan() = default;

  // Throws DataError if start < 0 or start >= end after rounding.
  static TimeSpan of_seconds(double start, double end);
  static std::optional<TimeSpan> try_of_seconds(double start, double end);
  static TimeSpan of_tenths(std::int64_t start_tenths, std::int64_t end_tenths);

  // Round-half-up quantization of a non-negative seconds value to tenths.
  static std::int64_t seconds_to_tenths(double seconds);

  std::int64_t start_tenths() const { return start_tenths_; }
  std::int64_t end_tenths() const { return end_tenths_; }
  double start_seconds() const { return static_cast<double>(start_tenths_) / 10.0; }
  double end_seconds() const { return static_cast<double>(end_tenths_) / 10.0; }
  double length_seconds() const {
    return static_cast<double>(end_tenths_ - start_tenths_) / 10.0;
  }

  // Tenths of overlap with another span; 0 when disjoint.
  std::int64_t overlap_tenths(const TimeSpan& other) const;

  bool operator==(const TimeSpan&) const = default;
  auto operator<=>(const TimeSpan&) const = default;

  // Fixed one-decimal rendering, e.g. "12.5".
  std::string start_text() const;
  std::string end_text() const;

 private:
  TimeSpan(std::int64_t s, std::int64_t e) : start_tenths_(s), end_tenths_(e) {}

  std::int64_t start_tenths_ = 0;
  std::int64_t end_tenths_ = 1;
};

// One-decimal rendering of a tenths count, e.g. 125 -> "12.5".
std::string format_tenths(std::int64_t tenths);

}  // namespace evsg
