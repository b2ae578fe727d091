#include "evsg/core/time_span.hpp"

#include <cmath>
#include <sstream>

#include "evsg/core/errors.hpp"

namespace evsg {

std::int64_t TimeSpan::seconds_to_tenths(double seconds) {
  // Round-half-up on the binary double value. Decimal ties that are not
  // exactly representable (e.g. 0.35) resolve by the double's true value.
  return static_cast<std::int64_t>(std::floor(seconds * 10.0 + 0.5));
}

TimeSpan TimeSpan::of_seconds(double start, double end) {
  if (!(std::isfinite(start) && std::isfinite(end))) {
    throw DataError("time span bounds must be finite");
  }
  if (start < 0.0) {
    std::ostringstream os;
    os << "time span start must be non-negative, got " << start;
    throw DataError(os.str());
  }
  return of_tenths(seconds_to_tenths(start), seconds_to_tenths(end));
}

std::optional<TimeSpan> TimeSpan::try_of_seconds(double start, double end) {
  if (!(std::isfinite(start) && std::isfinite(end)) || start < 0.0) {
    return std::nullopt;
  }
  std::int64_t s = seconds_to_tenths(start);
  std::int64_t e = seconds_to_tenths(end);
  if (s < 0 || s >= e) return std::nullopt;
  return TimeSpan(s, e);
}

TimeSpan TimeSpan::of_tenths(std::int64_t start_tenths, std::int64_t end_tenths) {
  if (start_tenths < 0) {
    throw DataError("time span start must be non-negative");
  }
  if (start_tenths >= end_tenths) {
    std::ostringstream os;
    os << "time span start must precede end, got [" << format_tenths(start_tenths)
       << ", " << format_tenths(end_tenths) << "]";
    throw DataError(os.str());
  }
  return TimeSpan(start_tenths, end_tenths);
}

std::int64_t TimeSpan::overlap_tenths(const TimeSpan& other) const {
  std::int64_t lo = std::max(start_tenths_, other.start_tenths_);
  std::int64_t hi = std::min(end_tenths_, other.end_tenths_);
  return hi > lo ? hi - lo : 0;
}

std::string TimeSpan::start_text() const { return format_tenths(start_tenths_); }
std::string TimeSpan::end_text() const { return format_tenths(end_tenths_); }

std::string format_tenths(std::int64_t tenths) {
  std::ostringstream os;
  if (tenths < 0) {
    os << '-';
    tenths = -tenths;
  }
  os << tenths / 10 << '.' << tenths % 10;
  return os.str();
}

}  // namespace evsg
