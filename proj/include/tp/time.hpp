#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace tp {

// Simulation clock: microseconds since the epoch. All timestamps in the
// plant are virtual time; wall clock appears only in benchmark mode.
struct VirtualTime {
  std::int64_t us{0};

  auto operator<=>(const VirtualTime&) const = default;
};

using DurationUs = std::int64_t;

inline constexpr DurationUs kMicrosecond = 1;
inline constexpr DurationUs kMillisecond = 1'000;
inline constexpr DurationUs kSecond = 1'000'000;
inline constexpr DurationUs kMinute = 60 * kSecond;
inline constexpr DurationUs kHour = 60 * kMinute;
inline constexpr DurationUs kDay = 24 * kHour;

constexpr VirtualTime operator+(VirtualTime t, DurationUs d) { return {t.us + d}; }
constexpr VirtualTime operator-(VirtualTime t, DurationUs d) { return {t.us - d}; }
constexpr DurationUs operator-(VirtualTime a, VirtualTime b) { return a.us - b.us; }

// UTC day index of a timestamp; the ledger's trading-day key.
constexpr std::int64_t utc_day(VirtualTime t) { return t.us / kDay; }

// Accepts "250us", "40ms", "15s", "5m", "2h", "1d"; bare numbers are seconds.
DurationUs parse_duration(const std::string& text);
std::string format_duration(DurationUs d);

}  // namespace tp
