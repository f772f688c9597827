#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tp {

// Fixed-point price, scale 1e-4. Integer arithmetic end to end keeps
// enrichment and aggregation bit-deterministic.
using Price4 = std::int64_t;

inline constexpr Price4 kPriceScale = 10'000;

// (bid + ask) / 2 rounded half to even in 1e-4 units.
constexpr Price4 mid_price(Price4 bid, Price4 ask) {
  const Price4 sum = bid + ask;
  Price4 half = sum >> 1;  // floor for the non-negative sums we carry
  if (sum & 1) half += (half & 1);
  return half;
}

// Rounded integer division, ties away from zero. den must be > 0.
constexpr std::int64_t round_div(__int128 num, std::int64_t den) {
  const __int128 d = den;
  if (num >= 0) return static_cast<std::int64_t>((num + d / 2) / d);
  return static_cast<std::int64_t>((num - d / 2) / d);
}

// num / den rounded half to even. den must be > 0.
std::int64_t round_div_half_even(__int128 num, std::int64_t den);

std::string format_price4(Price4 p);
std::optional<Price4> parse_price4(const std::string& text);

}  // namespace tp
