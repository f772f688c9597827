#include "tp/prices.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace tp {

std::int64_t round_div_half_even(__int128 num, std::int64_t den) {
  const bool negative = num < 0;
  __int128 n = negative ? -num : num;
  const __int128 d = den;
  __int128 q = n / d;
  const __int128 r = n % d;
  if (2 * r > d || (2 * r == d && (q & 1))) ++q;
  return static_cast<std::int64_t>(negative ? -q : q);
}

std::string format_price4(Price4 p) {
  const bool negative = p < 0;
  std::uint64_t v = negative ? static_cast<std::uint64_t>(-p)
                             : static_cast<std::uint64_t>(p);
  const std::uint64_t whole = v / kPriceScale;
  std::uint64_t frac = v % kPriceScale;
  char buf[40];
  if (frac == 0) {
    std::snprintf(buf, sizeof(buf), "%s%llu", negative ? "-" : "",
                  static_cast<unsigned long long>(whole));
    return buf;
  }
  int digits = 4;
  while (frac % 10 == 0) {
    frac /= 10;
    --digits;
  }
  std::snprintf(buf, sizeof(buf), "%s%llu.%0*llu", negative ? "-" : "",
                static_cast<unsigned long long>(whole), digits,
                static_cast<unsigned long long>(frac));
  return buf;
}

std::optional<Price4> parse_price4(const std::string& text) {
  if (text.empty()) return std::nullopt;
  size_t i = 0;
  bool negative = false;
  if (text[i] == '-') {
    negative = true;
    ++i;
  }
  if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
    return std::nullopt;
  std::int64_t whole = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    whole = whole * 10 + (text[i] - '0');
    if (whole > 900'000'000'000'000LL) return std::nullopt;
    ++i;
  }
  std::int64_t frac = 0;
  int frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    if (i >= text.size()) return std::nullopt;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (++frac_digits > 4) return std::nullopt;
      frac = frac * 10 + (text[i] - '0');
      ++i;
    }
    if (frac_digits == 0) return std::nullopt;
  }
  if (i != text.size()) return std::nullopt;
  for (int k = frac_digits; k < 4; ++k) frac *= 10;
  const Price4 value = whole * kPriceScale + frac;
  return negative ? -value : value;
}

}  // namespace tp
