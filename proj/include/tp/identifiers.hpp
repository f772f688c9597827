#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>

namespace tp {

// ISO 10383 market identifier code: exactly 4 chars, [A-Z0-9].
struct Mic {
  std::string code;

  static bool valid(const std::string& candidate);
  static Mic of(const std::string& candidate);  // throws std::invalid_argument

  auto operator<=>(const Mic&) const = default;
};

// ISO 6166 instrument identifier: 2 country letters, 9 alphanumerics,
// 1 Luhn check digit over the letter-expanded form.
struct Isin {
  std::string code;

  static Isin of(const std::string& candidate);  // throws std::invalid_argument

  auto operator<=>(const Isin&) const = default;
};

// True iff candidate has the ISIN shape and a correct check digit.
bool validate_isin(const std::string& candidate);

// Check digit for the 11-char prefix (country + body); nullopt if the
// prefix is malformed.
std::optional<int> isin_check_digit(const std::string& prefix11);

// Exchange-local instrument key: (ticker, MIC). The runtime identity used
// for routing, caching and aggregation.
struct SymbolRef {
  std::string local_symbol;  // non-empty ASCII, no whitespace
  Mic mic;

  static SymbolRef of(const std::string& local, const std::string& mic);

  auto operator<=>(const SymbolRef&) const = default;
};

std::string to_string(const SymbolRef& s);  // "AAPL@XNAS"

}  // namespace tp
