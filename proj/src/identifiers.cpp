#include "tp/identifiers.hpp"

#include <cctype>

namespace tp {

namespace {

bool upper_alnum(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

bool Mic::valid(const std::string& candidate) {
  if (candidate.size() != 4) return false;
  for (char c : candidate)
    if (!upper_alnum(c)) return false;
  return true;
}

Mic Mic::of(const std::string& candidate) {
  if (!valid(candidate)) throw std::invalid_argument("bad MIC: " + candidate);
  return Mic{candidate};
}

std::optional<int> isin_check_digit(const std::string& prefix11) {
  if (prefix11.size() != 11) return std::nullopt;
  if (!(prefix11[0] >= 'A' && prefix11[0] <= 'Z') ||
      !(prefix11[1] >= 'A' && prefix11[1] <= 'Z'))
    return std::nullopt;
  // Expand letters to two digits (A=10 .. Z=35), then Luhn over the digit
  // string with doubling starting at the rightmost digit.
  std::string digits;
  digits.reserve(22);
  for (char c : prefix11) {
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
    } else if (c >= 'A' && c <= 'Z') {
      const int v = c - 'A' + 10;
      digits.push_back(static_cast<char>('0' + v / 10));
      digits.push_back(static_cast<char>('0' + v % 10));
    } else {
      return std::nullopt;
    }
  }
  int sum = 0;
  bool dbl = true;  // rightmost digit of the expanded prefix is doubled
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    int d = *it - '0';
    if (dbl) {
      d *= 2;
      if (d > 9) d -= 9;
    }
    sum += d;
    dbl = !dbl;
  }
  return (10 - sum % 10) % 10;
}

bool validate_isin(const std::string& candidate) {
  if (candidate.size() != 12) return false;
  const char last = candidate[11];
  if (last < '0' || last > '9') return false;
  for (size_t i = 2; i < 11; ++i)
    if (!upper_alnum(candidate[i])) return false;
  const auto expected = isin_check_digit(candidate.substr(0, 11));
  return expected && *expected == last - '0';
}

Isin Isin::of(const std::string& candidate) {
  if (!validate_isin(candidate))
    throw std::invalid_argument("bad ISIN: " + candidate);
  return Isin{candidate};
}

SymbolRef SymbolRef::of(const std::string& local, const std::string& mic) {
  if (local.empty()) throw std::invalid_argument("empty symbol");
  for (char c : local) {
    if (std::isspace(static_cast<unsigned char>(c)) ||
        static_cast<unsigned char>(c) > 0x7e || c < 0x21)
      throw std::invalid_argument("bad symbol: " + local);
  }
  return SymbolRef{local, Mic::of(mic)};
}

std::string to_string(const SymbolRef& s) {
  return s.local_symbol + "@" + s.mic.code;
}

}  // namespace tp
