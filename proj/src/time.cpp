#include "tp/time.hpp"

#include <cstdio>
#include <stdexcept>

namespace tp {

DurationUs parse_duration(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty duration");
  size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad duration: " + text);
  }
  const std::string unit = text.substr(pos);
  if (value < 0) throw std::invalid_argument("negative duration: " + text);
  if (unit == "us") return value;
  if (unit == "ms") return value * kMillisecond;
  if (unit == "s" || unit.empty()) return value * kSecond;
  if (unit == "m") return value * kMinute;
  if (unit == "h") return value * kHour;
  if (unit == "d") return value * kDay;
  throw std::invalid_argument("bad duration unit: " + text);
}

std::string format_duration(DurationUs d) {
  char buf[32];
  if (d % kSecond == 0) {
    std::snprintf(buf, sizeof(buf), "%llds", static_cast<long long>(d / kSecond));
  } else if (d % kMillisecond == 0) {
    std::snprintf(buf, sizeof(buf), "%lldms", static_cast<long long>(d / kMillisecond));
  } else {
    std::snprintf(buf, sizeof(buf), "%lldus", static_cast<long long>(d));
  }
  return buf;
}

}  // namespace tp
