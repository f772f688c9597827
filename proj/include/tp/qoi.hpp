#pragma once

#include <optional>
#include <string>

#include "tp/time.hpp"

namespace tp {

// Subscription quality dimensions. Each dimension has a permissiveness
// order used by entitlement checks:
//   timeliness    RealTime > Delayed(d) > IntraDay > EndOfDay,
//                 smaller Delayed offset = more permissive
//   granularity   TickLevel > Aggregated(w), smaller window = more permissive
//   completeness  Full > Throttled(r), higher rate = more permissive
struct Timeliness {
  enum class Mode { RealTime, Delayed, IntraDay, EndOfDay };
  Mode mode{Mode::RealTime};
  DurationUs delay_us{0};  // Delayed only, > 0

  static Timeliness real_time() { return {}; }
  static Timeliness delayed(DurationUs d) { return {Mode::Delayed, d}; }
  static Timeliness intra_day() { return {Mode::IntraDay, 0}; }
  static Timeliness end_of_day() { return {Mode::EndOfDay, 0}; }

  bool operator==(const Timeliness&) const = default;
};

struct Granularity {
  enum class Mode { TickLevel, Aggregated };
  Mode mode{Mode::TickLevel};
  DurationUs window_us{0};  // Aggregated only, > 0

  static Granularity tick_level() { return {}; }
  static Granularity aggregated(DurationUs w) { return {Mode::Aggregated, w}; }

  bool operator==(const Granularity&) const = default;
};

struct Completeness {
  enum class Mode { Full, Throttled };
  Mode mode{Mode::Full};
  double max_rate_per_sec{0};  // Throttled only, > 0

  static Completeness full() { return {}; }
  static Completeness throttled(double r) { return {Mode::Throttled, r}; }

  bool operator==(const Completeness&) const = default;
};

struct QoISpec {
  Timeliness timeliness;
  Granularity granularity;
  Completeness completeness;

  bool operator==(const QoISpec&) const = default;

  bool valid() const;
};

// requested no more permissive than allowed, per dimension.
bool timeliness_within(const Timeliness& requested, const Timeliness& allowed);
bool granularity_within(const Granularity& requested, const Granularity& allowed);
bool completeness_within(const Completeness& requested, const Completeness& allowed);
bool qoi_within(const QoISpec& requested, const QoISpec& allowed);

// Text form: "realtime|tick|full", "delayed:15m|agg:5m|throttled:2", ...
std::string format_qoi(const QoISpec& q);
std::optional<QoISpec> parse_qoi(const std::string& text);

}  // namespace tp
