#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tp/notification.hpp"

namespace tp {

struct KpiSnapshot {
  SymbolRef symbol;
  VirtualTime as_of{};
  Price4 spread{0};                   // ask - bid of the anchoring tick
  Price4 mid{0};
  std::optional<Price4> vwap_session; // only once cumulative volume > 0
  std::int64_t pct_change_from_open{0};  // per mille, rounded half away from zero
};

struct DerivedEvent {
  enum class Kind : std::uint8_t { NewDayHigh, NewDayLow, SpreadAbove };
  Kind kind{Kind::NewDayHigh};
  SymbolRef symbol;
  VirtualTime publish_ts{};
  Price4 value{0};      // the new extreme, or the spread that crossed
  Price4 threshold{0};  // SpreadAbove only

  bool operator==(const DerivedEvent&) const = default;
};

struct DerivedEventThresholds {
  Price4 spread_above{0};  // <= 0 disables the spread event
};

// Event detection on day-state transitions. Strict improvement only:
// equal re-prints never re-trigger, and the spread event re-arms only
// after dropping back to or below the threshold.
std::vector<DerivedEvent> detect_events(
    const std::optional<EnrichedFields>& previous_day_state,
    const EnrichedFields& new_day_state, const KpiSnapshot& kpis,
    const DerivedEventThresholds& thresholds, bool spread_was_above);

// Per-symbol session accumulators for spread/mid/vwap/pct-change and the
// derived-event arm state. Pure per-symbol streaming; parallel across
// symbols, sequential within one.
class KpiEngine {
 public:
  explicit KpiEngine(DerivedEventThresholds thresholds = {})
      : thresholds_(thresholds) {}

  // n must be an enriched tick.
  KpiSnapshot on_tick(const Notification& n, std::vector<DerivedEvent>* events);

  void reset_day();

 private:
  struct SymState {
    unsigned __int128 mid_volume_sum{0};
    std::uint64_t volume_sum{0};
    std::optional<EnrichedFields> prev_day_state;
    bool spread_above{false};
  };

  DerivedEventThresholds thresholds_;
  std::map<SymbolRef, SymState> state_;
};

// Reserved feed id for re-injected derived events.
inline constexpr const char* kDerivedFeedId = "DERIVED";

// Encodes a derived event as a Statistics notification on the DERIVED feed.
Notification derived_event_notification(const DerivedEvent& event,
                                        std::uint32_t seq_no);

}  // namespace tp
