#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tp/notification.hpp"
#include "tp/symbology.hpp"

namespace tp {

struct GapEvent {
  std::string feed_id;
  std::uint8_t channel_id{0};
  std::uint32_t expected{0};
  std::uint32_t received{0};  // > expected
  VirtualTime detected_at{};
};

enum class SeqStatus : std::uint8_t { Ok, Gap, DuplicateOrReplay };

struct FeedHandlerError : std::runtime_error {
  enum class Code { NonMonotonicBoundary };
  Code code;
  FeedHandlerError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

// One handler instance per feed; single-threaded over its own state.
// Checks sequencing per channel, resolves symbols against the reference
// store, maintains per-symbol day statistics, and fills the enriched
// fields on each tick. Unknown symbols are quarantined, not dropped, and
// can be replayed once reference data arrives.
class FeedHandler {
 public:
  explicit FeedHandler(std::string feed_id) : feed_id_(std::move(feed_id)) {}

  const std::string& feed_id() const { return feed_id_; }

  // Advances per-channel sequencing. Gap resynchronizes forward to
  // received + 1 and records a GapEvent; a duplicate leaves state alone.
  SeqStatus check_sequence(const Notification& n, VirtualTime now);

  // Tick enrichment against the running day state. Unknown symbol returns
  // nullopt and quarantines the notification. Non-tick kinds pass through
  // with symbology resolution only.
  std::optional<Notification> normalize_and_enrich(const SymbologyStore& store,
                                                   const Notification& n);

  // Clears all day accumulators. Boundaries must be strictly increasing.
  void reset_day(VirtualTime boundary);

  // Re-resolves quarantined notifications; returns the ones that now
  // resolve, in their original arrival order.
  std::vector<Notification> reprocess_quarantine(const SymbologyStore& store);

  const std::vector<GapEvent>& gaps() const { return gaps_; }
  std::size_t quarantine_size() const { return quarantine_.size(); }
  std::uint64_t duplicate_count() const { return duplicates_; }

  struct DayStats {
    Price4 open{0};
    Price4 high{0};
    Price4 low{0};
    std::optional<Price4> close;
    std::uint64_t volume{0};
  };
  const DayStats* day_stats(const SymbolRef& symbol) const;

 private:
  struct Quarantined {
    Notification notification;
    std::string reason;
  };

  std::string feed_id_;
  std::map<std::uint8_t, std::uint32_t> next_expected_;
  std::map<SymbolRef, DayStats> day_state_;
  std::vector<Quarantined> quarantine_;
  std::vector<GapEvent> gaps_;
  std::uint64_t duplicates_{0};
  std::optional<VirtualTime> last_boundary_;
};

}  // namespace tp
