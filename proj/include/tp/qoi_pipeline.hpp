#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tp/event_store.hpp"
#include "tp/notification.hpp"
#include "tp/qoi.hpp"
#include "tp/subscription.hpp"

namespace tp {

// Identity of the notification behind a released element; for bars, the
// last tick folded into the bar. Feeds the delivery log and the meter.
struct SourceRef {
  std::string feed_id;
  std::uint8_t channel_id{0};
  std::uint32_t seq_no{0};
  VirtualTime publish_ts{};
};

// One released element of a degraded stream: either a notification or an
// OHLC bar, stamped with its release time. transport_latency_us is the
// broker-path cost excluding any QoI-induced delay.
struct DegradedItem {
  VirtualTime release_ts{};
  bool is_bar{false};
  Notification notification;
  OhlcBar bar;
  SourceRef source;
  DurationUs transport_latency_us{0};

  const SymbolRef& symbol() const {
    return is_bar ? bar.symbol : notification.symbol;
  }
};

struct DegraderCounters {
  std::uint64_t arrivals{0};
  std::uint64_t released_notifications{0};
  std::uint64_t released_bars{0};
  std::uint64_t released_bar_ticks{0};
  std::uint64_t dropped_notifications{0};  // conflation only
  std::uint64_t dropped_bars{0};
  std::uint64_t dropped_bar_ticks{0};

  // Every arrival is released, folded into a released bar, or conflated away.
  bool conserve() const {
    return arrivals == released_notifications + dropped_notifications +
                           released_bar_ticks + dropped_bar_ticks;
  }
};

// Incremental QoI degrader for one subscription. Stage order:
//   1. aggregation   granularity Aggregated(w) bars on the publish-time
//                    grid; timeliness IntraDay aggregates on a 1h default
//                    window, EndOfDay on the UTC session; non-tick kinds
//                    are held to the window close, not aggregated
//   2. completeness  Throttled(r): per-symbol release slots every 1/r sec;
//                    ConflateLatest keeps the newest pending element,
//                    Lossless queues and drains at the slot rate
//   3. timeliness    Delayed(d) shifts every release by exactly d
// RealTime|TickLevel|Full is the identity. Input must be ordered per
// channel; arrival timestamps must be publish_ts plus a per-symbol
// constant transport offset (which a static broker path guarantees).
class QoiDegrader {
 public:
  QoiDegrader(const QoISpec& qoi, DeliveryPolicy policy);

  // Feed one arrival; returns elements whose release time is now known.
  // Due internal timers fire first, so outputs stay in release order
  // per symbol.
  std::vector<DegradedItem> on_arrival(VirtualTime arrival_ts,
                                       const Notification& n);

  // Drains everything still buffered: open bars close at their natural
  // window-close times, throttle queues at their slot times.
  std::vector<DegradedItem> finish();

  const DegraderCounters& counters() const { return counters_; }
  std::size_t pending_depth() const { return pending_depth_; }
  std::size_t high_watermark() const { return high_watermark_; }

  static constexpr DurationUs kIntraDayDefaultWindow = kHour;

 private:
  struct PendingItem {
    bool is_bar{false};
    Notification notification;
    OhlcBar bar;
    std::uint64_t folded_ticks{0};  // bars: tick_count
    SourceRef source;
    DurationUs transport_latency_us{0};
  };

  struct AggState {
    std::optional<OhlcBar> open_bar;
    SourceRef last_source;  // identity of the newest folded tick
    DurationUs offset{0};   // arrival_ts - publish_ts, fixed per symbol
    bool offset_known{false};
  };

  struct ThrottleState {
    VirtualTime next_free{};
    std::deque<PendingItem> queue;   // Lossless
    std::optional<PendingItem> latest;  // ConflateLatest
    bool timer_scheduled{false};
  };

  // At equal times: open slots drain first, then bars close, then held
  // non-tick items release. The reference degrader mirrors this order.
  enum class TimerKind : std::uint8_t { ThrottleSlot = 0, BarClose = 1, HeldRelease = 2 };
  struct Timer {
    VirtualTime at{};
    TimerKind kind{};
    SymbolRef symbol;
    std::uint64_t seq{0};  // insertion tiebreak for held items

    auto operator<=>(const Timer&) const = default;
  };

  void process_due(VirtualTime now, std::vector<DegradedItem>& out);
  void stage1(VirtualTime arrival_ts, const Notification& n,
              std::vector<DegradedItem>& out);
  void stage2(VirtualTime ts, PendingItem item, std::vector<DegradedItem>& out);
  void emit(VirtualTime ts, PendingItem item, std::vector<DegradedItem>& out);
  void close_bar(const SymbolRef& symbol, std::vector<DegradedItem>& out,
                 VirtualTime release_ts);

  VirtualTime bar_release_ts(VirtualTime window_start, DurationUs offset) const;
  void track_pending(std::int64_t delta);

  QoISpec qoi_;
  DeliveryPolicy policy_;
  DurationUs delay_us_{0};
  std::optional<DurationUs> agg_window_;
  bool end_of_day_{false};
  DurationUs throttle_spacing_us_{0};  // 0 = Full

  std::map<SymbolRef, AggState> agg_;
  std::map<SymbolRef, ThrottleState> throttle_;
  std::set<Timer> timers_;
  std::map<std::uint64_t, PendingItem> held_;  // keyed by Timer::seq
  std::uint64_t next_seq_{0};

  DegraderCounters counters_;
  std::size_t pending_depth_{0};
  std::size_t high_watermark_{0};
};

}  // namespace tp
