#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tp/notification.hpp"

namespace tp {

struct OhlcBar {
  SymbolRef symbol;
  VirtualTime window_start{};
  DurationUs window_len{0};
  Price4 open{0};
  Price4 high{0};
  Price4 low{0};
  Price4 close{0};
  std::uint64_t tick_count{0};
  std::uint64_t volume{0};

  bool operator==(const OhlcBar&) const = default;
};

struct EventStoreError : std::runtime_error {
  enum class Code { StorageFull, InvalidRange, InvalidWindow };
  Code code;
  EventStoreError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

// Last-value cache plus append-only history. The cache keeps the maximal
// notification per symbol under compare_notifications; history preserves
// arrival order and serves range queries and OHLC aggregation over the
// mid-price.
class EventStore {
 public:
  explicit EventStore(std::size_t capacity = 4'000'000) : capacity_(capacity) {}

  // Throws StorageFull when the bounded history is exhausted.
  void append(const Notification& n);

  std::size_t history_size() const { return history_.size(); }

  const Notification* last_value(const SymbolRef& symbol) const;
  std::uint64_t update_count(const SymbolRef& symbol) const;

  // Notifications with from <= publish_ts < to, in compare_notifications
  // order. Throws InvalidRange if from > to.
  std::vector<Notification> query_range(const SymbolRef& symbol,
                                        VirtualTime from, VirtualTime to) const;

  // One bar per non-empty window over [day_start, day_end); window must
  // divide the session evenly. Only ticks contribute. A full-session
  // window yields the end-of-day aggregate.
  std::vector<OhlcBar> aggregate_bars(const SymbolRef& symbol,
                                      DurationUs window, VirtualTime day_start,
                                      VirtualTime day_end) const;

  // History spill as a VFB1 frame sequence (one feed per call scope is not
  // required; frames are written in history order and re-read with the
  // stored feed ids lost — callers spill per feed).
  void spill_history(std::ostream& out) const;

  // Chunked storage: appends never relocate earlier entries, which keeps
  // append latency flat at benchmark rates.
  const std::deque<Notification>& history() const { return history_; }

 private:
  std::size_t capacity_;
  std::deque<Notification> history_;
  std::map<SymbolRef, std::vector<std::size_t>> by_symbol_;
  std::map<SymbolRef, std::pair<std::size_t, std::uint64_t>> last_;  // index, count
};

// Builds bars from an ordered tick list; the store delegates here and the
// QoI degrader reuses it for aggregated streams.
class BarBuilder {
 public:
  BarBuilder(DurationUs window, VirtualTime grid_origin)
      : window_(window), origin_(grid_origin) {}

  // Returns a completed bar when n crosses into a new window.
  std::optional<OhlcBar> on_tick(const Notification& n);
  std::optional<OhlcBar> flush();

  VirtualTime window_start_of(VirtualTime t) const;

 private:
  DurationUs window_;
  VirtualTime origin_;
  std::optional<OhlcBar> current_;
};

std::string format_bar(const OhlcBar& bar);  // symbol|mic|start|O|H|L|C|count|volume

}  // namespace tp
