#include "tp/event_store.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "tp/wire.hpp"

namespace tp {

void EventStore::append(const Notification& n) {
  if (history_.size() >= capacity_)
    throw EventStoreError(EventStoreError::Code::StorageFull,
                          "history capacity exhausted");
  const std::size_t index = history_.size();
  history_.push_back(n);
  by_symbol_[n.symbol].push_back(index);
  auto [it, inserted] = last_.try_emplace(n.symbol, index, 1);
  if (!inserted) {
    ++it->second.second;
    if (compare_notifications(history_[it->second.first], n) < 0)
      it->second.first = index;
  }
}

const Notification* EventStore::last_value(const SymbolRef& symbol) const {
  const auto it = last_.find(symbol);
  return it == last_.end() ? nullptr : &history_[it->second.first];
}

std::uint64_t EventStore::update_count(const SymbolRef& symbol) const {
  const auto it = last_.find(symbol);
  return it == last_.end() ? 0 : it->second.second;
}

std::vector<Notification> EventStore::query_range(const SymbolRef& symbol,
                                                  VirtualTime from,
                                                  VirtualTime to) const {
  if (from > to)
    throw EventStoreError(EventStoreError::Code::InvalidRange, "from > to");
  std::vector<Notification> out;
  const auto it = by_symbol_.find(symbol);
  if (it == by_symbol_.end()) return out;
  for (std::size_t index : it->second) {
    const Notification& n = history_[index];
    if (n.publish_ts >= from && n.publish_ts < to) out.push_back(n);
  }
  std::stable_sort(out.begin(), out.end(), NotificationOrder{});
  return out;
}

std::vector<OhlcBar> EventStore::aggregate_bars(const SymbolRef& symbol,
                                                DurationUs window,
                                                VirtualTime day_start,
                                                VirtualTime day_end) const {
  if (window <= 0 || day_end <= day_start ||
      (day_end - day_start) % window != 0)
    throw EventStoreError(EventStoreError::Code::InvalidWindow,
                          "window must evenly divide the session");
  auto ticks = query_range(symbol, day_start, day_end);
  std::erase_if(ticks, [](const Notification& n) {
    return n.kind != NotificationKind::Tick;
  });
  std::vector<OhlcBar> bars;
  BarBuilder builder(window, day_start);
  for (const auto& n : ticks) {
    if (auto done = builder.on_tick(n)) bars.push_back(*done);
  }
  if (auto done = builder.flush()) bars.push_back(*done);
  return bars;
}

void EventStore::spill_history(std::ostream& out) const {
  std::vector<std::uint8_t> buf;
  for (const auto& n : history_) {
    buf.clear();
    append_vfb_frame(n, buf);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
}

VirtualTime BarBuilder::window_start_of(VirtualTime t) const {
  const std::int64_t offset = t - origin_;
  const std::int64_t index = offset >= 0 ? offset / window_
                                         : -((-offset + window_ - 1) / window_);
  return origin_ + index * window_;
}

std::optional<OhlcBar> BarBuilder::on_tick(const Notification& n) {
  const Price4 mid = mid_price(n.tick.bid, n.tick.ask);
  const std::uint64_t vol =
      std::uint64_t(n.tick.bid_size) + std::uint64_t(n.tick.ask_size);
  const VirtualTime start = window_start_of(n.publish_ts);
  std::optional<OhlcBar> completed;
  if (current_ && current_->window_start != start) {
    completed = current_;
    current_.reset();
  }
  if (!current_) {
    current_ = OhlcBar{n.symbol, start, window_, mid, mid, mid, mid, 1, vol};
  } else {
    current_->high = std::max(current_->high, mid);
    current_->low = std::min(current_->low, mid);
    current_->close = mid;
    ++current_->tick_count;
    current_->volume += vol;
  }
  return completed;
}

std::optional<OhlcBar> BarBuilder::flush() {
  auto out = current_;
  current_.reset();
  return out;
}

std::string format_bar(const OhlcBar& bar) {
  std::string out = bar.symbol.local_symbol;
  out += '|';
  out += bar.symbol.mic.code;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "|%lld|", static_cast<long long>(bar.window_start.us));
  out += buf;
  out += format_price4(bar.open);
  out += '|';
  out += format_price4(bar.high);
  out += '|';
  out += format_price4(bar.low);
  out += '|';
  out += format_price4(bar.close);
  std::snprintf(buf, sizeof(buf), "|%llu|%llu",
                static_cast<unsigned long long>(bar.tick_count),
                static_cast<unsigned long long>(bar.volume));
  out += buf;
  return out;
}

}  // namespace tp
