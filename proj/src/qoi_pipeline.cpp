#include "tp/qoi_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tp {

QoiDegrader::QoiDegrader(const QoISpec& qoi, DeliveryPolicy policy)
    : qoi_(qoi), policy_(policy) {
  if (qoi_.timeliness.mode == Timeliness::Mode::Delayed)
    delay_us_ = qoi_.timeliness.delay_us;
  if (qoi_.granularity.mode == Granularity::Mode::Aggregated) {
    agg_window_ = qoi_.granularity.window_us;
  } else if (qoi_.timeliness.mode == Timeliness::Mode::IntraDay) {
    agg_window_ = kIntraDayDefaultWindow;
  } else if (qoi_.timeliness.mode == Timeliness::Mode::EndOfDay) {
    agg_window_ = kDay;
  }
  end_of_day_ = qoi_.timeliness.mode == Timeliness::Mode::EndOfDay;
  if (qoi_.completeness.mode == Completeness::Mode::Throttled)
    throttle_spacing_us_ = static_cast<DurationUs>(
        std::llround(1e6 / qoi_.completeness.max_rate_per_sec));
}

void QoiDegrader::track_pending(std::int64_t delta) {
  pending_depth_ = static_cast<std::size_t>(
      static_cast<std::int64_t>(pending_depth_) + delta);
  high_watermark_ = std::max(high_watermark_, pending_depth_);
}

VirtualTime QoiDegrader::bar_release_ts(VirtualTime window_start,
                                        DurationUs offset) const {
  VirtualTime close = window_start + *agg_window_;
  if (end_of_day_) {
    const VirtualTime day_close{(utc_day(window_start) + 1) * kDay};
    if (day_close > close) close = day_close;
  }
  return close + offset;
}

std::vector<DegradedItem> QoiDegrader::on_arrival(VirtualTime arrival_ts,
                                                  const Notification& n) {
  std::vector<DegradedItem> out;
  process_due(arrival_ts, out);
  ++counters_.arrivals;
  stage1(arrival_ts, n, out);
  return out;
}

std::vector<DegradedItem> QoiDegrader::finish() {
  std::vector<DegradedItem> out;
  process_due(VirtualTime{std::numeric_limits<std::int64_t>::max()}, out);
  return out;
}

void QoiDegrader::process_due(VirtualTime now, std::vector<DegradedItem>& out) {
  while (!timers_.empty() && timers_.begin()->at <= now) {
    const Timer timer = *timers_.begin();
    timers_.erase(timers_.begin());
    switch (timer.kind) {
      case TimerKind::BarClose:
        close_bar(timer.symbol, out, timer.at);
        break;
      case TimerKind::HeldRelease: {
        auto node = held_.extract(timer.seq);
        stage2(timer.at, std::move(node.mapped()), out);
        track_pending(-1);
        break;
      }
      case TimerKind::ThrottleSlot: {
        auto& st = throttle_[timer.symbol];
        st.timer_scheduled = false;
        PendingItem item;
        bool have = false;
        if (policy_ == DeliveryPolicy::ConflateLatest) {
          if (st.latest) {
            item = std::move(*st.latest);
            st.latest.reset();
            have = true;
          }
        } else if (!st.queue.empty()) {
          item = std::move(st.queue.front());
          st.queue.pop_front();
          have = true;
        }
        if (have) {
          track_pending(-1);
          st.next_free = timer.at + throttle_spacing_us_;
          emit(timer.at, std::move(item), out);
          const bool more = policy_ == DeliveryPolicy::ConflateLatest
                                ? st.latest.has_value()
                                : !st.queue.empty();
          if (more) {
            timers_.insert(Timer{st.next_free, TimerKind::ThrottleSlot,
                                 timer.symbol, 0});
            st.timer_scheduled = true;
          }
        }
        break;
      }
    }
  }
}

void QoiDegrader::close_bar(const SymbolRef& symbol,
                            std::vector<DegradedItem>& out,
                            VirtualTime release_ts) {
  auto& st = agg_[symbol];
  if (!st.open_bar) return;
  PendingItem item;
  item.is_bar = true;
  item.bar = *st.open_bar;
  item.folded_ticks = st.open_bar->tick_count;
  item.source = st.last_source;
  item.transport_latency_us = st.offset;
  st.open_bar.reset();
  track_pending(-1);
  stage2(release_ts, std::move(item), out);
}

void QoiDegrader::stage1(VirtualTime arrival_ts, const Notification& n,
                         std::vector<DegradedItem>& out) {
  const SourceRef source{n.feed_id, n.channel_id, n.seq_no, n.publish_ts};
  const DurationUs transport = arrival_ts - n.publish_ts;
  if (!agg_window_) {
    PendingItem item;
    item.notification = n;
    item.source = source;
    item.transport_latency_us = transport;
    stage2(arrival_ts, std::move(item), out);
    return;
  }
  auto& st = agg_[n.symbol];
  if (!st.offset_known) {
    st.offset = transport;
    st.offset_known = true;
  }
  if (n.kind != NotificationKind::Tick) {
    // Held to the close of its publish-time window, like the bars around it.
    const VirtualTime window_start{
        n.publish_ts.us / *agg_window_ * *agg_window_};
    const VirtualTime release = bar_release_ts(window_start, transport);
    const std::uint64_t seq = next_seq_++;
    PendingItem item;
    item.notification = n;
    item.source = source;
    item.transport_latency_us = transport;
    held_.emplace(seq, std::move(item));
    timers_.insert(Timer{release, TimerKind::HeldRelease, n.symbol, seq});
    track_pending(+1);
    return;
  }
  const VirtualTime window_start{n.publish_ts.us / *agg_window_ * *agg_window_};
  if (st.open_bar && st.open_bar->window_start != window_start) {
    // Defensive: the close timer at window end fires before any arrival of
    // the next window, so this only triggers on a shrinking offset.
    close_bar(n.symbol, out, bar_release_ts(st.open_bar->window_start, st.offset));
  }
  st.last_source = source;
  const Price4 mid = mid_price(n.tick.bid, n.tick.ask);
  const std::uint64_t vol =
      std::uint64_t(n.tick.bid_size) + std::uint64_t(n.tick.ask_size);
  if (!st.open_bar) {
    st.open_bar = OhlcBar{n.symbol, window_start, *agg_window_,
                          mid,      mid,          mid,
                          mid,      1,            vol};
    timers_.insert(Timer{bar_release_ts(window_start, st.offset),
                         TimerKind::BarClose, n.symbol, 0});
    track_pending(+1);
  } else {
    st.open_bar->high = std::max(st.open_bar->high, mid);
    st.open_bar->low = std::min(st.open_bar->low, mid);
    st.open_bar->close = mid;
    ++st.open_bar->tick_count;
    st.open_bar->volume += vol;
  }
}

void QoiDegrader::stage2(VirtualTime ts, PendingItem item,
                         std::vector<DegradedItem>& out) {
  if (throttle_spacing_us_ == 0) {
    emit(ts, std::move(item), out);
    return;
  }
  const SymbolRef symbol =  // by value: item is moved below
      item.is_bar ? item.bar.symbol : item.notification.symbol;
  auto& st = throttle_[symbol];
  const bool backlog = policy_ == DeliveryPolicy::ConflateLatest
                           ? st.latest.has_value()
                           : !st.queue.empty();
  if (!backlog && ts >= st.next_free) {
    st.next_free = ts + throttle_spacing_us_;
    emit(ts, std::move(item), out);
    return;
  }
  if (policy_ == DeliveryPolicy::ConflateLatest) {
    if (st.latest) {
      if (st.latest->is_bar) {
        ++counters_.dropped_bars;
        counters_.dropped_bar_ticks += st.latest->folded_ticks;
      } else {
        ++counters_.dropped_notifications;
      }
      st.latest = std::move(item);
    } else {
      st.latest = std::move(item);
      track_pending(+1);
    }
  } else {
    st.queue.push_back(std::move(item));
    track_pending(+1);
  }
  if (!st.timer_scheduled) {
    timers_.insert(Timer{st.next_free, TimerKind::ThrottleSlot, symbol, 0});
    st.timer_scheduled = true;
  }
}

void QoiDegrader::emit(VirtualTime ts, PendingItem item,
                       std::vector<DegradedItem>& out) {
  DegradedItem released;
  released.release_ts = ts + delay_us_;
  released.is_bar = item.is_bar;
  released.source = std::move(item.source);
  released.transport_latency_us = item.transport_latency_us;
  if (item.is_bar) {
    released.bar = std::move(item.bar);
    ++counters_.released_bars;
    counters_.released_bar_ticks += item.folded_ticks;
  } else {
    released.notification = std::move(item.notification);
    ++counters_.released_notifications;
  }
  out.push_back(std::move(released));
}

}  // namespace tp
