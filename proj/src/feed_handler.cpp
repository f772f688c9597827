#include "tp/feed_handler.hpp"

namespace tp {

SeqStatus FeedHandler::check_sequence(const Notification& n, VirtualTime now) {
  auto [it, first_seen] = next_expected_.try_emplace(n.channel_id, n.seq_no);
  if (first_seen) {
    it->second = n.seq_no + 1;
    return SeqStatus::Ok;
  }
  const std::uint32_t expected = it->second;
  if (n.seq_no == expected) {
    it->second = expected + 1;
    return SeqStatus::Ok;
  }
  if (n.seq_no > expected) {
    gaps_.push_back(GapEvent{feed_id_, n.channel_id, expected, n.seq_no, now});
    it->second = n.seq_no + 1;
    return SeqStatus::Gap;
  }
  ++duplicates_;
  return SeqStatus::DuplicateOrReplay;
}

std::optional<Notification> FeedHandler::normalize_and_enrich(
    const SymbologyStore& store, const Notification& n) {
  if (!store.resolve(n.symbol)) {
    quarantine_.push_back(Quarantined{n, "unknown symbol " + to_string(n.symbol)});
    return std::nullopt;
  }
  if (n.kind != NotificationKind::Tick) return n;

  const Price4 mid = mid_price(n.tick.bid, n.tick.ask);
  const std::uint64_t tick_volume =
      std::uint64_t(n.tick.bid_size) + std::uint64_t(n.tick.ask_size);

  auto [it, first_of_day] = day_state_.try_emplace(n.symbol);
  DayStats& day = it->second;
  if (first_of_day || n.tick.flags.day_high_reset()) {
    day.open = first_of_day ? mid : day.open;
    day.high = mid;
    day.low = mid;
    if (first_of_day) day.volume = 0;
  } else {
    if (mid > day.high) day.high = mid;
    if (mid < day.low) day.low = mid;
  }
  day.volume += tick_volume;
  if (n.tick.flags.close()) day.close = mid;

  Notification enriched = n;
  EnrichedFields fields;
  fields.open = day.open;
  fields.day_high = day.high;
  fields.day_low = day.low;
  fields.total_volume = day.volume;
  fields.close = day.close;
  enriched.enriched = fields;
  return enriched;
}

void FeedHandler::reset_day(VirtualTime boundary) {
  if (last_boundary_ && boundary <= *last_boundary_)
    throw FeedHandlerError(FeedHandlerError::Code::NonMonotonicBoundary,
                           "day boundary not increasing");
  last_boundary_ = boundary;
  day_state_.clear();
}

std::vector<Notification> FeedHandler::reprocess_quarantine(
    const SymbologyStore& store) {
  std::vector<Notification> resolved;
  std::vector<Quarantined> still_unknown;
  for (auto& q : quarantine_) {
    if (store.resolve(q.notification.symbol)) {
      auto n = normalize_and_enrich(store, q.notification);
      if (n) resolved.push_back(std::move(*n));
    } else {
      still_unknown.push_back(std::move(q));
    }
  }
  quarantine_ = std::move(still_unknown);
  return resolved;
}

const FeedHandler::DayStats* FeedHandler::day_stats(const SymbolRef& symbol) const {
  const auto it = day_state_.find(symbol);
  return it == day_state_.end() ? nullptr : &it->second;
}

}  // namespace tp
