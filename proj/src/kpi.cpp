#include "tp/kpi.hpp"

#include <stdexcept>

namespace tp {

std::vector<DerivedEvent> detect_events(
    const std::optional<EnrichedFields>& previous_day_state,
    const EnrichedFields& new_day_state, const KpiSnapshot& kpis,
    const DerivedEventThresholds& thresholds, bool spread_was_above) {
  std::vector<DerivedEvent> events;
  const bool had_high = previous_day_state && previous_day_state->day_high;
  if (had_high && new_day_state.day_high &&
      *new_day_state.day_high > *previous_day_state->day_high) {
    events.push_back(DerivedEvent{DerivedEvent::Kind::NewDayHigh, kpis.symbol,
                                  kpis.as_of, *new_day_state.day_high, 0});
  }
  const bool had_low = previous_day_state && previous_day_state->day_low;
  if (had_low && new_day_state.day_low &&
      *new_day_state.day_low < *previous_day_state->day_low) {
    events.push_back(DerivedEvent{DerivedEvent::Kind::NewDayLow, kpis.symbol,
                                  kpis.as_of, *new_day_state.day_low, 0});
  }
  if (thresholds.spread_above > 0 && !spread_was_above &&
      kpis.spread > thresholds.spread_above) {
    events.push_back(DerivedEvent{DerivedEvent::Kind::SpreadAbove, kpis.symbol,
                                  kpis.as_of, kpis.spread,
                                  thresholds.spread_above});
  }
  return events;
}

KpiSnapshot KpiEngine::on_tick(const Notification& n,
                               std::vector<DerivedEvent>* events) {
  if (n.kind != NotificationKind::Tick || !n.enriched || !n.enriched->open)
    throw std::invalid_argument("KpiEngine needs an enriched tick");

  auto& st = state_[n.symbol];
  KpiSnapshot kpis;
  kpis.symbol = n.symbol;
  kpis.as_of = n.publish_ts;
  kpis.spread = n.tick.ask - n.tick.bid;
  kpis.mid = mid_price(n.tick.bid, n.tick.ask);

  const std::uint64_t vol =
      std::uint64_t(n.tick.bid_size) + std::uint64_t(n.tick.ask_size);
  st.mid_volume_sum += static_cast<unsigned __int128>(kpis.mid) * vol;
  st.volume_sum += vol;
  if (st.volume_sum > 0) {
    kpis.vwap_session = round_div_half_even(
        static_cast<__int128>(st.mid_volume_sum),
        static_cast<std::int64_t>(st.volume_sum));
  }

  const Price4 open = *n.enriched->open;
  kpis.pct_change_from_open =
      round_div(static_cast<__int128>(1000) * (kpis.mid - open), open);

  if (events) {
    auto detected = detect_events(st.prev_day_state, *n.enriched, kpis,
                                  thresholds_, st.spread_above);
    events->insert(events->end(), detected.begin(), detected.end());
  }
  st.spread_above = thresholds_.spread_above > 0 &&
                    kpis.spread > thresholds_.spread_above;
  st.prev_day_state = n.enriched;
  return kpis;
}

void KpiEngine::reset_day() { state_.clear(); }

Notification derived_event_notification(const DerivedEvent& event,
                                        std::uint32_t seq_no) {
  Notification n;
  n.feed_id = kDerivedFeedId;
  n.channel_id = 0;
  n.seq_no = seq_no;
  n.kind = NotificationKind::Statistics;
  n.symbol = event.symbol;
  n.publish_ts = event.publish_ts;
  std::string text;
  switch (event.kind) {
    case DerivedEvent::Kind::NewDayHigh: text = "new_day_high="; break;
    case DerivedEvent::Kind::NewDayLow: text = "new_day_low="; break;
    case DerivedEvent::Kind::SpreadAbove: text = "spread_above="; break;
  }
  text += format_price4(event.value);
  n.body.assign(text.begin(), text.end());
  n.wire_size = minimal_wire_size(n);
  return n;
}

}  // namespace tp
