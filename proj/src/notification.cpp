#include "tp/notification.hpp"

namespace tp {

const char* kind_name(NotificationKind k) {
  switch (k) {
    case NotificationKind::Tick: return "tick";
    case NotificationKind::Reference: return "reference";
    case NotificationKind::Statistics: return "statistics";
    case NotificationKind::News: return "news";
  }
  return "?";
}

std::optional<NotificationKind> kind_from_name(const std::string& name) {
  if (name == "tick") return NotificationKind::Tick;
  if (name == "reference") return NotificationKind::Reference;
  if (name == "statistics") return NotificationKind::Statistics;
  if (name == "news") return NotificationKind::News;
  return std::nullopt;
}

bool Notification::operator==(const Notification& other) const {
  if (feed_id != other.feed_id || channel_id != other.channel_id ||
      seq_no != other.seq_no || kind != other.kind ||
      symbol != other.symbol || publish_ts != other.publish_ts ||
      enriched != other.enriched || wire_size != other.wire_size)
    return false;
  if (kind == NotificationKind::Tick) return tick == other.tick;
  return body == other.body;
}

std::strong_ordering compare_notifications(const Notification& a,
                                           const Notification& b) {
  if (auto c = a.publish_ts <=> b.publish_ts; c != 0) return c;
  if (auto c = a.feed_id <=> b.feed_id; c != 0) return c;
  if (auto c = a.channel_id <=> b.channel_id; c != 0) return c;
  return a.seq_no <=> b.seq_no;
}

namespace {
constexpr std::uint32_t kHeaderBase = 24;  // header excluding the symbol
constexpr std::uint32_t kTickPayload = 33;
}  // namespace

std::uint32_t minimal_wire_size(const Notification& n) {
  const auto head = kHeaderBase + static_cast<std::uint32_t>(n.symbol.local_symbol.size());
  if (n.kind == NotificationKind::Tick) return head + kTickPayload;
  return head + static_cast<std::uint32_t>(n.body.size());
}

Notification make_tick(const std::string& feed, std::uint8_t channel,
                       std::uint32_t seq, const SymbolRef& symbol,
                       VirtualTime publish_ts, Price4 bid, Price4 ask,
                       std::uint32_t bid_size, std::uint32_t ask_size,
                       TickFlags flags, std::uint32_t wire_size) {
  Notification n;
  n.feed_id = feed;
  n.channel_id = channel;
  n.seq_no = seq;
  n.kind = NotificationKind::Tick;
  n.symbol = symbol;
  n.publish_ts = publish_ts;
  n.tick = TickPayload{bid, ask, bid_size, ask_size, publish_ts, flags};
  if (bid > ask) n.tick.flags.bits |= TickFlags::kCrossed;
  n.wire_size = wire_size ? wire_size : minimal_wire_size(n);
  return n;
}

}  // namespace tp
