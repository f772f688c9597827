#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tp/identifiers.hpp"
#include "tp/prices.hpp"
#include "tp/time.hpp"

namespace tp {

enum class NotificationKind : std::uint8_t {
  Tick = 1,
  Reference = 2,
  Statistics = 3,
  News = 4,
};

const char* kind_name(NotificationKind k);
std::optional<NotificationKind> kind_from_name(const std::string& name);

struct TickFlags {
  std::uint8_t bits{0};

  static constexpr std::uint8_t kOpen = 0x01;
  static constexpr std::uint8_t kClose = 0x02;
  static constexpr std::uint8_t kDayHighReset = 0x04;
  static constexpr std::uint8_t kCrossed = 0x08;

  bool open() const { return bits & kOpen; }
  bool close() const { return bits & kClose; }
  bool day_high_reset() const { return bits & kDayHighReset; }
  bool crossed() const { return bits & kCrossed; }

  auto operator<=>(const TickFlags&) const = default;
};

struct TickPayload {
  Price4 bid{0};
  Price4 ask{0};
  std::uint32_t bid_size{0};
  std::uint32_t ask_size{0};
  VirtualTime exchange_ts{};
  TickFlags flags{};

  auto operator<=>(const TickPayload&) const = default;
};

struct EnrichedFields {
  std::optional<std::uint64_t> total_volume;
  std::optional<Price4> open;
  std::optional<Price4> close;
  std::optional<Price4> day_high;
  std::optional<Price4> day_low;

  bool operator==(const EnrichedFields&) const = default;
};

// One feed event. Tick payload lives in `tick`; the other kinds carry an
// opaque byte body. wire_size is the length of the event's VFB1 frame.
struct Notification {
  std::string feed_id;
  std::uint8_t channel_id{0};
  std::uint32_t seq_no{0};
  NotificationKind kind{NotificationKind::Tick};
  SymbolRef symbol;
  VirtualTime publish_ts{};
  TickPayload tick;
  std::vector<std::uint8_t> body;
  std::optional<EnrichedFields> enriched;
  std::uint32_t wire_size{0};

  bool operator==(const Notification& other) const;
};

// Deterministic total order: (publish_ts, feed_id, channel_id, seq_no).
std::strong_ordering compare_notifications(const Notification& a,
                                           const Notification& b);

struct NotificationOrder {
  bool operator()(const Notification& a, const Notification& b) const {
    return compare_notifications(a, b) == std::strong_ordering::less;
  }
};

// Frame length of the minimal VFB1 encoding (tick payload unpadded).
std::uint32_t minimal_wire_size(const Notification& n);

// Convenience builder used by generator and tests; sets wire_size to the
// minimal frame length unless padding is requested.
Notification make_tick(const std::string& feed, std::uint8_t channel,
                       std::uint32_t seq, const SymbolRef& symbol,
                       VirtualTime publish_ts, Price4 bid, Price4 ask,
                       std::uint32_t bid_size, std::uint32_t ask_size,
                       TickFlags flags = {}, std::uint32_t wire_size = 0);

}  // namespace tp
