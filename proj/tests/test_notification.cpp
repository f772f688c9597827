#include <doctest.h>

#include <algorithm>
#include <tuple>
#include <vector>

#include "tp/notification.hpp"
#include "tp/rng.hpp"

using namespace tp;

namespace {

Notification random_notification(Rng& rng) {
  static const char* kFeeds[] = {"FEED.A", "FEED.B", "FEED.C"};
  const SymbolRef symbol = SymbolRef::of("SYM" + std::to_string(rng.below(5)), "XNAS");
  return make_tick(kFeeds[rng.below(3)], static_cast<std::uint8_t>(rng.below(4)),
                   static_cast<std::uint32_t>(rng.below(100)), symbol,
                   VirtualTime{static_cast<std::int64_t>(rng.below(50))},
                   100'0000 + static_cast<Price4>(rng.below(1000)),
                   100'1000 + static_cast<Price4>(rng.below(1000)),
                   static_cast<std::uint32_t>(rng.below(500)),
                   static_cast<std::uint32_t>(rng.below(500)));
}

}  // namespace

TEST_CASE("compare: timestamp dominates") {
  const auto sym = SymbolRef::of("AAPL", "XNAS");
  const auto a = make_tick("F", 0, 1, sym, VirtualTime{100}, 10000, 10010, 1, 1);
  const auto b = make_tick("F", 0, 2, sym, VirtualTime{200}, 10000, 10010, 1, 1);
  CHECK(compare_notifications(a, b) == std::strong_ordering::less);
  CHECK(compare_notifications(b, a) == std::strong_ordering::greater);
}

TEST_CASE("compare: identical keys compare equal") {
  const auto sym = SymbolRef::of("AAPL", "XNAS");
  const auto a = make_tick("F", 1, 7, sym, VirtualTime{100}, 10000, 10010, 1, 1);
  CHECK(compare_notifications(a, a) == std::strong_ordering::equal);
}

TEST_CASE("compare: sorting matches the brute-force tuple sort") {
  Rng rng(7);
  std::vector<Notification> notifications;
  for (int i = 0; i < 1000; ++i) notifications.push_back(random_notification(rng));

  auto by_comparator = notifications;
  std::stable_sort(by_comparator.begin(), by_comparator.end(), NotificationOrder{});

  using Key = std::tuple<std::int64_t, std::string, int, std::uint32_t>;
  auto key_of = [](const Notification& n) {
    return Key{n.publish_ts.us, n.feed_id, n.channel_id, n.seq_no};
  };
  auto by_tuple = notifications;
  std::stable_sort(by_tuple.begin(), by_tuple.end(),
                   [&](const Notification& x, const Notification& y) {
                     return key_of(x) < key_of(y);
                   });
  REQUIRE(by_comparator.size() == by_tuple.size());
  for (std::size_t i = 0; i < by_comparator.size(); ++i)
    CHECK(key_of(by_comparator[i]) == key_of(by_tuple[i]));
}

TEST_CASE("compare: total order properties") {
  Rng rng(11);
  std::vector<Notification> ns;
  for (int i = 0; i < 60; ++i) ns.push_back(random_notification(rng));
  for (const auto& a : ns) {
    for (const auto& b : ns) {
      const auto ab = compare_notifications(a, b);
      const auto ba = compare_notifications(b, a);
      // antisymmetry
      if (ab == std::strong_ordering::less) CHECK(ba == std::strong_ordering::greater);
      if (ab == std::strong_ordering::equal) CHECK(ba == std::strong_ordering::equal);
      for (const auto& c : ns) {
        // transitivity
        if (ab != std::strong_ordering::greater &&
            compare_notifications(b, c) != std::strong_ordering::greater) {
          CHECK(compare_notifications(a, c) != std::strong_ordering::greater);
        }
      }
    }
  }
}

TEST_CASE("make_tick: minimal wire size and crossed flag") {
  const auto sym = SymbolRef::of("AAPL", "XNAS");
  const auto n = make_tick("F", 1, 1, sym, VirtualTime{0}, 10000, 10010, 1, 1);
  CHECK(n.wire_size == 24 + 4 + 33);
  CHECK_FALSE(n.tick.flags.crossed());

  const auto crossed = make_tick("F", 1, 2, sym, VirtualTime{0}, 10020, 10010, 1, 1);
  CHECK(crossed.tick.flags.crossed());
}

TEST_CASE("mid price rounds half to even") {
  CHECK(mid_price(1534500, 1534600) == 1534550);
  CHECK(mid_price(100, 101) == 100);  // 100.5 -> 100 (even)
  CHECK(mid_price(101, 102) == 102);  // 101.5 -> 102 (even)
  CHECK(mid_price(7, 7) == 7);
}
