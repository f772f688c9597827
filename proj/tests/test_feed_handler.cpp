#include <doctest.h>

#include <algorithm>

#include "support/oracles.hpp"
#include "tp/feed_handler.hpp"
#include "tp/rng.hpp"

using namespace tp;

namespace {

SymbologyStore store_with(const std::vector<SymbolRef>& symbols) {
  SymbologyStore store;
  int i = 0;
  for (const auto& sym : symbols) {
    InstrumentRecord record;
    std::string prefix = "ZX00000000" + std::to_string(i++);  // 11 chars, i <= 9
    const auto digit = isin_check_digit(prefix);
    record.isin = Isin{prefix + static_cast<char>('0' + *digit)};
    record.listings = {sym};
    store.register_instrument(record);
  }
  return store;
}

Notification tick_at(const SymbolRef& sym, std::uint32_t seq, std::int64_t ts,
                     Price4 bid, Price4 ask, std::uint32_t bid_size = 10,
                     std::uint32_t ask_size = 10, TickFlags flags = {}) {
  return make_tick("F", 0, seq, sym, VirtualTime{ts}, bid, ask, bid_size,
                   ask_size, flags);
}

}  // namespace

TEST_CASE("sequence: in order, gap, duplicate") {
  const auto sym = SymbolRef::of("A", "XNAS");
  FeedHandler handler("F");

  auto n5 = tick_at(sym, 5, 100, 10000, 10010);
  CHECK(handler.check_sequence(n5, n5.publish_ts) == SeqStatus::Ok);

  SUBCASE("next expected advances") {
    auto n6 = tick_at(sym, 6, 200, 10000, 10010);
    CHECK(handler.check_sequence(n6, n6.publish_ts) == SeqStatus::Ok);
  }
  SUBCASE("gap resynchronizes forward") {
    auto n9 = tick_at(sym, 9, 200, 10000, 10010);
    CHECK(handler.check_sequence(n9, n9.publish_ts) == SeqStatus::Gap);
    REQUIRE(handler.gaps().size() == 1);
    CHECK(handler.gaps()[0].expected == 6);
    CHECK(handler.gaps()[0].received == 9);
    auto n10 = tick_at(sym, 10, 300, 10000, 10010);
    CHECK(handler.check_sequence(n10, n10.publish_ts) == SeqStatus::Ok);
  }
  SUBCASE("replay is flagged") {
    auto n3 = tick_at(sym, 3, 200, 10000, 10010);
    CHECK(handler.check_sequence(n3, n3.publish_ts) == SeqStatus::DuplicateOrReplay);
    CHECK(handler.duplicate_count() == 1);
  }
}

TEST_CASE("sequence: channels are independent") {
  const auto sym = SymbolRef::of("A", "XNAS");
  FeedHandler handler("F");
  auto a = tick_at(sym, 1, 100, 10000, 10010);
  a.channel_id = 0;
  auto b = tick_at(sym, 100, 100, 10000, 10010);
  b.channel_id = 1;
  CHECK(handler.check_sequence(a, a.publish_ts) == SeqStatus::Ok);
  CHECK(handler.check_sequence(b, b.publish_ts) == SeqStatus::Ok);  // first seen
}

TEST_CASE("enrich: first tick of day seeds open/high/low") {
  const auto sym = SymbolRef::of("A", "XNAS");
  const auto store = store_with({sym});
  FeedHandler handler("F");
  // mid of 153.45/153.46 is 153.455
  const auto n = handler.normalize_and_enrich(
      store, tick_at(sym, 1, 100, 1'534'500, 1'534'600, 100, 200));
  REQUIRE(n.has_value());
  REQUIRE(n->enriched.has_value());
  CHECK(n->enriched->open == 1'534'550);
  CHECK(n->enriched->day_high == 1'534'550);
  CHECK(n->enriched->day_low == 1'534'550);
  CHECK(n->enriched->total_volume == 300);
  CHECK_FALSE(n->enriched->close.has_value());
  // original payload untouched
  CHECK(n->tick.bid == 1'534'500);
}

TEST_CASE("enrich: monotone extremes") {
  const auto sym = SymbolRef::of("A", "XNAS");
  const auto store = store_with({sym});
  FeedHandler handler("F");
  handler.normalize_and_enrich(store, tick_at(sym, 1, 100, 10000, 10020));
  const auto higher = handler.normalize_and_enrich(
      store, tick_at(sym, 2, 200, 10100, 10120));
  CHECK(higher->enriched->day_high == 10110);
  CHECK(higher->enriched->day_low == 10010);
  CHECK(higher->enriched->open == 10010);
  const auto lower = handler.normalize_and_enrich(
      store, tick_at(sym, 3, 300, 9900, 9920));
  CHECK(lower->enriched->day_high == 10110);
  CHECK(lower->enriched->day_low == 9910);
}

TEST_CASE("enrich: unknown symbol quarantines, later refdata replays") {
  const auto known = SymbolRef::of("A", "XNAS");
  const auto unknown = SymbolRef::of("MYST", "XFRA");
  auto store = store_with({known});
  FeedHandler handler("F");
  CHECK_FALSE(handler.normalize_and_enrich(store, tick_at(unknown, 1, 100, 10000, 10010))
                  .has_value());
  CHECK(handler.quarantine_size() == 1);

  // Nothing resolves yet.
  CHECK(handler.reprocess_quarantine(store).empty());
  CHECK(handler.quarantine_size() == 1);

  InstrumentRecord record;
  record.isin = Isin{"US0378331005"};
  record.listings = {unknown};
  store.register_instrument(record);
  const auto replayed = handler.reprocess_quarantine(store);
  REQUIRE(replayed.size() == 1);
  CHECK(replayed[0].enriched.has_value());
  CHECK(handler.quarantine_size() == 0);
}

TEST_CASE("reset_day: clears accumulators and re-seeds") {
  const auto sym = SymbolRef::of("A", "XNAS");
  const auto store = store_with({sym});
  FeedHandler handler("F");
  handler.normalize_and_enrich(store, tick_at(sym, 1, 100, 10000, 10020));
  handler.normalize_and_enrich(store, tick_at(sym, 2, 200, 20000, 20020));
  handler.reset_day(VirtualTime{kDay});
  const auto n = handler.normalize_and_enrich(
      store, tick_at(sym, 3, kDay + 100, 15000, 15020));
  CHECK(n->enriched->open == 15010);
  CHECK(n->enriched->day_high == 15010);
  CHECK(n->enriched->day_low == 15010);
  CHECK(n->enriched->total_volume == 20);

  SUBCASE("boundaries must increase") {
    CHECK_THROWS_AS(handler.reset_day(VirtualTime{kDay}), FeedHandlerError);
    handler.reset_day(VirtualTime{2 * kDay});  // fine
  }
}

TEST_CASE("two resets with no ticks in between are harmless") {
  FeedHandler handler("F");
  handler.reset_day(VirtualTime{kDay});
  handler.reset_day(VirtualTime{2 * kDay});
}

TEST_CASE("enrich: random day matches brute-force recomputation") {
  const auto sym_a = SymbolRef::of("A", "XNAS");
  const auto sym_b = SymbolRef::of("B", "XNAS");
  const auto store = store_with({sym_a, sym_b});
  Rng rng(42);

  for (int day = 0; day < 2; ++day) {
    FeedHandler handler("F");
    std::map<SymbolRef, std::vector<Notification>> raw;
    std::map<SymbolRef, EnrichedFields> last_enriched;
    std::uint32_t seq = 1;
    for (int i = 0; i < 500; ++i) {
      const auto& sym = rng.below(2) == 0 ? sym_a : sym_b;
      const Price4 bid = 10000 + static_cast<Price4>(rng.below(2000));
      const Price4 ask = bid + 1 + static_cast<Price4>(rng.below(50));
      TickFlags flags;
      if (rng.below(100) == 0) flags.bits |= TickFlags::kDayHighReset;
      auto n = tick_at(sym, seq++, 1000 + i, bid, ask,
                       static_cast<std::uint32_t>(rng.below(500)),
                       static_cast<std::uint32_t>(rng.below(500)), flags);
      const auto enriched = handler.normalize_and_enrich(store, n);
      REQUIRE(enriched.has_value());
      raw[sym].push_back(n);
      last_enriched[sym] = *enriched->enriched;
    }
    for (const auto& [sym, ticks] : raw) {
      const auto expected = oracle::day_stats(ticks);
      CHECK(last_enriched[sym].open == expected.open);
      CHECK(last_enriched[sym].day_high == expected.high);
      CHECK(last_enriched[sym].day_low == expected.low);
      CHECK(last_enriched[sym].total_volume == expected.volume);
    }
  }
}

TEST_CASE("enrich: same-timestamp shuffles never change extremes") {
  const auto sym = SymbolRef::of("A", "XNAS");
  const auto store = store_with({sym});
  Rng rng(1234);
  std::vector<Notification> ticks;
  for (int i = 0; i < 100; ++i) {
    const Price4 bid = 10000 + static_cast<Price4>(rng.below(500));
    ticks.push_back(tick_at(sym, i + 1, 777, bid, bid + 10));
  }
  auto run = [&](const std::vector<Notification>& ordered) {
    FeedHandler handler("F");
    EnrichedFields last;
    for (const auto& n : ordered) {
      auto e = handler.normalize_and_enrich(store, n);
      last = *e->enriched;
    }
    return std::pair{*last.day_high, *last.day_low};
  };
  const auto baseline = run(ticks);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    auto shuffled = ticks;
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    CHECK(run(shuffled) == baseline);
  }
}
