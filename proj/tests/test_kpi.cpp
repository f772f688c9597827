#include <doctest.h>

#include "support/oracles.hpp"
#include "tp/feed_handler.hpp"
#include "tp/kpi.hpp"
#include "tp/rng.hpp"

using namespace tp;

namespace {

struct Session {
  SymbologyStore store;
  FeedHandler handler{"F"};
  KpiEngine engine;

  explicit Session(Price4 spread_threshold = 0)
      : engine(DerivedEventThresholds{spread_threshold}) {
    InstrumentRecord record;
    record.isin = Isin{"US0378331005"};
    record.listings = {SymbolRef::of("A", "XNAS")};
    store.register_instrument(record);
  }

  std::pair<KpiSnapshot, std::vector<DerivedEvent>> feed(
      std::uint32_t seq, std::int64_t ts, Price4 bid, Price4 ask,
      std::uint32_t bs = 10, std::uint32_t as = 10) {
    auto n = make_tick("F", 0, seq, SymbolRef::of("A", "XNAS"), VirtualTime{ts},
                       bid, ask, bs, as);
    auto enriched = handler.normalize_and_enrich(store, n);
    REQUIRE(enriched.has_value());
    std::vector<DerivedEvent> events;
    auto kpis = engine.on_tick(*enriched, &events);
    return {kpis, events};
  }
};

}  // namespace

TEST_CASE("kpi: spread and mid by definition") {
  Session s;
  const auto [kpis, events] = s.feed(1, 100, 1'534'500, 1'534'600);
  CHECK(kpis.spread == 100);       // 0.01
  CHECK(kpis.mid == 1'534'550);    // 153.455
  CHECK(kpis.pct_change_from_open == 0);  // first tick of day
}

TEST_CASE("kpi: pct change from open in rounded per mille") {
  Session s;
  s.feed(1, 100, 1'000'000, 1'000'000);  // open mid 100.0
  const auto [kpis, events] = s.feed(2, 200, 1'015'000, 1'015'000);  // mid 101.5
  CHECK(kpis.pct_change_from_open == 15);
  const auto [down, more] = s.feed(3, 300, 985'200, 985'200);  // mid 98.52 -> -14.8
  CHECK(down.pct_change_from_open == -15);
}

TEST_CASE("kpi: vwap equals brute-force recomputation on a random session") {
  Session s;
  Rng rng(2024);
  std::vector<Notification> raw;
  for (int i = 0; i < 800; ++i) {
    const Price4 bid = 100'000 + static_cast<Price4>(rng.below(10'000));
    const Price4 ask = bid + 1 + static_cast<Price4>(rng.below(200));
    const auto bs = static_cast<std::uint32_t>(rng.below(300));
    const auto as = static_cast<std::uint32_t>(rng.below(300));
    raw.push_back(make_tick("F", 0, i + 1, SymbolRef::of("A", "XNAS"),
                            VirtualTime{100 + i}, bid, ask, bs, as));
    const auto [kpis, events] = s.feed(i + 1, 100 + i, bid, ask, bs, as);
    const auto expected = oracle::running_vwap(raw);
    CHECK(kpis.vwap_session == expected.back());
    if (kpis.vwap_session) {
      // VWAP stays inside the day's extremes once volume exists.
      const auto stats = oracle::day_stats(raw);
      CHECK(*kpis.vwap_session >= stats.low);
      CHECK(*kpis.vwap_session <= stats.high);
    }
  }
}

TEST_CASE("events: unchanged high emits nothing, strict improvement emits once") {
  Session s;
  s.feed(1, 100, 10000, 10020);  // seed, no events
  auto [k2, e2] = s.feed(2, 200, 10000, 10020);  // same mid
  CHECK(e2.empty());
  auto [k3, e3] = s.feed(3, 300, 10100, 10120);  // higher mid
  REQUIRE(e3.size() == 1);
  CHECK(e3[0].kind == DerivedEvent::Kind::NewDayHigh);
  auto [k4, e4] = s.feed(4, 400, 10100, 10120);  // equal re-print
  CHECK(e4.empty());
}

TEST_CASE("events: new low and spread crossing") {
  Session s(/*spread_threshold=*/50);
  s.feed(1, 100, 10000, 10020);  // spread 20, below threshold
  auto [k2, e2] = s.feed(2, 200, 9900, 9980);  // lower mid, spread 80
  REQUIRE(e2.size() == 2);
  CHECK(e2[0].kind == DerivedEvent::Kind::NewDayLow);
  CHECK(e2[1].kind == DerivedEvent::Kind::SpreadAbove);
  // Spread stays above: no re-trigger.
  auto [k3, e3] = s.feed(3, 300, 9900, 9990);
  CHECK(e3.empty());
  // Drops to the threshold, then crosses again: re-arms.
  s.feed(4, 400, 9900, 9950);
  auto [k5, e5] = s.feed(5, 500, 9900, 9990);
  REQUIRE(e5.size() == 1);
  CHECK(e5[0].kind == DerivedEvent::Kind::SpreadAbove);
}

TEST_CASE("events: count of NewDayHigh equals prefix-max increases (random)") {
  Rng rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    Session s;
    std::vector<Notification> raw;
    std::size_t high_events = 0;
    for (int i = 0; i < 300; ++i) {
      const Price4 bid = 50'000 + static_cast<Price4>(rng.below(2'000));
      const Price4 ask = bid + 2;
      raw.push_back(make_tick("F", 0, i + 1, SymbolRef::of("A", "XNAS"),
                              VirtualTime{100 + i}, bid, ask, 10, 10));
      const auto [kpis, events] = s.feed(i + 1, 100 + i, bid, ask);
      for (const auto& event : events)
        if (event.kind == DerivedEvent::Kind::NewDayHigh) ++high_events;
    }
    CHECK(high_events == oracle::prefix_max_increases(raw).size());
  }
}

TEST_CASE("derived events re-inject as statistics on the DERIVED feed") {
  DerivedEvent event{DerivedEvent::Kind::NewDayHigh,
                     SymbolRef::of("A", "XNAS"), VirtualTime{777}, 10110, 0};
  const auto n = derived_event_notification(event, 9);
  CHECK(n.feed_id == kDerivedFeedId);
  CHECK(n.kind == NotificationKind::Statistics);
  CHECK(n.seq_no == 9);
  CHECK(n.publish_ts.us == 777);
  CHECK(n.wire_size == minimal_wire_size(n));
  const std::string body(n.body.begin(), n.body.end());
  CHECK(body == "new_day_high=1.011");
}
