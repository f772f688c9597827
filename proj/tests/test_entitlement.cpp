#include <doctest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "tp/entitlement.hpp"
#include "tp/rng.hpp"

using namespace tp;

namespace {

Entitlement feed_grant(const std::string& sub, const std::string& feed,
                       const QoISpec& qoi, std::int64_t from = 0,
                       std::int64_t to = 365 * kDay) {
  Entitlement e;
  e.subscriber_id = sub;
  e.scope = Entitlement::Scope::Feed;
  e.feed_id = feed;
  e.max_qoi = qoi;
  e.valid_from = VirtualTime{from};
  e.valid_to = VirtualTime{to};
  return e;
}

Subscription request(const std::string& sub, const std::string& feed,
                     const QoISpec& qoi) {
  Subscription s;
  s.subscriber_id = sub;
  s.filter.feeds = {feed};
  s.qoi = qoi;
  return s;
}

}  // namespace

TEST_CASE("permit: strictly less permissive request") {
  EntitlementStore store;
  store.add(feed_grant("t1", "F", QoISpec{}));  // realtime/tick/full
  QoISpec degraded{Timeliness::delayed(15 * kMinute), Granularity::tick_level(),
                   Completeness::throttled(5)};
  const auto decision = store.check(request("t1", "F", degraded), VirtualTime{100});
  CHECK(decision.permitted);
}

TEST_CASE("deny: dominance violation names the dimension") {
  EntitlementStore store;
  QoISpec delayed_only{Timeliness::delayed(15 * kMinute),
                       Granularity::tick_level(), Completeness::full()};
  store.add(feed_grant("t1", "F", delayed_only));
  const auto decision = store.check(request("t1", "F", QoISpec{}), VirtualTime{100});
  CHECK_FALSE(decision.permitted);
  CHECK(decision.reason == "timeliness");
}

TEST_CASE("deny: uncovered scope and expired windows") {
  EntitlementStore store;
  store.add(feed_grant("t1", "F", QoISpec{}, 0, 1000));
  CHECK(store.check(request("t1", "G", QoISpec{}), VirtualTime{100}).reason ==
        "scope");
  CHECK(store.check(request("t2", "F", QoISpec{}), VirtualTime{100}).reason ==
        "scope");
  CHECK_FALSE(store.check(request("t1", "F", QoISpec{}), VirtualTime{1000}).permitted);
  CHECK(store.check(request("t1", "F", QoISpec{}), VirtualTime{999}).permitted);
}

TEST_CASE("exchange scope covers symbol atoms by MIC") {
  EntitlementStore store;
  Entitlement e;
  e.subscriber_id = "t1";
  e.scope = Entitlement::Scope::Exchange;
  e.mic = Mic{"XNAS"};
  e.max_qoi = QoISpec{};
  e.valid_from = VirtualTime{0};
  e.valid_to = VirtualTime{kDay};
  store.add(e);

  Subscription s;
  s.subscriber_id = "t1";
  s.filter.symbols = {SymbolRef::of("AAPL", "XNAS")};
  CHECK(store.check(s, VirtualTime{1}).permitted);
  s.filter.symbols = {SymbolRef::of("APC", "XFRA")};
  CHECK(store.check(s, VirtualTime{1}).reason == "scope");

  // A feed atom is covered by the exchange grant through the directory.
  store.map_feed("F", Mic{"XNAS"});
  Subscription by_feed;
  by_feed.subscriber_id = "t1";
  by_feed.filter.feeds = {"F"};
  CHECK(store.check(by_feed, VirtualTime{1}).permitted);
}

TEST_CASE("every filter atom needs coverage") {
  EntitlementStore store;
  store.add(feed_grant("t1", "F", QoISpec{}));
  Subscription s = request("t1", "F", QoISpec{});
  s.filter.feeds.insert("G");
  CHECK(store.check(s, VirtualTime{1}).reason == "scope");
}

TEST_CASE("decision equals the dominance oracle on random pairs") {
  Rng rng(616);
  auto random_qoi = [&](Rng& r) {
    QoISpec q;
    switch (r.below(4)) {
      case 0: q.timeliness = Timeliness::real_time(); break;
      case 1: q.timeliness = Timeliness::delayed((1 + r.below(30)) * kMinute); break;
      case 2: q.timeliness = Timeliness::intra_day(); break;
      default: q.timeliness = Timeliness::end_of_day(); break;
    }
    if (r.below(2) == 0)
      q.granularity = Granularity::aggregated((1 + r.below(60)) * kMinute);
    if (r.below(2) == 0)
      q.completeness = Completeness::throttled(1.0 + static_cast<double>(r.below(10)));
    return q;
  };
  for (int i = 0; i < 3000; ++i) {
    EntitlementStore store;
    const QoISpec allowed = random_qoi(rng);
    const QoISpec requested = random_qoi(rng);
    store.add(feed_grant("t1", "F", allowed));
    const bool got =
        store.check(request("t1", "F", requested), VirtualTime{1}).permitted;
    CHECK(got == oracle::qoi_dominated(requested, allowed));
  }
}

TEST_CASE("meter: counts, distinct symbols and conservation") {
  MeterLedger ledger;
  CHECK(ledger.total_deliveries() == 0);
  const auto aapl = SymbolRef::of("AAPL", "XNAS");
  const auto msft = SymbolRef::of("MSFT", "XNAS");
  ledger.record("t1", "F", 0, aapl);
  ledger.record("t1", "F", 0, aapl);
  ledger.record("t1", "F", 0, msft);
  ledger.record("t2", "F", 1, aapl);
  CHECK(ledger.count("t1", "F", 0) == 3);
  CHECK(ledger.count("t2", "F", 1) == 1);
  CHECK(ledger.count("t2", "F", 0) == 0);
  CHECK(ledger.total_deliveries() == 4);
}

TEST_CASE("usage report: deterministic, sorted, with per-feed totals") {
  MeterLedger ledger;
  const auto aapl = SymbolRef::of("AAPL", "XNAS");
  const auto msft = SymbolRef::of("MSFT", "XNAS");
  ledger.record("t2", "F", 0, aapl);
  ledger.record("t1", "F", 0, aapl);
  ledger.record("t1", "F", 0, msft);
  ledger.record("t1", "G", 0, msft);

  CHECK_THROWS_AS(ledger.usage_report(0, 0), LedgerError);
  ledger.close_through(0);
  const std::string report = ledger.usage_report(0, 0);
  CHECK(report ==
        "subscriber|feed|day|count|distinct_symbols\n"
        "t1|F|0|2|2\n"
        "t1|G|0|1|1\n"
        "t2|F|0|1|1\n"
        "#total|F|*|3|2\n"
        "#total|G|*|1|1\n");
  CHECK(ledger.usage_report(0, 0) == report);  // regeneration identical

  // Recording into a closed day is an error.
  CHECK_THROWS_AS(ledger.record("t1", "F", 0, aapl), LedgerError);
}

TEST_CASE("empty ledger report is header-only") {
  MeterLedger ledger;
  ledger.close_through(5);
  CHECK(ledger.usage_report(0, 5) == "subscriber|feed|day|count|distinct_symbols\n");
}

TEST_CASE("entitlement file round trip") {
  std::istringstream in(
      "# grants\n"
      "feedmap|F|XNAS\n"
      "t1|feed:F|realtime|tick|full|0|86400000000\n"
      "t2|mic:XNAS|delayed:15m|tick|throttled:5|0|86400000000\n");
  EntitlementStore store;
  load_entitlements(store, in);
  CHECK(store.entitlements().size() == 2);
  CHECK(store.feed_exchange("F") == Mic{"XNAS"});
  CHECK(store.check(request("t1", "F", QoISpec{}), VirtualTime{1}).permitted);

  QoISpec degraded{Timeliness::delayed(20 * kMinute), Granularity::tick_level(),
                   Completeness::throttled(2)};
  Subscription s;
  s.subscriber_id = "t2";
  s.filter.symbols = {SymbolRef::of("AAPL", "XNAS")};
  s.qoi = degraded;
  CHECK(store.check(s, VirtualTime{1}).permitted);

  std::istringstream bad("t1|feed:F|realtime|tick|full|5|5\n");
  EntitlementStore broken;
  CHECK_THROWS_AS(load_entitlements(broken, bad), std::invalid_argument);
}
