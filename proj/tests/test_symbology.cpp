#include <doctest.h>

#include <sstream>

#include "tp/rng.hpp"
#include "tp/symbology.hpp"

using namespace tp;

namespace {

InstrumentRecord apple() {
  InstrumentRecord r;
  r.isin = Isin{"US0378331005"};
  r.listings = {SymbolRef::of("AAPL", "XNAS"), SymbolRef::of("APC", "XFRA")};
  r.vendor_aliases = {{"reuters", "AAPL.OQ"}, {"bloomberg", "AAPL:US"}};
  r.display_name = "Apple Inc.";
  return r;
}

}  // namespace

TEST_CASE("register and resolve the dual-listed instrument") {
  SymbologyStore store;
  store.register_instrument(apple());
  CHECK(store.resolve(SymbolRef::of("AAPL", "XNAS")) == Isin{"US0378331005"});
  CHECK(store.resolve(SymbolRef::of("APC", "XFRA")) == Isin{"US0378331005"});
  CHECK(store.listings_of(Isin{"US0378331005"}) ==
        std::set<SymbolRef>{SymbolRef::of("AAPL", "XNAS"),
                            SymbolRef::of("APC", "XFRA")});
  CHECK(store.audit() == 0);
}

TEST_CASE("re-registering the identical record is a no-op") {
  SymbologyStore store;
  store.register_instrument(apple());
  store.register_instrument(apple());
  CHECK(store.size() == 1);
  CHECK(store.listings_of(Isin{"US0378331005"}).size() == 2);
  CHECK(store.audit() == 0);
}

TEST_CASE("conflicting listing is rejected") {
  SymbologyStore store;
  store.register_instrument(apple());
  InstrumentRecord other;
  other.isin = Isin{"US5949181045"};  // Microsoft
  other.listings = {SymbolRef::of("AAPL", "XNAS")};
  other.display_name = "not apple";
  CHECK_THROWS_AS(store.register_instrument(other), SymbologyError);
  CHECK(store.audit() == 0);
}

TEST_CASE("invalid isin is rejected") {
  SymbologyStore store;
  InstrumentRecord bad;
  bad.isin = Isin{"US0378331006"};
  bad.listings = {SymbolRef::of("X", "XNAS")};
  CHECK_THROWS_AS(store.register_instrument(bad), SymbologyError);
}

TEST_CASE("unknown symbol resolves to nothing") {
  SymbologyStore store;
  store.register_instrument(apple());
  CHECK_FALSE(store.resolve(SymbolRef::of("ZZZZ", "XFRA")).has_value());
  CHECK(store.listings_of(Isin{"US5949181045"}).empty());
}

TEST_CASE("listing moves need an explicit unregister") {
  SymbologyStore store;
  store.register_instrument(apple());
  InstrumentRecord successor;
  successor.isin = Isin{"US5949181045"};
  successor.listings = {SymbolRef::of("APC", "XFRA")};
  CHECK_THROWS_AS(store.register_instrument(successor), SymbologyError);
  store.unregister_instrument(Isin{"US0378331005"});
  store.register_instrument(successor);
  CHECK(store.resolve(SymbolRef::of("APC", "XFRA")) == Isin{"US5949181045"});
  CHECK_FALSE(store.resolve(SymbolRef::of("AAPL", "XNAS")).has_value());
  CHECK(store.audit() == 0);
}

TEST_CASE("round trip: listings_of inverts resolve over random records") {
  SymbologyStore store;
  Rng rng(99);
  std::set<SymbolRef> all_listings;
  static const char* kMics[] = {"XNAS", "XFRA", "XLON", "XTKS"};
  for (int i = 0; i < 200; ++i) {
    InstrumentRecord record;
    std::string prefix = "ZY";
    std::string body;
    for (int k = 0; k < 9; ++k)
      body += static_cast<char>('0' + rng.below(10));
    // Fix the check digit so the record is registrable.
    const auto digit = isin_check_digit(prefix + body);
    REQUIRE(digit.has_value());
    record.isin = Isin{prefix + body + static_cast<char>('0' + *digit)};
    if (store.find(record.isin)) continue;
    const int listings = 1 + static_cast<int>(rng.below(3));
    for (int l = 0; l < listings; ++l) {
      const auto sym = SymbolRef::of("R" + std::to_string(i) + "_" + std::to_string(l),
                                     kMics[rng.below(4)]);
      record.listings.insert(sym);
    }
    store.register_instrument(record);
    all_listings.insert(record.listings.begin(), record.listings.end());
  }
  // Union of listings_of over resolve covers exactly the registered set.
  std::set<SymbolRef> recovered;
  for (const auto& listing : all_listings) {
    const auto isin = store.resolve(listing);
    REQUIRE(isin.has_value());
    const auto listings = store.listings_of(*isin);
    CHECK(listings.count(listing) == 1);
    recovered.insert(listings.begin(), listings.end());
  }
  CHECK(recovered == all_listings);
  CHECK(store.audit() == 0);
}

TEST_CASE("bulk load accepts the documented grammar and reports rejects") {
  std::istringstream in(
      "# instruments\n"
      "US0378331005|Apple Inc.|XNAS:AAPL,XFRA:APC|reuters=AAPL.OQ\n"
      "US5949181045|Microsoft|XNAS:MSFT\n"
      "\n"
      "US0378331006|BadCheck|XNAS:BAD\n"
      "US5949181045|Microsoft again|XNAS:AAPL\n"
      "plainly wrong\n");
  SymbologyStore store;
  const auto report = load_refdata(store, in);
  CHECK(report.accepted == 2);
  REQUIRE(report.rejected.size() == 3);
  CHECK(report.rejected[0].first == 5);
  CHECK(report.rejected[1].first == 6);
  CHECK(report.rejected[2].first == 7);
  CHECK(store.resolve(SymbolRef::of("MSFT", "XNAS")) == Isin{"US5949181045"});
  CHECK(store.audit() == 0);
}
