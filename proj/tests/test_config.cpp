#include <doctest.h>

#include <cstdlib>

#include "tp/config.hpp"

using namespace tp;

TEST_CASE("flagship config loads and cross-validates") {
  const auto config = load_sim_config(std::string(TP_CONFIG_DIR) + "/flagship.json");
  CHECK(config.generator.profiles.size() == 3);
  CHECK(config.generator.spikes.size() == 1);
  CHECK(config.topology.brokers.size() == 4);
  CHECK(config.subscriptions.size() == 6);
  CHECK(config.mode == RunMode::Deterministic);
  CHECK(config.per_broker_cost_us == 50);
  CHECK(config.spread_event_threshold == 500);

  // Every profile symbol resolves after auto-registration.
  for (const auto& profile : config.generator.profiles)
    for (const auto& symbol : profile.symbols)
      CHECK(config.symbology.resolve(symbol).has_value());
  // Bulk refdata is in too.
  CHECK(config.symbology.resolve(SymbolRef::of("AAPL", "XNAS")).has_value());
  CHECK(config.symbology.audit() == 0);

  // Tokyo profile carries the hard lunch.
  const auto& tokyo = config.generator.profiles[2];
  REQUIRE(tokyo.lunch.has_value());
  CHECK(tokyo.lunch->mode == LunchBreak::Mode::HardClose);
}

TEST_CASE("bench config loads in benchmark mode") {
  const auto config = load_sim_config(std::string(TP_CONFIG_DIR) + "/bench.json");
  CHECK(config.mode == RunMode::Benchmark);
  CHECK(config.generator.profiles[0].symbols.size() == 10'000);
  CHECK_FALSE(config.record_delivery_log);
}

TEST_CASE("TP_SEED overrides the configured seed") {
  setenv("TP_SEED", "987654", 1);
  const auto config = load_sim_config(std::string(TP_CONFIG_DIR) + "/flagship.json");
  unsetenv("TP_SEED");
  CHECK(config.generator.seed == 987654);
}

TEST_CASE("synthetic isins validate and are stable") {
  const auto sym = SymbolRef::of("NAS0001", "XNAS");
  const auto isin = synthetic_isin(sym);
  CHECK(validate_isin(isin.code));
  CHECK(synthetic_isin(sym) == isin);
  CHECK(isin.code.substr(0, 2) == "ZZ");
  CHECK(synthetic_isin(SymbolRef::of("NAS0002", "XNAS")) != isin);
}

TEST_CASE("missing and broken configs raise ConfigError") {
  CHECK_THROWS_AS(load_sim_config("/nonexistent/config.json"), ConfigError);
}
