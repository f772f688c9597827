#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "tp/entitlement.hpp"
#include "tp/loadgen.hpp"
#include "tp/subscription.hpp"
#include "tp/symbology.hpp"
#include "tp/topology.hpp"

namespace tp {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class RunMode : std::uint8_t { Deterministic, Benchmark };

// Everything one run needs. The JSON config carries generator parameters
// inline and references the line-based topology/subscription/entitlement/
// refdata files relative to its own directory.
struct SimConfig {
  GeneratorConfig generator;
  BrokerTopology topology;
  std::vector<Subscription> subscriptions;
  EntitlementStore entitlements;
  SymbologyStore symbology;
  RunMode mode{RunMode::Deterministic};
  DurationUs per_broker_cost_us{50};
  std::size_t history_capacity{4'000'000};
  Price4 spread_event_threshold{0};  // 0 disables SpreadAbove events
  bool derived_events{true};
  bool record_delivery_log{true};
};

// Loads and cross-validates a config; throws ConfigError with the failing
// detail. TP_SEED in the environment overrides the configured seed.
SimConfig load_sim_config(const std::string& path);

// Synthetic but check-digit-valid ISIN for a generated symbol.
Isin synthetic_isin(const SymbolRef& symbol);

// Registers any profile symbols missing from the store, one instrument
// per symbol with a synthetic ISIN.
void auto_register_symbols(SymbologyStore& store,
                           const std::vector<ExchangeProfile>& profiles);

}  // namespace tp
