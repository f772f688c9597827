#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tp/broker.hpp"
#include "tp/config.hpp"
#include "tp/feed_handler.hpp"
#include "tp/metrics.hpp"

namespace tp {

struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& what)
      : std::runtime_error(what) {}
};

// One row of the exported delivery log; compact on purpose so large runs
// can retain the full log.
struct DeliveryRow {
  VirtualTime deliver_ts{};
  std::string subscriber_id;
  SourceRef source;
  SymbolRef symbol;
  DurationUs transport_us{0};
  bool is_bar{false};
};

std::string format_delivery_row(const DeliveryRow& row);

struct SimCounters {
  std::uint64_t generated{0};
  std::uint64_t gap_dropped{0};
  std::uint64_t duplicates{0};
  std::uint64_t quarantined{0};
  std::uint64_t processed{0};
  std::uint64_t derived_events{0};
  std::uint64_t delivered_rows{0};
  std::uint64_t conflation_dropped{0};
  std::uint64_t folded_into_bars{0};
  std::uint64_t tree_link_traversals{0};
  std::uint64_t flood_link_traversals{0};
  std::size_t qoi_high_watermark{0};
};

struct SimulationResult {
  LatencyRecorder latency;
  MeterLedger ledger;
  std::vector<DeliveryRow> deliveries;  // sorted, deterministic
  std::vector<std::string> bar_lines;   // subscriber|<bar export format>
  std::vector<GapEvent> gaps;
  RateSeries rate_series;
  SimCounters counters;
  std::vector<std::string> denied_subscriptions;  // "subscriber reason"
  std::vector<std::string> invariant_violations;

  bool ok() const { return invariant_violations.empty(); }
};

// Deterministic single-loop run over the generated stream: feed handlers,
// event store, KPI derivation, broker routing with QoI degradation,
// metering. Identical config (and seed) produces bit-identical outputs.
SimulationResult run_simulation(const SimConfig& config);

// Writes latency_summary.txt, latency_histogram.txt, throughput.txt,
// rate_series.txt, delivery_log.txt, gap_log.txt, usage_report.txt and
// run_summary.txt under out_dir. Regeneration is byte-identical.
void emit_metrics(const SimulationResult& result, const SimConfig& config,
                  const std::string& out_dir);

}  // namespace tp
