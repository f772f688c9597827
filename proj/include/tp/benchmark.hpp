#pragma once

#include <cstdint>
#include <string>

#include "tp/config.hpp"

namespace tp {

struct BenchResult {
  double target_rate{0};
  double sustained_rate{0};
  std::uint64_t offered{0};
  std::uint64_t processed{0};
  std::uint64_t delivered_rows{0};
  std::uint64_t lost{0};  // must stay 0; only conflation may drop
  DurationUs wall_p50_us{0};
  DurationUs wall_p99_us{0};
  DurationUs wall_max_us{0};
  bool backpressure{false};
  std::size_t queue_high_watermark{0};
  double wall_seconds{0};

  std::string summary_text() const;
};

// Wall-clock benchmark: a paced producer feeds encoded frames through
// parse -> sequence/enrich -> store -> route -> deliver across three
// pipeline threads connected by bounded queues. Nothing may drop; if the
// producer cannot hold the target rate the run reports Backpressure
// rather than failing.
BenchResult run_benchmark(const SimConfig& config, double target_rate,
                          DurationUs duration);

}  // namespace tp
