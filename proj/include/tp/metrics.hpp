#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tp/time.hpp"

namespace tp {

// End-to-end latency collection. Latency here is the broker-path cost
// excluding QoI-induced delay: a 15-minute delayed feed is on time when
// it delivers at +15min, so only transport and processing count against
// the budget. Percentiles are nearest-rank.
class LatencyRecorder {
 public:
  void record(const std::string& subscriber_id, DurationUs latency_us,
              VirtualTime deliver_ts);

  struct Summary {
    std::uint64_t count{0};
    DurationUs p50{0};
    DurationUs p99{0};
    DurationUs max{0};
  };

  Summary overall() const;
  std::map<std::string, Summary> per_subscriber() const;
  std::uint64_t count() const;

  // subscriber|count|p50_us|p99_us|max_us with an ALL row first.
  std::string summary_text() const;
  // Log-scaled histogram: le_us doubling buckets, lines `le_us|count`.
  std::string histogram_text() const;
  // Deliveries per virtual second: `second|count`.
  std::string throughput_text() const;

 private:
  static Summary summarize(std::vector<DurationUs> values);

  std::map<std::string, std::vector<DurationUs>> by_subscriber_;
  std::map<std::int64_t, std::uint64_t> per_second_;
};

// Generated-notification counts in 10-minute bins per feed; the series
// behind the diurnal-shape checks.
class RateSeries {
 public:
  static constexpr DurationUs kBin = 10 * kMinute;

  void record(const std::string& feed_id, VirtualTime publish_ts);

  std::uint64_t total() const { return total_; }
  const std::map<std::pair<std::string, std::int64_t>, std::uint64_t>& bins() const {
    return bins_;
  }
  std::vector<std::uint64_t> feed_series(const std::string& feed_id,
                                         VirtualTime from, VirtualTime to) const;

  // feed|bin_start_us|count
  std::string series_text() const;

 private:
  std::map<std::pair<std::string, std::int64_t>, std::uint64_t> bins_;
  std::uint64_t total_{0};
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tp
