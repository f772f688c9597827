#include "tp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tp {

void LatencyRecorder::record(const std::string& subscriber_id,
                             DurationUs latency_us, VirtualTime deliver_ts) {
  by_subscriber_[subscriber_id].push_back(latency_us);
  ++per_second_[deliver_ts.us / kSecond];
}

LatencyRecorder::Summary LatencyRecorder::summarize(std::vector<DurationUs> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const auto rank = [&](double p) {
    const std::size_t r = static_cast<std::size_t>(
        std::max<double>(1.0, std::ceil(p * static_cast<double>(values.size()))));
    return values[r - 1];
  };
  s.p50 = rank(0.50);
  s.p99 = rank(0.99);
  s.max = values.back();
  return s;
}

LatencyRecorder::Summary LatencyRecorder::overall() const {
  std::vector<DurationUs> all;
  for (const auto& [id, values] : by_subscriber_)
    all.insert(all.end(), values.begin(), values.end());
  return summarize(std::move(all));
}

std::map<std::string, LatencyRecorder::Summary> LatencyRecorder::per_subscriber()
    const {
  std::map<std::string, Summary> out;
  for (const auto& [id, values] : by_subscriber_) out[id] = summarize(values);
  return out;
}

std::uint64_t LatencyRecorder::count() const {
  std::uint64_t total = 0;
  for (const auto& [id, values] : by_subscriber_) total += values.size();
  return total;
}

namespace {

std::string summary_row(const std::string& name,
                        const LatencyRecorder::Summary& s) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s|%llu|%lld|%lld|%lld\n", name.c_str(),
                static_cast<unsigned long long>(s.count),
                static_cast<long long>(s.p50), static_cast<long long>(s.p99),
                static_cast<long long>(s.max));
  return buf;
}

}  // namespace

std::string LatencyRecorder::summary_text() const {
  std::string out = "subscriber|count|p50_us|p99_us|max_us\n";
  out += summary_row("ALL", overall());
  for (const auto& [id, summary] : per_subscriber())
    out += summary_row(id, summary);
  return out;
}

std::string LatencyRecorder::histogram_text() const {
  std::map<DurationUs, std::uint64_t> buckets;  // upper bound -> count
  for (const auto& [id, values] : by_subscriber_) {
    for (DurationUs v : values) {
      DurationUs le = 1;
      while (le < v) le *= 2;
      ++buckets[le];
    }
  }
  std::string out = "le_us|count\n";
  char buf[64];
  for (const auto& [le, count] : buckets) {
    std::snprintf(buf, sizeof(buf), "%lld|%llu\n", static_cast<long long>(le),
                  static_cast<unsigned long long>(count));
    out += buf;
  }
  return out;
}

std::string LatencyRecorder::throughput_text() const {
  std::string out = "second|count\n";
  char buf[64];
  for (const auto& [second, count] : per_second_) {
    std::snprintf(buf, sizeof(buf), "%lld|%llu\n", static_cast<long long>(second),
                  static_cast<unsigned long long>(count));
    out += buf;
  }
  return out;
}

void RateSeries::record(const std::string& feed_id, VirtualTime publish_ts) {
  ++bins_[{feed_id, publish_ts.us / kBin}];
  ++total_;
}

std::vector<std::uint64_t> RateSeries::feed_series(const std::string& feed_id,
                                                   VirtualTime from,
                                                   VirtualTime to) const {
  std::vector<std::uint64_t> out;
  for (std::int64_t bin = from.us / kBin; bin < (to.us + kBin - 1) / kBin; ++bin) {
    const auto it = bins_.find({feed_id, bin});
    out.push_back(it == bins_.end() ? 0 : it->second);
  }
  return out;
}

std::string RateSeries::series_text() const {
  std::string out = "feed|bin_start_us|count\n";
  char buf[64];
  for (const auto& [key, count] : bins_) {
    std::snprintf(buf, sizeof(buf), "|%lld|%llu\n",
                  static_cast<long long>(key.second * kBin),
                  static_cast<unsigned long long>(count));
    out += key.first + buf;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace tp
