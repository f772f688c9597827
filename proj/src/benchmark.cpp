#include "tp/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "tp/broker.hpp"
#include "tp/event_store.hpp"
#include "tp/feed_handler.hpp"
#include "tp/loadgen.hpp"
#include "tp/wire.hpp"

namespace tp {

namespace {

using Clock = std::chrono::steady_clock;

// Bounded MPSC queue with batch transfer; producers block when full, so
// overload turns into backpressure instead of loss.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  void push_batch(std::vector<T>& items) {
    std::size_t offset = 0;
    while (offset < items.size()) {
      std::unique_lock lock(mutex_);
      not_full_.wait(lock, [&] { return queue_.size() < capacity_; });
      while (offset < items.size() && queue_.size() < capacity_)
        queue_.push_back(std::move(items[offset++]));
      high_watermark_ = std::max(high_watermark_, queue_.size());
      not_empty_.notify_one();
    }
    items.clear();
  }

  // Drains everything available; false once closed and empty.
  bool pop_batch(std::vector<T>& out) {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return false;
    while (!queue_.empty()) {
      out.push_back(std::move(queue_.front()));
      queue_.pop_front();
    }
    not_full_.notify_all();
    return true;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
  }

  std::size_t high_watermark() const {
    std::lock_guard lock(mutex_);
    return high_watermark_;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> queue_;
  std::size_t capacity_;
  std::size_t high_watermark_{0};
  bool closed_{false};
};

struct RawFrame {
  std::uint32_t offset{0};
  std::uint32_t length{0};
  std::uint16_t feed_index{0};
  Clock::time_point enqueued{};
};

}  // namespace

std::string BenchResult::summary_text() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "target_rate|%.0f\nsustained_rate|%.0f\noffered|%llu\n"
                "processed|%llu\ndelivered_rows|%llu\nlost|%llu\n"
                "wall_p50_us|%lld\nwall_p99_us|%lld\nwall_max_us|%lld\n"
                "backpressure|%d\nqueue_high_watermark|%zu\nwall_seconds|%.2f\n",
                target_rate, sustained_rate,
                static_cast<unsigned long long>(offered),
                static_cast<unsigned long long>(processed),
                static_cast<unsigned long long>(delivered_rows),
                static_cast<unsigned long long>(lost),
                static_cast<long long>(wall_p50_us),
                static_cast<long long>(wall_p99_us),
                static_cast<long long>(wall_max_us), backpressure ? 1 : 0,
                queue_high_watermark, wall_seconds);
  return buf;
}

BenchResult run_benchmark(const SimConfig& config, double target_rate,
                          DurationUs duration) {
  if (target_rate <= 0) throw ConfigError("benchmark target rate must be > 0");
  const auto total =
      static_cast<std::uint64_t>(target_rate * static_cast<double>(duration) / kSecond);
  if (total == 0) throw ConfigError("benchmark horizon too small");

  // Stage 0: pre-generate and pre-encode the workload so generation cost
  // stays out of the measured path.
  std::vector<std::uint8_t> frames;
  std::vector<RawFrame> index;
  std::vector<std::string> feed_ids;
  {
    std::map<std::string, std::uint16_t> feed_index;
    StreamGenerator generator(config.generator);
    index.reserve(total);
    frames.reserve(total * 110);
    while (index.size() < total) {
      auto n = generator.next();
      if (!n) break;
      const auto offset = static_cast<std::uint32_t>(frames.size());
      append_vfb_frame(*n, frames);
      auto [it, inserted] =
          feed_index.try_emplace(n->feed_id,
                                 static_cast<std::uint16_t>(feed_ids.size()));
      if (inserted) feed_ids.push_back(n->feed_id);
      index.push_back(RawFrame{offset,
                               static_cast<std::uint32_t>(frames.size()) - offset,
                               it->second, {}});
    }
  }
  if (index.size() < total)
    throw ConfigError("generator produced fewer notifications than the "
                      "benchmark needs; raise base_rate or horizon");

  BenchResult result;
  result.target_rate = target_rate;
  result.offered = total;

  // Two stages: a pacing producer and a worker running the whole
  // parse -> normalize -> store -> route -> deliver path. One bounded
  // queue between them keeps overload as backpressure; more stages would
  // oversubscribe the small machines this targets.
  BoundedQueue<RawFrame> parse_queue(1 << 16);
  const auto wall_start = Clock::now();

  // Producer: paces injection in 1ms slices of the target rate. A full
  // queue blocks it; sustained schedule slip is reported as backpressure.
  std::thread producer([&] {
    const auto start = Clock::now();
    std::uint64_t sent = 0;
    bool slipped = false;
    std::vector<RawFrame> batch;
    while (sent < total) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
                               Clock::now() - start)
                               .count();
      const auto due = std::min<std::uint64_t>(
          total, static_cast<std::uint64_t>(target_rate * elapsed / 1e6) + 1);
      if (due <= sent) {
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        continue;
      }
      if (due - sent > target_rate) slipped = true;  // >1s behind schedule
      const auto stamp = Clock::now();
      batch.reserve(due - sent);
      while (sent < due) {
        RawFrame frame = index[sent];
        frame.enqueued = stamp;
        batch.push_back(frame);
        ++sent;
      }
      parse_queue.push_batch(batch);
    }
    if (slipped) result.backpressure = true;
    parse_queue.close();
  });

  std::vector<DurationUs> latencies;
  latencies.reserve(total);
  std::uint64_t processed = 0;
  std::uint64_t delivered = 0;
  std::uint64_t quarantined = 0;

  std::thread processor([&] {
    EventStore store(config.history_capacity);
    BrokerNetwork network(config.topology, config.symbology,
                          config.entitlements, config.per_broker_cost_us,
                          config.generator.from,
                          /*check_exactly_once=*/false);
    for (const auto& sub : config.subscriptions) {
      try {
        network.subscribe(sub);
      } catch (const BrokerError& e) {
        if (e.code != BrokerError::Code::NotEntitled) throw;
      }
    }
    std::map<std::string, FeedHandler> handlers;
    for (const auto& profile : config.generator.profiles)
      handlers.emplace(profile.feed_id, FeedHandler(profile.feed_id));

    std::vector<RawFrame> batch;
    while (parse_queue.pop_batch(batch)) {
      for (const RawFrame& frame : batch) {
        auto parsed = parse_vfb_frame(
            std::span(frames).subspan(frame.offset, frame.length),
            feed_ids[frame.feed_index]);
        Notification& n = parsed.notification;
        FeedHandler& handler = handlers.at(n.feed_id);
        if (handler.check_sequence(n, n.publish_ts) ==
            SeqStatus::DuplicateOrReplay)
          continue;
        auto enriched = handler.normalize_and_enrich(config.symbology, n);
        if (!enriched) {
          ++quarantined;
          continue;
        }
        store.append(*enriched);
        delivered += network.publish(*enriched).size();
        ++processed;
        latencies.push_back(
            std::chrono::duration_cast<std::chrono::microseconds>(
                Clock::now() - frame.enqueued)
                .count());
      }
      batch.clear();
    }
    delivered += network.finish().size();
  });

  producer.join();
  processor.join();
  result.wall_seconds =
      std::chrono::duration<double>(Clock::now() - wall_start).count();

  result.processed = processed;
  result.delivered_rows = delivered;
  result.lost = total - processed - quarantined;
  result.sustained_rate =
      result.wall_seconds > 0 ? static_cast<double>(processed) / result.wall_seconds
                              : 0;
  result.queue_high_watermark = parse_queue.high_watermark();

  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    const auto rank = [&](double p) {
      const std::size_t r = static_cast<std::size_t>(std::max<double>(
          1.0, std::ceil(p * static_cast<double>(latencies.size()))));
      return latencies[r - 1];
    };
    result.wall_p50_us = rank(0.50);
    result.wall_p99_us = rank(0.99);
    result.wall_max_us = latencies.back();
  }
  return result;
}

}  // namespace tp
