#include "tp/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <tuple>

#include "tp/event_store.hpp"
#include "tp/kpi.hpp"
#include "tp/loadgen.hpp"

namespace tp {

std::string format_delivery_row(const DeliveryRow& row) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "|%u|%u|%lld|%lld",
                row.source.channel_id, row.source.seq_no,
                static_cast<long long>(row.source.publish_ts.us),
                static_cast<long long>(row.deliver_ts.us));
  return row.subscriber_id + "|" + row.source.feed_id + buf;
}

namespace {

struct Engine {
  const SimConfig& config;
  SimulationResult result;
  EventStore store;
  KpiEngine kpi;
  std::map<std::string, FeedHandler> handlers;
  std::map<std::string, ResolvedFilter> admitted_filters;
  std::uint32_t derived_seq = 1;

  explicit Engine(const SimConfig& cfg)
      : config(cfg),
        store(cfg.history_capacity),
        kpi(DerivedEventThresholds{cfg.spread_event_threshold}) {}

  void collect(std::vector<Delivery>&& deliveries) {
    for (auto& d : deliveries) {
      DeliveryRow row;
      row.deliver_ts = d.item.release_ts;
      row.subscriber_id = d.subscriber_id;
      row.source = d.item.source;
      row.symbol = d.item.is_bar ? d.item.bar.symbol : d.item.notification.symbol;
      row.transport_us = d.item.transport_latency_us;
      row.is_bar = d.item.is_bar;

      const std::int64_t day = d.item.is_bar
                                   ? utc_day(d.item.bar.window_start)
                                   : utc_day(d.item.source.publish_ts);
      result.ledger.record(row.subscriber_id, row.source.feed_id, day, row.symbol);
      result.latency.record(row.subscriber_id, row.transport_us, row.deliver_ts);
      ++result.counters.delivered_rows;
      if (config.record_delivery_log) {
        if (d.item.is_bar)
          result.bar_lines.push_back(d.subscriber_id + "|" +
                                     format_bar(d.item.bar));
        result.deliveries.push_back(std::move(row));
      }
    }
  }
};

void audit(Engine& engine, BrokerNetwork& network) {
  SimulationResult& result = engine.result;
  auto violation = [&](const std::string& detail) {
    result.invariant_violations.push_back(detail);
  };

  if (network.duplicate_deliveries() != 0)
    violation("duplicate deliveries observed: " +
              std::to_string(network.duplicate_deliveries()));

  const DegraderCounters totals = network.degrader_totals();
  if (!totals.conserve())
    violation("degrader conservation failed: arrivals never balance releases");
  result.counters.conflation_dropped =
      totals.dropped_notifications + totals.dropped_bar_ticks;
  result.counters.folded_into_bars = totals.released_bar_ticks;

  if (network.tree_link_traversals() > network.flood_link_traversals())
    violation("tree traffic exceeds flood traffic");
  result.counters.tree_link_traversals = network.tree_link_traversals();
  result.counters.flood_link_traversals = network.flood_link_traversals();
  result.counters.qoi_high_watermark = network.qoi_high_watermark();

  if (result.ledger.total_deliveries() != result.counters.delivered_rows)
    violation("meter total diverges from delivery rows");
  if (result.latency.count() != result.counters.delivered_rows)
    violation("latency sample count diverges from delivery rows");

  // No leakage: every delivered row matches its subscriber's admitted
  // filter. Denied subscriptions have no state, so any row for them is a
  // leak by construction.
  for (const auto& row : result.deliveries) {
    const auto it = engine.admitted_filters.find(row.subscriber_id);
    if (it == engine.admitted_filters.end()) {
      violation("delivery to unadmitted subscriber " + row.subscriber_id);
      continue;
    }
    if (!it->second.feeds.count(row.source.feed_id) &&
        !it->second.symbols.count(row.symbol))
      violation("delivery outside filter for " + row.subscriber_id);
  }
}

}  // namespace

SimulationResult run_simulation(const SimConfig& config) {
  Engine engine(config);
  BrokerNetwork network(config.topology, config.symbology, config.entitlements,
                        config.per_broker_cost_us, config.generator.from,
                        /*check_exactly_once=*/true);

  for (const auto& sub : config.subscriptions) {
    try {
      network.subscribe(sub);
      engine.admitted_filters.emplace(
          sub.subscriber_id, resolve_filter(sub.filter, config.symbology));
    } catch (const BrokerError& e) {
      if (e.code != BrokerError::Code::NotEntitled) throw;
      engine.result.denied_subscriptions.push_back(sub.subscriber_id + " " +
                                                   e.what());
    }
  }

  for (const auto& profile : config.generator.profiles)
    engine.handlers.emplace(profile.feed_id, FeedHandler(profile.feed_id));

  StreamGenerator generator(config.generator);
  std::int64_t current_day = utc_day(config.generator.from);
  const bool derived_attached =
      config.topology.publisher_attach.count(kDerivedFeedId) > 0;

  while (auto n = generator.next()) {
    // UTC day boundary: clear day state everywhere, exactly once per day.
    const std::int64_t day = utc_day(n->publish_ts);
    if (day != current_day) {
      const VirtualTime boundary{day * kDay};
      for (auto& [feed, handler] : engine.handlers) handler.reset_day(boundary);
      engine.kpi.reset_day();
      current_day = day;
    }

    engine.result.rate_series.record(n->feed_id, n->publish_ts);
    FeedHandler& handler = engine.handlers.at(n->feed_id);
    const SeqStatus seq_status = handler.check_sequence(*n, n->publish_ts);
    if (seq_status == SeqStatus::DuplicateOrReplay) {
      ++engine.result.counters.duplicates;
      continue;
    }

    auto enriched = handler.normalize_and_enrich(config.symbology, *n);
    if (!enriched) {
      ++engine.result.counters.quarantined;
      continue;
    }
    engine.store.append(*enriched);
    ++engine.result.counters.processed;

    if (enriched->kind == NotificationKind::Tick && config.derived_events) {
      std::vector<DerivedEvent> events;
      engine.kpi.on_tick(*enriched, &events);
      for (const auto& event : events) {
        ++engine.result.counters.derived_events;
        const Notification derived =
            derived_event_notification(event, engine.derived_seq++);
        const BrokerId& origin =
            derived_attached
                ? config.topology.publisher_attach.at(kDerivedFeedId)
                : config.topology.publisher_attach.at(enriched->feed_id);
        engine.collect(network.publish_from(origin, derived));
      }
    }

    engine.collect(network.publish(*enriched));
  }
  engine.collect(network.finish());

  engine.result.counters.generated = generator.generated();
  engine.result.counters.gap_dropped = generator.gap_dropped();
  for (const auto& [feed, handler] : engine.handlers) {
    engine.result.gaps.insert(engine.result.gaps.end(), handler.gaps().begin(),
                              handler.gaps().end());
  }
  std::sort(engine.result.gaps.begin(), engine.result.gaps.end(),
            [](const GapEvent& a, const GapEvent& b) {
              return std::tie(a.detected_at.us, a.feed_id, a.channel_id, a.expected) <
                     std::tie(b.detected_at.us, b.feed_id, b.channel_id, b.expected);
            });

  engine.result.ledger.close_through(utc_day(config.generator.to) + 1);

  std::sort(engine.result.deliveries.begin(), engine.result.deliveries.end(),
            [](const DeliveryRow& a, const DeliveryRow& b) {
              return std::tie(a.deliver_ts.us, a.subscriber_id, a.source.feed_id,
                              a.source.channel_id, a.source.seq_no, a.is_bar) <
                     std::tie(b.deliver_ts.us, b.subscriber_id, b.source.feed_id,
                              b.source.channel_id, b.source.seq_no, b.is_bar);
            });

  audit(engine, network);
  return engine.result;
}

void emit_metrics(const SimulationResult& result, const SimConfig& config,
                  const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) { return out_dir + "/" + name; };

  write_text_file(path("latency_summary.txt"),
                  "# transport latency, QoI-induced delay excluded\n" +
                      result.latency.summary_text());
  write_text_file(path("latency_histogram.txt"), result.latency.histogram_text());
  write_text_file(path("throughput.txt"), result.latency.throughput_text());
  write_text_file(path("rate_series.txt"), result.rate_series.series_text());

  std::string log = "subscriber|feed|channel|seq|publish_ts|deliver_ts\n";
  for (const auto& row : result.deliveries) {
    log += format_delivery_row(row);
    log += '\n';
  }
  write_text_file(path("delivery_log.txt"), log);

  std::string gaps = "feed|channel|expected|received|detected_at\n";
  char buf[160];
  for (const auto& gap : result.gaps) {
    std::snprintf(buf, sizeof(buf), "%s|%u|%u|%u|%lld\n", gap.feed_id.c_str(),
                  gap.channel_id, gap.expected, gap.received,
                  static_cast<long long>(gap.detected_at.us));
    gaps += buf;
  }
  write_text_file(path("gap_log.txt"), gaps);

  write_text_file(path("usage_report.txt"),
                  result.ledger.usage_report(utc_day(config.generator.from),
                                             utc_day(config.generator.to) + 1));

  std::string summary;
  const auto line = [&](const char* key, std::uint64_t value) {
    std::snprintf(buf, sizeof(buf), "%s|%llu\n", key,
                  static_cast<unsigned long long>(value));
    summary += buf;
  };
  line("generated", result.counters.generated);
  line("gap_dropped", result.counters.gap_dropped);
  line("duplicates", result.counters.duplicates);
  line("quarantined", result.counters.quarantined);
  line("processed", result.counters.processed);
  line("derived_events", result.counters.derived_events);
  line("delivered_rows", result.counters.delivered_rows);
  line("conflation_dropped", result.counters.conflation_dropped);
  line("folded_into_bars", result.counters.folded_into_bars);
  line("tree_link_traversals", result.counters.tree_link_traversals);
  line("flood_link_traversals", result.counters.flood_link_traversals);
  line("qoi_high_watermark", result.counters.qoi_high_watermark);
  line("denied_subscriptions", result.denied_subscriptions.size());
  line("invariant_violations", result.invariant_violations.size());
  for (const auto& violation : result.invariant_violations)
    summary += "violation|" + violation + "\n";
  write_text_file(path("run_summary.txt"), summary);
}

}  // namespace tp
