#include "tp/broker.hpp"

#include <cstdio>

namespace tp {

std::string format_delivery(const Delivery& d) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "|%u|%u|%lld|%lld",
                d.item.source.channel_id, d.item.source.seq_no,
                static_cast<long long>(d.item.source.publish_ts.us),
                static_cast<long long>(d.item.release_ts.us));
  return d.subscriber_id + "|" + d.item.source.feed_id + buf;
}

BrokerNetwork::BrokerNetwork(const BrokerTopology& topology,
                             const SymbologyStore& symbology,
                             const EntitlementStore& entitlements,
                             DurationUs per_broker_cost_us,
                             VirtualTime admission_time, bool check_exactly_once)
    : topology_(topology),
      symbology_(symbology),
      entitlements_(entitlements),
      tree_(SpanningTree::build(topology)),
      per_broker_cost_us_(per_broker_cost_us),
      admission_time_(admission_time),
      check_exactly_once_(check_exactly_once) {
  for (const auto& [broker, parent] : tree_.parents()) {
    if (broker == parent) continue;
    const auto id = static_cast<std::uint32_t>(edge_ids_.size());
    edge_ids_.emplace(SpanningTree::edge_key(broker, parent), id);
  }
  edge_mark_.assign(edge_ids_.size(), 0);
}

const BrokerNetwork::PathInfo& BrokerNetwork::path_info(SubscriberState& state,
                                                        const BrokerId& origin) {
  const auto cached = state.paths.find(origin);
  if (cached != state.paths.end()) return cached->second;
  PathInfo info;
  const auto path = tree_.path(origin, state.broker);
  info.transport_us =
      tree_.path_latency(origin, state.broker) +
      per_broker_cost_us_ * static_cast<DurationUs>(path.size());
  for (const auto& edge : tree_.path_edges(origin, state.broker))
    info.edge_ids.push_back(edge_ids_.at(edge));
  return state.paths.emplace(origin, std::move(info)).first->second;
}

void BrokerNetwork::install_atom(const std::string& atom,
                                 const std::string& subscriber_id) {
  atom_subscribers_[atom].insert(subscriber_id);
  // Propagate along the tree: every broker learns the next hop toward the
  // subscriber's attachment broker; the edge broker gets a local entry.
  const BrokerId& target = subscribers_.at(subscriber_id).broker;
  for (const auto& [broker, parent] : tree_.parents()) {
    (void)parent;
    if (broker == target) {
      routes_[broker][atom].local_subscribers.insert(subscriber_id);
      continue;
    }
    const auto path = tree_.path(broker, target);
    routes_[broker][atom].next_hops.insert(path[1]);
  }
}

void BrokerNetwork::subscribe(const Subscription& sub) {
  if (sub.filter.empty())
    throw std::invalid_argument("subscription filter must be non-empty");
  const auto existing = subscriptions_.find(sub.subscriber_id);
  if (existing != subscriptions_.end()) {
    const Subscription& have = existing->second;
    const bool identical = have.filter.symbols == sub.filter.symbols &&
                           have.filter.isins == sub.filter.isins &&
                           have.filter.feeds == sub.filter.feeds &&
                           have.qoi == sub.qoi && have.policy == sub.policy;
    if (identical) return;  // idempotent
    throw BrokerError(BrokerError::Code::ConflictingSubscription,
                      sub.subscriber_id + " already subscribed differently");
  }

  const auto attach = topology_.subscriber_attach.find(sub.subscriber_id);
  if (attach == topology_.subscriber_attach.end() ||
      !topology_.brokers.count(attach->second))
    throw BrokerError(BrokerError::Code::UnknownBrokerAttachment,
                      "no attachment for subscriber " + sub.subscriber_id);

  // Admission: judge the filter after ISIN expansion so exchange-scoped
  // entitlements see the actual listings.
  Subscription expanded = sub;
  expanded.filter.symbols = resolve_filter(sub.filter, symbology_).symbols;
  expanded.filter.isins.clear();
  const auto decision = entitlements_.check(expanded, admission_time_);
  if (!decision.permitted) {
    denied_.emplace_back(sub, decision.reason);
    throw BrokerError(BrokerError::Code::NotEntitled,
                      sub.subscriber_id + " denied: " + decision.reason);
  }

  SubscriberState state{sub, resolve_filter(sub.filter, symbology_),
                        attach->second, QoiDegrader(sub.qoi, sub.policy)};
  subscriptions_.emplace(sub.subscriber_id, sub);
  subscribers_.emplace(sub.subscriber_id, std::move(state));
  for (const auto& symbol : subscribers_.at(sub.subscriber_id).filter.symbols)
    install_atom(symbol_atom(symbol), sub.subscriber_id);
  for (const auto& feed : subscribers_.at(sub.subscriber_id).filter.feeds)
    install_atom(feed_atom(feed), sub.subscriber_id);
}

const BrokerNetwork::RouteEntry* BrokerNetwork::route(
    const BrokerId& broker, const std::string& atom) const {
  const auto b = routes_.find(broker);
  if (b == routes_.end()) return nullptr;
  const auto a = b->second.find(atom);
  return a == b->second.end() ? nullptr : &a->second;
}

std::vector<Delivery> BrokerNetwork::publish(const Notification& n) {
  const auto attach = topology_.publisher_attach.find(n.feed_id);
  if (attach == topology_.publisher_attach.end())
    throw BrokerError(BrokerError::Code::UnattachedPublisher,
                      "feed " + n.feed_id + " has no publisher attachment");
  return publish_from(attach->second, n);
}

std::vector<Delivery> BrokerNetwork::publish_from(const BrokerId& broker,
                                                  const Notification& n) {
  if (!topology_.brokers.count(broker))
    throw BrokerError(BrokerError::Code::UnattachedPublisher,
                      "unknown publisher broker " + broker);
  return route_to_matches(broker, n);
}

std::vector<Delivery> BrokerNetwork::route_to_matches(const BrokerId& origin,
                                                      const Notification& n) {
  // Matching subscribers: union of the notification's symbol and feed atoms.
  symbol_key_.assign("sym:");
  symbol_key_ += n.symbol.local_symbol;
  symbol_key_ += '@';
  symbol_key_ += n.symbol.mic.code;
  feed_key_.assign("feed:");
  feed_key_ += n.feed_id;

  flood_traversals_ += tree_.edge_count();

  const auto by_symbol = atom_subscribers_.find(symbol_key_);
  const auto by_feed = atom_subscribers_.find(feed_key_);
  const auto end = atom_subscribers_.end();
  if (by_symbol == end && by_feed == end) return {};

  std::vector<Delivery> out;
  ++mark_generation_;
  std::size_t used_edges = 0;
  const auto deliver_to = [&](const std::string& subscriber_id) {
    auto& state = subscribers_.at(subscriber_id);
    const PathInfo& path = path_info(state, origin);
    for (const std::uint32_t edge : path.edge_ids) {
      if (edge_mark_[edge] != mark_generation_) {
        edge_mark_[edge] = mark_generation_;
        ++used_edges;
      }
    }
    const VirtualTime edge_arrival = n.publish_ts + path.transport_us;
    if (check_exactly_once_) {
      char key[64];
      std::snprintf(key, sizeof(key), "/%u/%u/", n.channel_id, n.seq_no);
      if (!seen_.insert(subscriber_id + "|" + n.feed_id + key).second)
        ++duplicate_deliveries_;
    }
    for (auto& item : state.degrader.on_arrival(edge_arrival, n)) {
      out.push_back(Delivery{subscriber_id, edge_arrival, std::move(item)});
    }
  };
  if (by_symbol != end && by_feed != end) {
    // Union of both atom sets, each subscriber exactly once.
    std::set<std::string> matched(by_symbol->second.begin(),
                                  by_symbol->second.end());
    matched.insert(by_feed->second.begin(), by_feed->second.end());
    for (const auto& subscriber_id : matched) deliver_to(subscriber_id);
  } else {
    const auto& only = by_symbol != end ? by_symbol->second : by_feed->second;
    for (const auto& subscriber_id : only) deliver_to(subscriber_id);
  }
  tree_traversals_ += used_edges;
  return out;
}

std::vector<Delivery> BrokerNetwork::finish() {
  std::vector<Delivery> out;
  for (auto& [subscriber_id, state] : subscribers_) {
    for (auto& item : state.degrader.finish()) {
      out.push_back(Delivery{subscriber_id, item.release_ts, std::move(item)});
    }
  }
  return out;
}

std::size_t BrokerNetwork::qoi_high_watermark() const {
  std::size_t watermark = 0;
  for (const auto& [id, state] : subscribers_)
    watermark = std::max(watermark, state.degrader.high_watermark());
  return watermark;
}

DegraderCounters BrokerNetwork::degrader_totals() const {
  DegraderCounters totals;
  for (const auto& [id, state] : subscribers_) {
    const auto& c = state.degrader.counters();
    totals.arrivals += c.arrivals;
    totals.released_notifications += c.released_notifications;
    totals.released_bars += c.released_bars;
    totals.released_bar_ticks += c.released_bar_ticks;
    totals.dropped_notifications += c.dropped_notifications;
    totals.dropped_bars += c.dropped_bars;
    totals.dropped_bar_ticks += c.dropped_bar_ticks;
  }
  return totals;
}

const QoiDegrader* BrokerNetwork::degrader(const std::string& subscriber_id) const {
  const auto it = subscribers_.find(subscriber_id);
  return it == subscribers_.end() ? nullptr : &it->second.degrader;
}

}  // namespace tp
