#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "tp/entitlement.hpp"
#include "tp/qoi_pipeline.hpp"
#include "tp/subscription.hpp"
#include "tp/symbology.hpp"
#include "tp/topology.hpp"

namespace tp {

struct BrokerError : std::runtime_error {
  enum class Code {
    NotEntitled,
    UnknownBrokerAttachment,
    UnattachedPublisher,
    ConflictingSubscription,
  };
  Code code;
  BrokerError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

// A delivered element for one subscriber. deliver_ts (= item.release_ts)
// includes transport, per-broker processing and any QoI-induced delay.
struct Delivery {
  std::string subscriber_id;
  VirtualTime edge_arrival_ts{};
  DegradedItem item;
};

std::string format_delivery(const Delivery& d);  // sub|feed|ch|seq|pub|deliver

// Content-based publish/subscribe over the latency-minimal spanning tree
// of the broker graph. Subscriptions install per-atom routing state along
// the tree; a publish forwards only toward brokers with matching
// subscribers and applies each subscriber's QoI degrader at its edge.
class BrokerNetwork {
 public:
  BrokerNetwork(const BrokerTopology& topology, const SymbologyStore& symbology,
                const EntitlementStore& entitlements,
                DurationUs per_broker_cost_us, VirtualTime admission_time,
                bool check_exactly_once = true);

  // Entitlement-checked; idempotent for identical re-subscription.
  void subscribe(const Subscription& sub);

  // Rejected subscriptions (NotEntitled) are remembered so the simulation
  // can assert they never receive traffic.
  const std::vector<std::pair<Subscription, std::string>>& denied() const {
    return denied_;
  }

  std::vector<Delivery> publish(const Notification& n);
  std::vector<Delivery> publish_from(const BrokerId& broker, const Notification& n);
  std::vector<Delivery> finish();

  // Traffic accounting per the spanning tree vs. flooding every tree link.
  std::uint64_t tree_link_traversals() const { return tree_traversals_; }
  std::uint64_t flood_link_traversals() const { return flood_traversals_; }

  std::uint64_t duplicate_deliveries() const { return duplicate_deliveries_; }

  const SpanningTree& tree() const { return tree_; }
  const std::map<std::string, Subscription>& subscriptions() const {
    return subscriptions_;
  }

  std::size_t qoi_high_watermark() const;
  DegraderCounters degrader_totals() const;
  const QoiDegrader* degrader(const std::string& subscriber_id) const;

  // Routing table of one broker: atom -> next hops / local subscribers.
  struct RouteEntry {
    std::set<BrokerId> next_hops;
    std::set<std::string> local_subscribers;
  };
  const RouteEntry* route(const BrokerId& broker, const std::string& atom) const;

 private:
  struct PathInfo {
    DurationUs transport_us{0};
    std::vector<std::uint32_t> edge_ids;
  };

  struct SubscriberState {
    Subscription subscription;
    ResolvedFilter filter;
    BrokerId broker;
    QoiDegrader degrader;
    std::map<BrokerId, PathInfo> paths;  // keyed by publishing broker
  };

  static std::string symbol_atom(const SymbolRef& s) { return "sym:" + to_string(s); }
  static std::string feed_atom(const std::string& f) { return "feed:" + f; }

  void install_atom(const std::string& atom, const std::string& subscriber_id);
  std::vector<Delivery> route_to_matches(const BrokerId& origin,
                                         const Notification& n);
  const PathInfo& path_info(SubscriberState& state, const BrokerId& origin);

  const BrokerTopology& topology_;
  const SymbologyStore& symbology_;
  const EntitlementStore& entitlements_;
  SpanningTree tree_;
  DurationUs per_broker_cost_us_;
  VirtualTime admission_time_;
  bool check_exactly_once_;

  std::map<std::string, Subscription> subscriptions_;
  std::map<std::string, SubscriberState> subscribers_;
  std::map<std::string, std::set<std::string>> atom_subscribers_;
  std::map<BrokerId, std::map<std::string, RouteEntry>> routes_;
  std::vector<std::pair<Subscription, std::string>> denied_;

  std::uint64_t tree_traversals_{0};
  std::uint64_t flood_traversals_{0};
  std::uint64_t duplicate_deliveries_{0};
  std::unordered_set<std::string> seen_;  // exactly-once probe

  // Hot-path scratch: numbered tree edges and a generation-stamped mark
  // array for per-publish distinct-edge counting, plus reusable atom key
  // buffers. Keeps publish() allocation-free once warm.
  std::map<SpanningTree::Edge, std::uint32_t> edge_ids_;
  std::vector<std::uint64_t> edge_mark_;
  std::uint64_t mark_generation_{0};
  std::string symbol_key_, feed_key_;
};

}  // namespace tp
