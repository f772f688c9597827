#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tp/time.hpp"

namespace tp {

using BrokerId = std::string;

struct BrokerLink {
  BrokerId a;
  BrokerId b;
  DurationUs latency_us{0};  // > 0
};

struct BrokerTopology {
  std::set<BrokerId> brokers;
  std::vector<BrokerLink> links;                 // undirected, no self-links
  std::map<std::string, BrokerId> subscriber_attach;
  std::map<std::string, BrokerId> publisher_attach;  // feed_id -> broker

  bool connected() const;
};

struct TopologyError : std::runtime_error {
  enum class Code { DisconnectedTopology, BadLink, UnknownBroker, ParseError };
  Code code;
  TopologyError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

// Minimum-total-latency spanning tree, rooted at the lexicographically
// smallest broker. Ties broken by lexicographic endpoint order so the
// tree is a pure function of the topology.
class SpanningTree {
 public:
  static SpanningTree build(const BrokerTopology& topology);

  const BrokerId& root() const { return root_; }
  const std::map<BrokerId, BrokerId>& parents() const { return parent_; }
  DurationUs total_weight() const { return total_weight_; }

  // Tree path between two brokers as a broker sequence (inclusive).
  std::vector<BrokerId> path(const BrokerId& from, const BrokerId& to) const;
  DurationUs path_latency(const BrokerId& from, const BrokerId& to) const;

  // Undirected tree edge as an ordered pair, for traffic accounting.
  using Edge = std::pair<BrokerId, BrokerId>;
  static Edge edge_key(const BrokerId& x, const BrokerId& y) {
    return x < y ? Edge{x, y} : Edge{y, x};
  }
  std::vector<Edge> path_edges(const BrokerId& from, const BrokerId& to) const;
  std::size_t edge_count() const { return parent_.size() - 1; }

  DurationUs edge_latency(const Edge& e) const { return edge_latency_.at(e); }

 private:
  BrokerId root_;
  std::map<BrokerId, BrokerId> parent_;  // root maps to itself
  std::map<BrokerId, int> depth_;
  std::map<Edge, DurationUs> edge_latency_;
  DurationUs total_weight_{0};
};

// Topology file, line oriented:
//   broker <id>
//   link <a> <b> <latency_us>
//   subscriber <subscriber_id> <broker>
//   publisher <feed_id> <broker>
BrokerTopology parse_topology(std::istream& in);
BrokerTopology parse_topology_file(const std::string& path);

}  // namespace tp
