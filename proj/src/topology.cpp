#include "tp/topology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace tp {

namespace {

struct DisjointSet {
  std::map<BrokerId, BrokerId> parent;

  const BrokerId& find(const BrokerId& x) {
    auto& p = parent[x];
    if (p.empty() || p == x) {
      p = x;
      return p;
    }
    const BrokerId root = find(p);
    p = root;
    return parent[x];
  }

  bool unite(const BrokerId& a, const BrokerId& b) {
    const BrokerId ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    return true;
  }
};

}  // namespace

bool BrokerTopology::connected() const {
  if (brokers.empty()) return false;
  DisjointSet ds;
  for (const auto& link : links) ds.unite(link.a, link.b);
  const BrokerId first = *brokers.begin();
  const BrokerId root = ds.find(first);
  return std::all_of(brokers.begin(), brokers.end(),
                     [&](const BrokerId& b) { return ds.find(b) == root; });
}

SpanningTree SpanningTree::build(const BrokerTopology& topology) {
  if (topology.brokers.empty())
    throw TopologyError(TopologyError::Code::DisconnectedTopology, "no brokers");
  for (const auto& link : topology.links) {
    if (link.a == link.b)
      throw TopologyError(TopologyError::Code::BadLink, "self-link at " + link.a);
    if (link.latency_us <= 0)
      throw TopologyError(TopologyError::Code::BadLink,
                          "non-positive latency on " + link.a + "-" + link.b);
    if (!topology.brokers.count(link.a) || !topology.brokers.count(link.b))
      throw TopologyError(TopologyError::Code::UnknownBroker,
                          "link references unknown broker");
  }

  auto links = topology.links;
  std::sort(links.begin(), links.end(), [](const BrokerLink& x, const BrokerLink& y) {
    if (x.latency_us != y.latency_us) return x.latency_us < y.latency_us;
    const auto kx = edge_key(x.a, x.b), ky = edge_key(y.a, y.b);
    return kx < ky;
  });

  DisjointSet ds;
  std::map<BrokerId, std::vector<std::pair<BrokerId, DurationUs>>> adjacency;
  SpanningTree tree;
  std::size_t used = 0;
  for (const auto& link : links) {
    if (!ds.unite(link.a, link.b)) continue;
    adjacency[link.a].emplace_back(link.b, link.latency_us);
    adjacency[link.b].emplace_back(link.a, link.latency_us);
    tree.edge_latency_[edge_key(link.a, link.b)] = link.latency_us;
    tree.total_weight_ += link.latency_us;
    ++used;
  }
  if (used + 1 != topology.brokers.size())
    throw TopologyError(TopologyError::Code::DisconnectedTopology,
                        "topology is not connected");

  tree.root_ = *topology.brokers.begin();
  tree.parent_[tree.root_] = tree.root_;
  tree.depth_[tree.root_] = 0;
  std::vector<BrokerId> frontier{tree.root_};
  while (!frontier.empty()) {
    const BrokerId current = frontier.back();
    frontier.pop_back();
    for (const auto& [next, latency] : adjacency[current]) {
      (void)latency;
      if (tree.parent_.count(next)) continue;
      tree.parent_[next] = current;
      tree.depth_[next] = tree.depth_[current] + 1;
      frontier.push_back(next);
    }
  }
  return tree;
}

std::vector<BrokerId> SpanningTree::path(const BrokerId& from,
                                         const BrokerId& to) const {
  BrokerId x = from, y = to;
  std::vector<BrokerId> up, down;
  int dx = depth_.at(x), dy = depth_.at(y);
  while (dx > dy) {
    up.push_back(x);
    x = parent_.at(x);
    --dx;
  }
  while (dy > dx) {
    down.push_back(y);
    y = parent_.at(y);
    --dy;
  }
  while (x != y) {
    up.push_back(x);
    down.push_back(y);
    x = parent_.at(x);
    y = parent_.at(y);
  }
  up.push_back(x);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

DurationUs SpanningTree::path_latency(const BrokerId& from,
                                      const BrokerId& to) const {
  DurationUs total = 0;
  const auto nodes = path(from, to);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    total += edge_latency_.at(edge_key(nodes[i - 1], nodes[i]));
  return total;
}

std::vector<SpanningTree::Edge> SpanningTree::path_edges(
    const BrokerId& from, const BrokerId& to) const {
  std::vector<Edge> edges;
  const auto nodes = path(from, to);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    edges.push_back(edge_key(nodes[i - 1], nodes[i]));
  return edges;
}

BrokerTopology parse_topology(std::istream& in) {
  BrokerTopology topo;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string verb;
    ss >> verb;
    const auto fail = [&](const std::string& why) {
      throw TopologyError(TopologyError::Code::ParseError,
                          "topology line " + std::to_string(line_no) + ": " + why);
    };
    if (verb == "broker") {
      std::string id;
      if (!(ss >> id)) fail("broker needs an id");
      topo.brokers.insert(id);
    } else if (verb == "link") {
      BrokerLink link;
      if (!(ss >> link.a >> link.b >> link.latency_us)) fail("link needs a b latency_us");
      topo.links.push_back(link);
    } else if (verb == "subscriber") {
      std::string sub, broker;
      if (!(ss >> sub >> broker)) fail("subscriber needs id broker");
      topo.subscriber_attach[sub] = broker;
    } else if (verb == "publisher") {
      std::string feed, broker;
      if (!(ss >> feed >> broker)) fail("publisher needs feed broker");
      topo.publisher_attach[feed] = broker;
    } else {
      fail("unknown verb " + verb);
    }
  }
  for (const auto& [sub, broker] : topo.subscriber_attach)
    if (!topo.brokers.count(broker))
      throw TopologyError(TopologyError::Code::UnknownBroker,
                          "subscriber " + sub + " attached to unknown broker");
  for (const auto& [feed, broker] : topo.publisher_attach)
    if (!topo.brokers.count(broker))
      throw TopologyError(TopologyError::Code::UnknownBroker,
                          "publisher " + feed + " attached to unknown broker");
  return topo;
}

BrokerTopology parse_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  return parse_topology(in);
}

}  // namespace tp
