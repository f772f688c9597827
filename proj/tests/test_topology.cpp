#include <doctest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "tp/rng.hpp"
#include "tp/topology.hpp"

using namespace tp;

namespace {

BrokerTopology triangle() {
  BrokerTopology topo;
  topo.brokers = {"a", "b", "c"};
  topo.links = {{"a", "b", 1000}, {"b", "c", 2000}, {"a", "c", 3000}};
  return topo;
}

}  // namespace

TEST_CASE("two brokers, one link") {
  BrokerTopology topo;
  topo.brokers = {"a", "b"};
  topo.links = {{"a", "b", 500}};
  const auto tree = SpanningTree::build(topo);
  CHECK(tree.total_weight() == 500);
  CHECK(tree.path_latency("a", "b") == 500);
  CHECK(tree.path("a", "b") == std::vector<BrokerId>{"a", "b"});
}

TEST_CASE("triangle picks the two cheapest links") {
  const auto tree = SpanningTree::build(triangle());
  CHECK(tree.total_weight() == 3000);  // links 1000 and 2000
  CHECK(tree.path("a", "c") == std::vector<BrokerId>{"a", "b", "c"});
  CHECK(tree.path_latency("a", "c") == 3000);
}

TEST_CASE("disconnected topology is rejected") {
  BrokerTopology topo;
  topo.brokers = {"a", "b", "c"};
  topo.links = {{"a", "b", 100}};
  CHECK_FALSE(topo.connected());
  CHECK_THROWS_AS(SpanningTree::build(topo), TopologyError);
}

TEST_CASE("bad links are rejected") {
  BrokerTopology topo;
  topo.brokers = {"a", "b"};
  SUBCASE("self link") {
    topo.links = {{"a", "a", 100}, {"a", "b", 100}};
    CHECK_THROWS_AS(SpanningTree::build(topo), TopologyError);
  }
  SUBCASE("non-positive latency") {
    topo.links = {{"a", "b", 0}};
    CHECK_THROWS_AS(SpanningTree::build(topo), TopologyError);
  }
}

TEST_CASE("tree weight equals exhaustive enumeration on random graphs") {
  Rng rng(808);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + rng.below(5);  // 4..8 brokers
    BrokerTopology topo;
    std::vector<BrokerId> ids;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("b" + std::to_string(i));
      topo.brokers.insert(ids.back());
    }
    // Random spanning path for connectivity, then a few extra edges
    // (duplicates skipped) to stay within exhaustive range.
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t j = rng.below(i);
      used.insert({std::min(i, j), std::max(i, j)});
      topo.links.push_back(
          {ids[j], ids[i], static_cast<DurationUs>(1 + rng.below(1000))});
    }
    const std::size_t extras = rng.below(5);
    for (std::size_t e = 0; e < extras; ++e) {
      const std::size_t i = rng.below(n), j = rng.below(n);
      if (i == j || used.count({std::min(i, j), std::max(i, j)})) continue;
      used.insert({std::min(i, j), std::max(i, j)});
      topo.links.push_back(
          {ids[i], ids[j], static_cast<DurationUs>(1 + rng.below(1000))});
    }
    const auto tree = SpanningTree::build(topo);
    CHECK(tree.total_weight() == oracle::mst_weight_exhaustive(topo));
  }
}

TEST_CASE("deterministic tie-break: equal latencies build the same tree") {
  BrokerTopology topo;
  topo.brokers = {"a", "b", "c", "d"};
  topo.links = {{"a", "b", 100}, {"b", "c", 100}, {"c", "d", 100},
                {"d", "a", 100}, {"a", "c", 100}};
  const auto t1 = SpanningTree::build(topo);
  const auto t2 = SpanningTree::build(topo);
  CHECK(t1.parents() == t2.parents());
  CHECK(t1.total_weight() == 300);
}

TEST_CASE("paths: endpoints on the same broker") {
  const auto tree = SpanningTree::build(triangle());
  CHECK(tree.path_latency("b", "b") == 0);
  CHECK(tree.path("b", "b") == std::vector<BrokerId>{"b"});
  CHECK(tree.path_edges("b", "b").empty());
}

TEST_CASE("topology file parsing") {
  std::istringstream in(
      "# desk topology\n"
      "broker fra1\n"
      "broker ams1\n"
      "broker lon1\n"
      "link fra1 ams1 350\n"
      "link ams1 lon1 480\n"
      "link fra1 lon1 900\n"
      "subscriber terminal_a lon1\n"
      "publisher FEED.XNAS fra1\n");
  const auto topo = parse_topology(in);
  CHECK(topo.brokers.size() == 3);
  CHECK(topo.links.size() == 3);
  CHECK(topo.subscriber_attach.at("terminal_a") == "lon1");
  CHECK(topo.publisher_attach.at("FEED.XNAS") == "fra1");
  const auto tree = SpanningTree::build(topo);
  CHECK(tree.total_weight() == 830);

  std::istringstream bad("subscriber ghost nowhere\n");
  CHECK_THROWS_AS(parse_topology(bad), TopologyError);
}
