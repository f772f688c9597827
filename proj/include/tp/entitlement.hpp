#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tp/qoi.hpp"
#include "tp/subscription.hpp"
#include "tp/time.hpp"

namespace tp {

// License-derived permission: who may consume which feed or exchange, at
// which most-permissive QoI, during which validity window.
struct Entitlement {
  std::string subscriber_id;
  enum class Scope : std::uint8_t { Feed, Exchange };
  Scope scope{Scope::Feed};
  std::string feed_id;  // Scope::Feed
  Mic mic;              // Scope::Exchange
  QoISpec max_qoi;
  VirtualTime valid_from{};
  VirtualTime valid_to{};  // exclusive; > valid_from
};

struct EntitlementDecision {
  bool permitted{false};
  std::string reason;  // first violated dimension, or "scope"

  static EntitlementDecision permit() { return {true, {}}; }
  static EntitlementDecision deny(std::string r) { return {false, std::move(r)}; }
};

// Entitlement store plus the feed directory (feed -> exchange) needed to
// judge symbol atoms against feed-scoped grants.
class EntitlementStore {
 public:
  void add(const Entitlement& e);
  void map_feed(const std::string& feed_id, const Mic& mic);

  // Permit iff every filter atom is covered by some entitlement that is
  // valid at `now` and whose max_qoi dominates the requested QoI in all
  // three dimensions. Deny reports the first violated dimension of the
  // first covering candidate (or "scope" when nothing covers an atom).
  EntitlementDecision check(const Subscription& sub, VirtualTime now) const;

  const std::vector<Entitlement>& entitlements() const { return entitlements_; }
  std::optional<Mic> feed_exchange(const std::string& feed_id) const;

 private:
  std::vector<Entitlement> entitlements_;
  std::map<std::string, Mic> feed_directory_;
};

// Per-subscriber consumption counters keyed by (feed, UTC trading day),
// with the per-day distinct-symbol sets behind the usage report.
class MeterLedger {
 public:
  void record(const std::string& subscriber_id, const std::string& feed_id,
              std::int64_t day, const SymbolRef& symbol);

  std::uint64_t total_deliveries() const { return total_; }
  std::uint64_t count(const std::string& subscriber_id,
                      const std::string& feed_id, std::int64_t day) const;

  // No more deliveries may be recorded at or before `day` after closing.
  void close_through(std::int64_t day);
  std::int64_t closed_through() const { return closed_through_; }

  // Deterministic report: header, one row per (subscriber, feed, day),
  // then a per-feed totals row. Throws if the period is still open.
  std::string usage_report(std::int64_t day_from, std::int64_t day_to) const;

 private:
  struct Key {
    std::string subscriber_id;
    std::string feed_id;
    std::int64_t day;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::uint64_t> counts_;
  std::map<Key, std::set<SymbolRef>> symbols_;
  std::uint64_t total_{0};
  std::int64_t closed_through_{-1};
};

struct LedgerError : std::runtime_error {
  enum class Code { PeriodStillOpen, PeriodClosed };
  Code code;
  LedgerError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

// Entitlement file, one per line:
//   subscriber|feed:<id>|qoi|valid_from_us|valid_to_us
//   subscriber|mic:<MIC>|qoi|valid_from_us|valid_to_us
// A line `feedmap|<feed>|<MIC>` populates the feed directory.
void load_entitlements(EntitlementStore& store, std::istream& in);
void load_entitlements_file(EntitlementStore& store, const std::string& path);

}  // namespace tp
