#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "tp/notification.hpp"
#include "tp/qoi.hpp"
#include "tp/symbology.hpp"

namespace tp {

enum class DeliveryPolicy : std::uint8_t { Lossless, ConflateLatest };

const char* policy_name(DeliveryPolicy p);

// Content filter. ISIN atoms are expanded to their listings against the
// reference store when the subscription is admitted; the broker network
// routes on symbol and feed atoms only.
struct SubscriptionFilter {
  std::set<SymbolRef> symbols;
  std::set<Isin> isins;
  std::set<std::string> feeds;

  bool empty() const { return symbols.empty() && isins.empty() && feeds.empty(); }
};

struct Subscription {
  std::string subscriber_id;
  SubscriptionFilter filter;
  QoISpec qoi;
  DeliveryPolicy policy{DeliveryPolicy::Lossless};
};

// Filter after ISIN expansion; what routing actually uses.
struct ResolvedFilter {
  std::set<SymbolRef> symbols;
  std::set<std::string> feeds;

  bool matches(const Notification& n) const {
    return feeds.count(n.feed_id) > 0 || symbols.count(n.symbol) > 0;
  }
};

ResolvedFilter resolve_filter(const SubscriptionFilter& filter,
                              const SymbologyStore& store);

// Subscription file, one per line:
//   subscriber|atoms|qoi|policy
// atoms: ';'-separated `sym:LOCAL@MIC`, `isin:XX…`, `feed:FEED_ID`
// qoi: see format_qoi; policy: lossless | conflate
std::vector<Subscription> parse_subscriptions(std::istream& in);
std::vector<Subscription> parse_subscriptions_file(const std::string& path);
std::string format_subscription(const Subscription& s);

}  // namespace tp
