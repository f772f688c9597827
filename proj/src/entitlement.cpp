#include "tp/entitlement.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace tp {

void EntitlementStore::add(const Entitlement& e) {
  if (e.valid_from >= e.valid_to)
    throw std::invalid_argument("entitlement validity window empty");
  if (!e.max_qoi.valid())
    throw std::invalid_argument("entitlement max_qoi malformed");
  entitlements_.push_back(e);
}

void EntitlementStore::map_feed(const std::string& feed_id, const Mic& mic) {
  feed_directory_[feed_id] = mic;
}

std::optional<Mic> EntitlementStore::feed_exchange(const std::string& feed_id) const {
  const auto it = feed_directory_.find(feed_id);
  if (it == feed_directory_.end()) return std::nullopt;
  return it->second;
}

namespace {

// An atom is either a feed id or an exchange; symbol atoms are judged by
// their MIC, feed atoms by the feed id or the feed's exchange.
struct Atom {
  std::optional<std::string> feed_id;
  std::optional<Mic> mic;
};

bool covers(const Entitlement& e, const Atom& atom) {
  if (e.scope == Entitlement::Scope::Feed)
    return atom.feed_id && *atom.feed_id == e.feed_id;
  return atom.mic && *atom.mic == e.mic;
}

const char* first_violated_dimension(const QoISpec& requested,
                                     const QoISpec& allowed) {
  if (!timeliness_within(requested.timeliness, allowed.timeliness))
    return "timeliness";
  if (!granularity_within(requested.granularity, allowed.granularity))
    return "granularity";
  if (!completeness_within(requested.completeness, allowed.completeness))
    return "completeness";
  return nullptr;
}

}  // namespace

EntitlementDecision EntitlementStore::check(const Subscription& sub,
                                            VirtualTime now) const {
  std::vector<Atom> atoms;
  for (const auto& sym : sub.filter.symbols)
    atoms.push_back(Atom{std::nullopt, sym.mic});
  for (const auto& isin : sub.filter.isins) {
    (void)isin;  // ISIN atoms expand to listings before admission;
                 // coverage is judged on the expanded symbols.
  }
  for (const auto& feed : sub.filter.feeds) {
    Atom atom;
    atom.feed_id = feed;
    atom.mic = feed_exchange(feed);
    atoms.push_back(std::move(atom));
  }
  if (atoms.empty()) return EntitlementDecision::deny("scope");

  for (const auto& atom : atoms) {
    const Entitlement* first_covering = nullptr;
    bool permitted = false;
    for (const auto& e : entitlements_) {
      if (e.subscriber_id != sub.subscriber_id) continue;
      if (!(e.valid_from <= now && now < e.valid_to)) continue;
      if (!covers(e, atom)) continue;
      if (!first_covering) first_covering = &e;
      if (qoi_within(sub.qoi, e.max_qoi)) {
        permitted = true;
        break;
      }
    }
    if (permitted) continue;
    if (!first_covering) return EntitlementDecision::deny("scope");
    return EntitlementDecision::deny(
        first_violated_dimension(sub.qoi, first_covering->max_qoi));
  }
  return EntitlementDecision::permit();
}

void MeterLedger::record(const std::string& subscriber_id,
                         const std::string& feed_id, std::int64_t day,
                         const SymbolRef& symbol) {
  if (day <= closed_through_)
    throw LedgerError(LedgerError::Code::PeriodClosed,
                      "delivery recorded into a closed period");
  const Key key{subscriber_id, feed_id, day};
  ++counts_[key];
  symbols_[key].insert(symbol);
  ++total_;
}

std::uint64_t MeterLedger::count(const std::string& subscriber_id,
                                 const std::string& feed_id,
                                 std::int64_t day) const {
  const auto it = counts_.find(Key{subscriber_id, feed_id, day});
  return it == counts_.end() ? 0 : it->second;
}

void MeterLedger::close_through(std::int64_t day) {
  if (day > closed_through_) closed_through_ = day;
}

std::string MeterLedger::usage_report(std::int64_t day_from,
                                      std::int64_t day_to) const {
  if (day_to > closed_through_)
    throw LedgerError(LedgerError::Code::PeriodStillOpen,
                      "usage period still open");
  std::string out = "subscriber|feed|day|count|distinct_symbols\n";
  struct FeedTotal {
    std::uint64_t count{0};
    std::set<SymbolRef> symbols;
  };
  std::map<std::string, FeedTotal> totals;
  char buf[64];
  for (const auto& [key, count] : counts_) {
    if (key.day < day_from || key.day > day_to) continue;
    const auto& syms = symbols_.at(key);
    std::snprintf(buf, sizeof(buf), "|%lld|%llu|%zu\n",
                  static_cast<long long>(key.day),
                  static_cast<unsigned long long>(count), syms.size());
    out += key.subscriber_id + "|" + key.feed_id + buf;
    auto& total = totals[key.feed_id];
    total.count += count;
    total.symbols.insert(syms.begin(), syms.end());
  }
  for (const auto& [feed, total] : totals) {
    std::snprintf(buf, sizeof(buf), "|*|%llu|%zu\n",
                  static_cast<unsigned long long>(total.count),
                  total.symbols.size());
    out += "#total|" + feed + buf;
  }
  return out;
}

void load_entitlements(EntitlementStore& store, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("entitlements line " + std::to_string(line_no) +
                                ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    {
      std::string cur;
      for (char c : line) {
        if (c == '|') {
          cols.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      cols.push_back(cur);
    }
    if (cols.size() == 3 && cols[0] == "feedmap") {
      store.map_feed(cols[1], Mic::of(cols[2]));
      continue;
    }
    // subscriber|scope|qoi(3 cols)|from|to
    if (cols.size() != 7) fail("expected subscriber|scope|qoi|from|to");
    Entitlement e;
    e.subscriber_id = cols[0];
    if (e.subscriber_id.empty()) fail("empty subscriber");
    if (cols[1].rfind("feed:", 0) == 0) {
      e.scope = Entitlement::Scope::Feed;
      e.feed_id = cols[1].substr(5);
      if (e.feed_id.empty()) fail("empty feed scope");
    } else if (cols[1].rfind("mic:", 0) == 0) {
      e.scope = Entitlement::Scope::Exchange;
      e.mic = Mic::of(cols[1].substr(4));
    } else {
      fail("bad scope " + cols[1]);
    }
    const auto qoi = parse_qoi(cols[2] + "|" + cols[3] + "|" + cols[4]);
    if (!qoi) fail("bad qoi");
    e.max_qoi = *qoi;
    try {
      e.valid_from = VirtualTime{std::stoll(cols[5])};
      e.valid_to = VirtualTime{std::stoll(cols[6])};
    } catch (const std::exception&) {
      fail("bad validity timestamps");
    }
    store.add(e);
  }
}

void load_entitlements_file(EntitlementStore& store, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open entitlements file: " + path);
  load_entitlements(store, in);
}

}  // namespace tp
