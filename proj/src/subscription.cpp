#include "tp/subscription.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace tp {

const char* policy_name(DeliveryPolicy p) {
  return p == DeliveryPolicy::Lossless ? "lossless" : "conflate";
}

ResolvedFilter resolve_filter(const SubscriptionFilter& filter,
                              const SymbologyStore& store) {
  ResolvedFilter resolved;
  resolved.symbols = filter.symbols;
  resolved.feeds = filter.feeds;
  for (const auto& isin : filter.isins) {
    const auto listings = store.listings_of(isin);
    resolved.symbols.insert(listings.begin(), listings.end());
  }
  return resolved;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

SubscriptionFilter parse_atoms(const std::string& text) {
  SubscriptionFilter filter;
  for (const auto& atom : split(text, ';')) {
    if (atom.empty()) continue;
    if (atom.rfind("sym:", 0) == 0) {
      const auto at = atom.find('@', 4);
      if (at == std::string::npos)
        throw std::invalid_argument("bad symbol atom: " + atom);
      filter.symbols.insert(
          SymbolRef::of(atom.substr(4, at - 4), atom.substr(at + 1)));
    } else if (atom.rfind("isin:", 0) == 0) {
      filter.isins.insert(Isin::of(atom.substr(5)));
    } else if (atom.rfind("feed:", 0) == 0) {
      if (atom.size() == 5) throw std::invalid_argument("empty feed atom");
      filter.feeds.insert(atom.substr(5));
    } else {
      throw std::invalid_argument("unknown filter atom: " + atom);
    }
  }
  if (filter.empty()) throw std::invalid_argument("empty filter");
  return filter;
}

}  // namespace

std::vector<Subscription> parse_subscriptions(std::istream& in) {
  std::vector<Subscription> subs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '|');
    // qoi itself contains two '|' separators, so expect 6 columns total
    if (cols.size() != 6)
      throw std::invalid_argument("subscriptions line " + std::to_string(line_no) +
                                  ": expected subscriber|atoms|qoi|policy");
    Subscription sub;
    sub.subscriber_id = cols[0];
    if (sub.subscriber_id.empty())
      throw std::invalid_argument("subscriptions line " + std::to_string(line_no) +
                                  ": empty subscriber");
    try {
      sub.filter = parse_atoms(cols[1]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("subscriptions line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
    const auto qoi = parse_qoi(cols[2] + "|" + cols[3] + "|" + cols[4]);
    if (!qoi)
      throw std::invalid_argument("subscriptions line " + std::to_string(line_no) +
                                  ": bad qoi");
    sub.qoi = *qoi;
    if (cols[5] == "lossless") {
      sub.policy = DeliveryPolicy::Lossless;
    } else if (cols[5] == "conflate") {
      sub.policy = DeliveryPolicy::ConflateLatest;
    } else {
      throw std::invalid_argument("subscriptions line " + std::to_string(line_no) +
                                  ": bad policy " + cols[5]);
    }
    subs.push_back(std::move(sub));
  }
  return subs;
}

std::vector<Subscription> parse_subscriptions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open subscriptions file: " + path);
  return parse_subscriptions(in);
}

std::string format_subscription(const Subscription& s) {
  std::string atoms;
  for (const auto& sym : s.filter.symbols) {
    if (!atoms.empty()) atoms += ';';
    atoms += "sym:" + to_string(sym);
  }
  for (const auto& isin : s.filter.isins) {
    if (!atoms.empty()) atoms += ';';
    atoms += "isin:" + isin.code;
  }
  for (const auto& feed : s.filter.feeds) {
    if (!atoms.empty()) atoms += ';';
    atoms += "feed:" + feed;
  }
  return s.subscriber_id + "|" + atoms + "|" + format_qoi(s.qoi) + "|" +
         policy_name(s.policy);
}

}  // namespace tp
