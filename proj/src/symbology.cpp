#include "tp/symbology.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace tp {

void SymbologyStore::register_instrument(const InstrumentRecord& record) {
  if (!validate_isin(record.isin.code))
    throw SymbologyError(SymbologyError::Code::InvalidIsin,
                         "invalid ISIN: " + record.isin.code);
  if (record.listings.empty())
    throw SymbologyError(SymbologyError::Code::EmptyListings,
                         "no listings for " + record.isin.code);
  {
    std::set<std::string> vendors;
    for (const auto& [vendor, alias] : record.vendor_aliases) {
      if (!vendors.insert(vendor).second)
        throw SymbologyError(SymbologyError::Code::DuplicateAlias,
                             "duplicate vendor alias for " + vendor);
    }
  }
  for (const auto& listing : record.listings) {
    const auto it = by_symbol_.find(listing);
    if (it != by_symbol_.end() && it->second != record.isin)
      throw SymbologyError(SymbologyError::Code::ConflictingListing,
                           to_string(listing) + " already owned by " +
                               it->second.code);
  }
  auto [slot, inserted] = by_isin_.try_emplace(record.isin, record);
  if (!inserted) {
    slot->second.listings.insert(record.listings.begin(), record.listings.end());
    slot->second.vendor_aliases.insert(record.vendor_aliases.begin(),
                                       record.vendor_aliases.end());
    slot->second.display_name = record.display_name;
  }
  for (const auto& listing : record.listings) by_symbol_[listing] = record.isin;
}

void SymbologyStore::unregister_instrument(const Isin& isin) {
  const auto it = by_isin_.find(isin);
  if (it == by_isin_.end()) return;
  for (const auto& listing : it->second.listings) by_symbol_.erase(listing);
  by_isin_.erase(it);
}

std::optional<Isin> SymbologyStore::resolve(const SymbolRef& symbol) const {
  const auto it = by_symbol_.find(symbol);
  if (it == by_symbol_.end()) return std::nullopt;
  return it->second;
}

std::set<SymbolRef> SymbologyStore::listings_of(const Isin& isin) const {
  const auto it = by_isin_.find(isin);
  if (it == by_isin_.end()) return {};
  return it->second.listings;
}

const InstrumentRecord* SymbologyStore::find(const Isin& isin) const {
  const auto it = by_isin_.find(isin);
  return it == by_isin_.end() ? nullptr : &it->second;
}

std::size_t SymbologyStore::audit() const {
  std::map<SymbolRef, Isin> rebuilt;
  std::size_t bad = 0;
  for (const auto& [isin, record] : by_isin_) {
    for (const auto& listing : record.listings) {
      if (!rebuilt.emplace(listing, isin).second) ++bad;
    }
  }
  if (rebuilt != by_symbol_) {
    for (const auto& [sym, isin] : rebuilt) {
      const auto it = by_symbol_.find(sym);
      if (it == by_symbol_.end() || it->second != isin) ++bad;
    }
    for (const auto& [sym, isin] : by_symbol_) {
      if (!rebuilt.count(sym)) ++bad;
    }
  }
  return bad;
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

}  // namespace

RefDataLoadReport load_refdata(SymbologyStore& store, std::istream& in) {
  RefDataLoadReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '|');
    if (cols.size() < 3 || cols.size() > 4) {
      report.rejected.emplace_back(line_no, "expected 3 or 4 columns");
      continue;
    }
    InstrumentRecord record;
    if (!validate_isin(cols[0])) {
      report.rejected.emplace_back(line_no, "invalid ISIN");
      continue;
    }
    record.isin = Isin{cols[0]};
    record.display_name = cols[1];
    bool ok = true;
    for (const auto& part : split(cols[2], ',')) {
      const auto colon = part.find(':');
      if (colon == std::string::npos) {
        report.rejected.emplace_back(line_no, "bad listing: " + part);
        ok = false;
        break;
      }
      try {
        record.listings.insert(
            SymbolRef::of(part.substr(colon + 1), part.substr(0, colon)));
      } catch (const std::invalid_argument& e) {
        report.rejected.emplace_back(line_no, e.what());
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (cols.size() == 4 && !cols[3].empty()) {
      for (const auto& part : split(cols[3], ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) {
          report.rejected.emplace_back(line_no, "bad alias: " + part);
          ok = false;
          break;
        }
        record.vendor_aliases.emplace(part.substr(0, eq), part.substr(eq + 1));
      }
    }
    if (!ok) continue;
    try {
      store.register_instrument(record);
      ++report.accepted;
    } catch (const SymbologyError& e) {
      report.rejected.emplace_back(line_no, e.what());
    }
  }
  return report;
}

RefDataLoadReport load_refdata_file(SymbologyStore& store, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open refdata file: " + path);
  return load_refdata(store, in);
}

}  // namespace tp
