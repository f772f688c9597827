#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tp/identifiers.hpp"

namespace tp {

struct InstrumentRecord {
  Isin isin;
  std::set<SymbolRef> listings;  // non-empty
  std::set<std::pair<std::string, std::string>> vendor_aliases;  // (vendor, alias)
  std::string display_name;

  bool operator==(const InstrumentRecord&) const = default;
};

struct SymbologyError : std::runtime_error {
  enum class Code { InvalidIsin, ConflictingListing, EmptyListings, DuplicateAlias };
  Code code;
  SymbologyError(Code c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

// Reference-data store. Two indices kept in lockstep: ISIN -> record and
// listing -> owning ISIN. Registrations are serialized by the caller;
// reads see immutable state between registrations.
class SymbologyStore {
 public:
  // Merges listings/aliases into an existing record of the same ISIN.
  // Throws SymbologyError on invalid ISIN or a listing owned elsewhere.
  void register_instrument(const InstrumentRecord& record);

  // Removes the record and all its listings. No-op for unknown ISIN.
  void unregister_instrument(const Isin& isin);

  // nullopt signals UnknownSymbol; callers quarantine the notification.
  std::optional<Isin> resolve(const SymbolRef& symbol) const;

  std::set<SymbolRef> listings_of(const Isin& isin) const;
  const InstrumentRecord* find(const Isin& isin) const;

  std::size_t size() const { return by_isin_.size(); }

  // Recomputes the inverse index from scratch; returns the number of
  // discrepancies (0 for a healthy store).
  std::size_t audit() const;

 private:
  std::map<Isin, InstrumentRecord> by_isin_;
  std::map<SymbolRef, Isin> by_symbol_;
};

// Bulk load: `ISIN|display_name|mic1:sym1,mic2:sym2|vendor1=alias1,...`
// (vendor alias column optional). Lines starting with '#' and blank lines
// are skipped. Rejected lines are reported with their 1-based number.
struct RefDataLoadReport {
  std::size_t accepted{0};
  std::vector<std::pair<std::size_t, std::string>> rejected;  // (line, reason)
};

RefDataLoadReport load_refdata(SymbologyStore& store, std::istream& in);
RefDataLoadReport load_refdata_file(SymbologyStore& store, const std::string& path);

}  // namespace tp
