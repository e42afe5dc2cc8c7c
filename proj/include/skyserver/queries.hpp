#pragma once

// The twenty benchmark queries (plus Q10A, Q15A and Q15B) as typed plans over
// the catalog: view scans, HTM range lookups, keyed joins and neighbor joins.

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skyserver/catalog.hpp"

namespace sky {

using Value = std::variant<std::int64_t, double, std::string>;

struct QueryResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  std::size_t rowCount() const { return rows.size(); }
};

/// Sorts rows lexicographically so results can be compared as multisets.
void canonical_sort(QueryResult& r);

using QueryParams = std::map<std::string, double, std::less<>>;

struct QueryInfo {
  std::string id;
  std::string summary;
  QueryParams defaults;
  bool needs_neighbors = false;
  bool ordered = false;  // row order is part of the result
};

/// Every query in display order: Q1..Q20 with Q10A after Q10 and Q15A, Q15B
/// in place of Q15.
std::span<const QueryInfo> query_list();
/// Case-insensitive. Throws UnknownQuery.
const QueryInfo& query_info(std::string_view id);

class UnknownQuery : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs one plan. Parameters not given take the query's defaults; a name
/// the query does not know throws std::invalid_argument. Queries that join
/// the neighbor table throw MissingTable when it has not been built.
QueryResult run_query(const Catalog& cat, std::string_view id, const QueryParams& params = {},
                      ScanStats* stats = nullptr, unsigned threads = 1);

}  // namespace sky
