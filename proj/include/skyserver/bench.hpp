#pragma once

// Timed workloads over a loaded catalog: a full scan, a cone search through
// the HTM index, the same cone as a linear scan, and optionally every query.

#include <cstdint>
#include <string>
#include <vector>

#include "skyserver/catalog.hpp"

namespace sky {

struct BenchOptions {
  double cone_ra = 185.0, cone_dec = -0.5, cone_radius_arcmin = 1.0;
  int repeats = 3;  // wall time is the fastest repeat
  bool queries = false;
  unsigned threads = 1;
};

struct BenchRow {
  std::string workload;
  double wall_ms = 0;
  std::uint64_t rows_scanned = 0;
  std::uint64_t rows_returned = 0;
  bool index_used = false;
  double records_per_s = 0;  // rows_scanned / wall time
};

struct BenchReport {
  std::uint64_t catalog_rows = 0;
  unsigned threads = 1;
  std::vector<BenchRow> rows;

  const BenchRow* find(const std::string& workload) const;
  std::string to_json() const;
};

/// Queries that need the neighbor table are skipped when it is absent.
BenchReport run_bench(const Catalog& cat, const BenchOptions& opt = {});

}  // namespace sky
