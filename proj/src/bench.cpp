#include "skyserver/bench.hpp"

#include <chrono>
#include <limits>

#include "json.hpp"
#include "skyserver/geometry.hpp"
#include "skyserver/neighbors.hpp"
#include "skyserver/queries.hpp"

namespace sky {

namespace {

template <class F>
BenchRow measure(std::string name, int repeats, F&& f) {
  BenchRow row;
  row.workload = std::move(name);
  row.wall_ms = std::numeric_limits<double>::infinity();
  for (int k = 0; k < std::max(1, repeats); ++k) {
    ScanStats st;
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t n = f(st);
    const auto t1 = std::chrono::steady_clock::now();
    row.wall_ms = std::min(row.wall_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
    row.rows_scanned = st.rows_scanned;
    row.index_used = st.index_used;
    row.rows_returned = n;
  }
  row.records_per_s = row.wall_ms > 0 ? static_cast<double>(row.rows_scanned) / (row.wall_ms / 1000.0) : 0.0;
  return row;
}

}  // namespace

const BenchRow* BenchReport::find(const std::string& workload) const {
  for (const auto& r : rows) {
    if (r.workload == workload) return &r;
  }
  return nullptr;
}

std::string BenchReport::to_json() const {
  nlohmann::json j;
  j["catalog_rows"] = catalog_rows;
  j["threads"] = threads;
  j["workloads"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["workloads"].push_back({{"workload", r.workload},
                              {"wall_ms", r.wall_ms},
                              {"rows_scanned", r.rows_scanned},
                              {"rows_returned", r.rows_returned},
                              {"index_used", r.index_used},
                              {"records_per_s", r.records_per_s}});
  }
  return j.dump(2);
}

BenchReport run_bench(const Catalog& cat, const BenchOptions& opt) {
  BenchReport rep;
  rep.catalog_rows = cat.photo->size();
  rep.threads = opt.threads;
  const PhotoTable& photo = *cat.photo;
  const UnitVector center = eq_to_xyz(opt.cone_ra, opt.cone_dec);
  const double cos_r = std::cos(arcmin_to_rad(opt.cone_radius_arcmin));

  rep.rows.push_back(measure("full-scan", opt.repeats, [&](ScanStats& st) {
    return photo.scan(PhotoView::PhotoObj, [](const PhotoObj&) { return true; }, &st, opt.threads).size();
  }));
  rep.rows.push_back(measure("cone-index", opt.repeats, [&](ScanStats& st) {
    return get_nearby(photo, center, opt.cone_radius_arcmin, &st).size();
  }));
  rep.rows.push_back(measure("cone-scan", opt.repeats, [&](ScanStats& st) {
    const auto hits = photo.scan(
        PhotoView::PhotoObj,
        [&](const PhotoObj& o) { return o.cx * center.x() + o.cy * center.y() + o.cz * center.z() >= cos_r; }, &st,
        opt.threads);
    return hits.size();
  }));
  if (opt.queries) {
    for (const auto& q : query_list()) {
      if (q.needs_neighbors && !cat.neighbors) continue;
      rep.rows.push_back(measure(q.id, opt.repeats, [&](ScanStats& st) {
        return run_query(cat, q.id, {}, &st, opt.threads).rowCount();
      }));
    }
  }
  return rep;
}

}  // namespace sky
