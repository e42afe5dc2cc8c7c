// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "skyserver/area.hpp"
#include "skyserver/bench.hpp"
#include "skyserver/cover.hpp"
#include "skyserver/formulas.hpp"
#include "skyserver/loader.hpp"
#include "skyserver/neighbors.hpp"
#include "skyserver/queries.hpp"
#include "skyserver/synthetic.hpp"
#include "support/naive.hpp"
#include "support/oracle.hpp"
#include "support/random_points.hpp"

using namespace sky;
using testing::Sampler;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int n, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), s);
  std::fflush(stdout);
}

bool in_ranges(const std::vector<TrixelRange>& ranges, std::uint64_t id) {
  for (const auto& r : ranges) {
    if (r.contains(id)) return true;
  }
  return false;
}

int range_depth(const std::vector<TrixelRange>& ranges) { return ranges.empty() ? 0 : ranges.front().start.depth(); }

// Number of depth-d trixels strictly containing p, found by descending every
// child that contains it. Containment is monotone, so this is exhaustive.
int strict_holders(const UnitVector& p, int depth) {
  int count = 0;
  std::function<void(HtmId)> walk = [&](HtmId h) {
    if (!trixel_contains(vertices(h), p.vec(), 1e-12)) return;
    if (h.depth() == depth) {
      if (trixel_contains(vertices(h), p.vec(), -1e-12)) ++count;
      return;
    }
    for (int k = 0; k < 4; ++k) walk(h.child(k));
  };
  for (int f = 0; f < 8; ++f) walk(HtmId::face(f));
  return count;
}

Outcome partition_and_prefix() {
  Sampler s(101);
  std::uint64_t violations = 0, checked = 0;
  // Exhaustive over every trixel at depth <= 6: an interior point locates back.
  for (int d = 0; d <= 6; ++d) {
    const std::uint64_t lo = 8ull << (2 * d), hi = 16ull << (2 * d);
    for (std::uint64_t id = lo; id < hi; ++id) {
      const Trixel t = vertices(HtmId(id));
      const UnitVector c = UnitVector::normalize(t.v[0] + t.v[1] + t.v[2]);
      if (locate(c, d).id() != id || strict_holders(c, d) != 1) ++violations;
      ++checked;
    }
  }
  // Random points at every depth <= 6 and 1e5 at depth 20.
  for (int d = 0; d <= 6; ++d) {
    for (int k = 0; k < 2000; ++k) {
      const UnitVector p = s.sphere_point();
      const HtmId h = locate(p, d);
      if (!trixel_contains(vertices(h), p.vec(), 1e-12) || strict_holders(p, d) > 1) ++violations;
      ++checked;
    }
  }
  for (int k = 0; k < 100000; ++k) {
    const UnitVector p = s.sphere_point();
    const HtmId leaf = locate(p, 20);
    if (!trixel_contains(vertices(leaf), p.vec(), 1e-12) || strict_holders(p, 20) > 1) ++violations;
    std::uint64_t id = leaf.id();
    for (int d = 19; d >= 0; --d) {
      id >>= 2;
      if (locate(p, d).id() != id) ++violations;
    }
    ++checked;
  }
  std::ostringstream msg;
  msg << checked << " points, " << violations << " violations";
  return {violations == 0, msg.str()};
}

Outcome trixel_area() {
  Sampler s(102);
  const double arcsec2_per_sr = std::pow(180.0 * 3600.0 / std::numbers::pi, 2);
  const double analytic = 4 * std::numbers::pi / (8.0 * std::pow(4.0, 20)) * arcsec2_per_sr;
  double sum = 0;
  for (int k = 0; k < 1000; ++k) sum += trixel_solid_angle(vertices(s.trixel(20)));
  const double mean = sum / 1000 * arcsec2_per_sr;
  const double rel = std::abs(mean - analytic) / analytic;
  std::ostringstream msg;
  msg << "sampled mean " << mean << " arcsec^2, analytic " << analytic << ", rel. diff " << rel;
  return {rel < 0.05 && mean < 0.1, msg.str()};
}

Outcome cover_soundness() {
  Sampler s(103);
  std::uint64_t outside = 0;
  for (int k = 0; k < 1000; ++k) {
    const double r = 0.1 * std::pow(6000.0, s.uniform());
    const UnitVector c = s.sphere_point();
    const auto ranges = cover(make_circle(c, r));
    const int d = range_depth(ranges);
    for (int j = 0; j < 100; ++j) {
      if (!in_ranges(ranges, locate(s.cap_point(c, r), d).id())) ++outside;
    }
  }
  return {outside == 0, "1000 circles x 100 points, " + std::to_string(outside) + " outside"};
}

Outcome cover_tightness() {
  Sampler s(104);
  const double scale = trixel_scale_arcmin(12);
  double worst = 0;
  for (int k = 0; k < 40; ++k) {
    const double r = 10 * scale * std::pow(600.0 / (10 * scale), s.uniform());
    const UnitVector c = s.sphere_point();
    const auto ranges = cover(make_circle(c, r), 12);
    // Sample a cap that encloses every trixel touching the circle.
    const double big = r + 4 * scale;
    const int n = 20000;
    int hit = 0;
    for (int j = 0; j < n; ++j) hit += in_ranges(ranges, locate(s.cap_point(c, big), 12).id());
    const auto cap_sr = [](double arcmin) { return 2 * std::numbers::pi * (1 - std::cos(arcmin_to_rad(arcmin))); };
    const double ratio = (static_cast<double>(hit) / n) * cap_sr(big) / cap_sr(r);
    worst = std::max(worst, ratio);
  }
  std::ostringstream msg;
  msg << "40 circles at depth 12, worst covered/circle area " << worst;
  return {worst <= 4.0, msg.str()};
}

Outcome reference_cover_example() {
  const Area a = parse_area("Circle J2000 12 5.5 60.2 1");
  const auto ranges = cover(a);
  Sampler s(105);
  const auto& circle = std::get<Circle>(a.shape);
  int outside = 0;
  for (int k = 0; k < 10000; ++k) {
    outside += !in_ranges(ranges, locate(s.cap_point(circle.center, circle.radius_arcmin), 12).id());
  }
  const bool ok = ranges.size() >= 2 && ranges.size() <= 10 && range_depth(ranges) == 12 && outside == 0;
  return {ok, std::to_string(ranges.size()) + " ranges at depth " + std::to_string(range_depth(ranges)) + ", " +
                  std::to_string(outside) + " of 10000 samples outside"};
}

Outcome neighbors_oracle() {
  SyntheticSpec spec;
  spec.n_objects = 5000;
  spec.seed = 106;
  spec.clusters = 20;
  const Catalog cat = make_catalog(generate(spec));
  const NeighborTable nt = build_neighbors(*cat.photo);
  auto want = testing::all_pairs(cat.photo->rows(), kNeighborRadiusArcmin);
  std::map<std::pair<std::int64_t, std::int64_t>, double> got;
  for (const auto& n : nt.rows()) got[{n.objID, n.neighborObjID}] = n.distanceMins;
  double worst = 0;
  bool same = got.size() == want.size();
  for (const auto& p : want) {
    const auto it = got.find({p.a, p.b});
    if (it == got.end()) {
      same = false;
      continue;
    }
    worst = std::max(worst, std::abs(it->second - p.distance));
  }
  std::ostringstream msg;
  msg << got.size() << " pairs vs " << want.size() << " oracle pairs, max distance diff " << worst;
  return {same && worst <= 1e-9, msg.str()};
}

const Catalog& catalog_1e5() {
  static const Catalog cat = [] {
    SyntheticSpec spec;
    spec.n_objects = 100000;
    spec.seed = 1;
    Catalog c = make_catalog(generate(spec));
    c.neighbors = std::make_shared<const NeighborTable>(build_neighbors(*c.photo));
    return c;
  }();
  return cat;
}

Outcome nearby_probes() {
  const Catalog& cat = catalog_1e5();
  Sampler s(107);
  int mismatches = 0;
  std::size_t hits = 0;
  for (int k = 0; k < 100; ++k) {
    const PhotoObj& anchor = (*cat.photo)[s.below(cat.photo->size())];
    const auto e = xyz_to_eq(s.cap_point(eq_to_xyz(anchor.ra, anchor.dec), 2.0));
    const double r = 0.2 + 4.8 * s.uniform();
    const auto got = get_nearby_obj_eq(*cat.photo, e.ra_deg(), e.dec_deg(), r);
    const auto want = testing::linear_nearby(cat.photo->rows(), e.ra_deg(), e.dec_deg(), r);
    bool ok = got.size() == want.size();
    for (std::size_t j = 0; ok && j < got.size(); ++j) {
      ok = got[j].objID == want[j].objID && std::abs(got[j].distanceMins - want[j].distance) <= 1e-9;
    }
    const auto nearest = get_nearest_obj_eq(*cat.photo, e.ra_deg(), e.dec_deg(), r);
    ok = ok && nearest.has_value() == !want.empty() && (!nearest || nearest->objID == want.front().objID);
    mismatches += !ok;
    hits += got.size();
  }
  return {mismatches == 0, "100 probes, " + std::to_string(hits) + " rows, " + std::to_string(mismatches) +
                               " mismatches"};
}

Outcome query_suite() {
  const Catalog& cat = catalog_1e5();
  std::ostringstream msg;
  int bad = 0;
  for (const auto& q : query_list()) {
    const QueryResult plan = run_query(cat, q.id);
    const QueryResult naive = testing::run_naive(cat, q.id);
    std::string why;
    bool ok = testing::same_result(plan, naive, 1e-9, &why);
    if (ok && q.ordered) {
      for (std::size_t k = 0; k < plan.rowCount(); ++k) ok = ok && plan.rows[k][0] == naive.rows[k][0];
    }
    if (!ok) {
      ++bad;
      msg << q.id << " differs (" << why << "); ";
    }
    msg << q.id << "=" << plan.rowCount() << " ";
  }
  return {bad == 0, msg.str()};
}

template <class Row>
std::string csv_of(std::span<const Column<Row>> cols, std::span<const Row> rows) {
  std::string s = csv_header(cols, SeqColumn::Omit) + "\n";
  for (const auto& r : rows) s += csv_line(cols, r, SeqColumn::Omit) + "\n";
  return s;
}

Outcome loader_round_trip() {
  SyntheticSpec spec;
  spec.n_objects = 2000;
  spec.seed = 109;
  const SyntheticCatalog src = generate(spec);
  Store store;
  const auto load = [&](TableId t, const std::string& csv) {
    auto lock = store.lock();
    std::istringstream in(csv);
    return store.load_step(lock, t, in);
  };
  const auto undo = [&](std::uint64_t id) {
    auto lock = store.lock();
    return store.undo(lock, id);
  };
  const auto multiset = [&] {
    std::multiset<std::string> m;
    for (const auto& r : store.snapshot()->photo->rows()) m.insert(csv_line(photo_columns(), r, SeqColumn::Omit));
    return m;
  };
  load(TableId::Field, csv_of<Field>(field_columns(), src.fields));
  const std::span<const PhotoObj> all(src.photo);
  const std::size_t chunk = 40;

  // load -> undo restores the snapshot
  load(TableId::PhotoObj, csv_of(photo_columns(), all.first(chunk)));
  const auto before = multiset();
  const LoadEvent a = load(TableId::PhotoObj, csv_of(photo_columns(), all.subspan(chunk, chunk)));
  undo(a.eventID);
  const bool restored = multiset() == before;

  // interleaved A, B; undo(A) removes exactly A
  const LoadEvent ea = load(TableId::PhotoObj, csv_of(photo_columns(), all.subspan(2 * chunk, chunk)));
  const LoadEvent eb = load(TableId::PhotoObj, csv_of(photo_columns(), all.subspan(3 * chunk, chunk)));
  std::set<std::int64_t> pre;
  for (const auto& r : store.snapshot()->photo->rows()) pre.insert(r.objID);
  undo(ea.eventID);
  std::set<std::int64_t> post, a_ids;
  for (const auto& r : store.snapshot()->photo->rows()) post.insert(r.objID);
  for (const auto& r : all.subspan(2 * chunk, chunk)) a_ids.insert(r.objID);
  std::set<std::int64_t> removed;
  std::set_difference(pre.begin(), pre.end(), post.begin(), post.end(), std::inserter(removed, removed.end()));
  const bool interleaved = removed == a_ids && post.count(all[3 * chunk].objID) == 1;
  (void)eb;

  // 50 random steps; chunks from index 4 onward cycle between loaded and free
  Sampler s(110);
  std::vector<std::int64_t> chunk_event(all.size() / chunk, -1);
  chunk_event[0] = 0;  // loaded above, never undone here
  chunk_event[3] = 0;
  bool complete = true;
  for (int step = 0; step < 50; ++step) {
    std::vector<std::size_t> free_c, live_c;
    for (std::size_t c = 4; c < chunk_event.size(); ++c) (chunk_event[c] < 0 ? free_c : live_c).push_back(c);
    if (live_c.empty() || (!free_c.empty() && s.uniform() < 0.6)) {
      const std::size_t c = free_c[s.below(free_c.size())];
      chunk_event[c] = static_cast<std::int64_t>(load(TableId::PhotoObj, csv_of(photo_columns(), all.subspan(c * chunk, chunk))).eventID);
    } else {
      const std::size_t c = live_c[s.below(live_c.size())];
      complete = complete && undo(static_cast<std::uint64_t>(chunk_event[c])) == chunk;
      chunk_event[c] = -1;
    }
    std::uint64_t live = 0;
    std::uint64_t last_stop = 0;
    for (const auto& e : store.list_events({TableId::PhotoObj, std::nullopt})) {
      if (e.status != LoadStatus::UNDONE) live += e.insertedRows;
      complete = complete && e.seq_start > last_stop && e.seq_start <= e.seq_stop;
      last_stop = e.seq_stop;
    }
    complete = complete && live == store.snapshot()->photo->size();
  }
  std::ostringstream msg;
  msg << "undo restores: " << (restored ? "yes" : "no") << ", interleaved undo exact: " << (interleaved ? "yes" : "no")
      << ", journal complete over 50 steps: " << (complete ? "yes" : "no");
  return {restored && interleaved && complete, msg.str()};
}

Outcome index_performance() {
  SyntheticSpec spec;
  spec.n_objects = 1000000;
  spec.seed = 111;
  const Catalog cat = make_catalog(generate(spec));
  BenchOptions opt;
  opt.repeats = 5;
  const BenchReport rep = run_bench(cat, opt);
  const BenchRow* idx = rep.find("cone-index");
  const BenchRow* scan = rep.find("cone-scan");
  const bool same_rows = idx->rows_returned == scan->rows_returned;
  const double row_ratio = static_cast<double>(scan->rows_scanned) / std::max<std::uint64_t>(1, idx->rows_scanned);
  const double speedup = scan->wall_ms / idx->wall_ms;
  std::ostringstream msg;
  msg << "1' cone on 1e6 rows: " << idx->rows_scanned << " vs " << scan->rows_scanned << " rows scanned (" << row_ratio
      << "x), " << idx->wall_ms << " ms vs " << scan->wall_ms << " ms (" << speedup << "x), " << idx->rows_returned
      << " rows returned";
  return {same_rows && row_ratio >= 100 && speedup >= 20, msg.str()};
}

Outcome formulas() {
  const double rho0 = surface_brightness_rho(1 / std::sqrt(std::numbers::pi));
  const double lw = line_width_kms(10, 1500);
  const double v = velocity(3, 4);
  std::ostringstream msg;
  msg << "rho(pi^-1/2) = " << rho0 << ", line_width(10,1500) = " << lw << ", velocity(3,4) = " << v;
  return {std::abs(rho0) <= 1e-9 && std::abs(lw - 2000) <= 1e-9 && std::abs(v - 5) <= 1e-9, msg.str()};
}

}  // namespace

int main() {
  report(1, "HTM partition and prefix", partition_and_prefix);
  report(2, "depth-20 trixel area", trixel_area);
  report(3, "cover soundness", cover_soundness);
  report(4, "cover tightness", cover_tightness);
  report(5, "cover of CIRCLE J2000 12 5.5 60.2 1", reference_cover_example);
  report(6, "neighbors vs all-pairs oracle", neighbors_oracle);
  report(7, "nearby/nearest vs linear scan", nearby_probes);
  report(8, "query plans vs naive evaluator", query_suite);
  report(9, "loader round trip", loader_round_trip);
  report(10, "cone search index use", index_performance);
  report(11, "formula spot checks", formulas);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
