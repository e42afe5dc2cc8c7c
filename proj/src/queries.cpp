#include "skyserver/queries.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

#include "skyserver/area.hpp"
#include "skyserver/cover.hpp"
#include "skyserver/dictionary.hpp"
#include "skyserver/formulas.hpp"
#include "skyserver/neighbors.hpp"

namespace sky {

namespace {

using Row = std::vector<Value>;
using I = std::int64_t;

const std::vector<QueryInfo>& infos() {
  static const std::vector<QueryInfo> list = {
      {"Q1", "unsaturated galaxies near a point", {{"ra", 185.0}, {"dec", -0.5}, {"radius", 1.0}}, false, true},
      {"Q2", "galaxies by surface brightness in an ra/dec window",
       {{"ra_min", 170.0}, {"ra_max", 190.0}, {"dec_max", 0.0}, {"sb_min", 23.0}, {"sb_max", 25.0}}, false, false},
      {"Q3", "bright galaxies with high extinction", {{"r_max", 22.0}, {"reddening_min", 0.175}}, false, false},
      {"Q4", "large elongated galaxies",
       {{"sb_max", 24.0}, {"isoA_min", 30.0}, {"isoA_max", 60.0}, {"ellipticity2_min", 0.25}}, false, false},
      {"Q5", "elliptical galaxies with a deVaucouleurs profile", {{"likelihood_ratio", 1.1}}, false, false},
      {"Q6", "galaxies deblended from the same parent as a star", {}, false, false},
      {"Q7", "rare star color bins", {{"pop_max", 500.0}}, false, true},
      {"Q8", "unclassified spectra", {}, false, false},
      {"Q9", "broad-line quasars in a redshift window",
       {{"z_min", 2.5}, {"z_max", 2.7}, {"width_min", 2000.0}, {"zconf_min", 0.9}}, false, false},
      {"Q10", "galaxies with strong H alpha", {{"ew_min", 40.0}}, false, false},
      {"Q10A", "galaxies with strong H alpha and weak H beta",
       {{"ha_min", 200.0}, {"hb_min", 10.0}, {"ratio", 20.0}}, false, false},
      {"Q11", "elliptical galaxies with an unidentified emission line",
       {{"template", 8.0}, {"ew_min", 10.0}, {"wave_tol", 0.01}}, false, false},
      {"Q12", "gridded galaxy counts and mask cells",
       {{"ra_min", 175.0}, {"ra_max", 185.0}, {"dec_min", -5.0}, {"dec_max", 5.0}, {"ug_min", 1.0}, {"r_max", 21.5}},
       false, false},
      {"Q13", "galaxy counts per depth-8 trixel", {{"cut_max", 1.25}, {"r_max", 21.75}}, false, false},
      {"Q14", "variable stars across runs", {{"distance_max", 0.5 / 60.0}, {"delta", 0.1}}, true, false},
      {"Q15A", "slow moving objects", {{"v2_min", 50.0}, {"v2_max", 1000.0}}, false, false},
      {"Q15B", "red and green streak pairs", {{"distance_max", 4.0}, {"dmag_max", 2.0}}, false, false},
      {"Q16", "quasar color cut counts", {}, false, false},
      {"Q17", "white dwarf binaries", {{"distance_max", 0.05}}, true, false},
      {"Q18", "close pairs with matching colors", {{"color_tol", 0.05}}, true, false},
      {"Q19", "absorption-line quasars with a nearby galaxy", {{"distance_max", 10.0 / 60.0}, {"ew_max", -10.0}},
       true, false},
      {"Q20", "photoZ neighbor counts around luminous red galaxies",
       {{"ra_min", 160.0}, {"ra_max", 170.0}, {"dec_min", -5.0}, {"dec_max", 5.0}, {"dz_max", 0.05}}, true, false},
  };
  return list;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

class Args {
 public:
  Args(const QueryInfo& info, const QueryParams& given) : p_(info.defaults) {
    for (const auto& [k, v] : given) {
      const auto it = p_.find(k);
      if (it == p_.end()) throw std::invalid_argument("unknown parameter " + k + " for " + info.id);
      it->second = v;
    }
  }
  double operator[](std::string_view k) const { return p_.find(k)->second; }

 private:
  QueryParams p_;
};

struct Ctx {
  const Catalog& cat;
  const Args& a;
  ScanStats& st;
  unsigned threads;

  std::vector<const PhotoObj*> scan(PhotoView v, const PhotoPredicate& pred) const {
    return cat.photo->scan(v, pred, &st, threads);
  }
  const PhotoObj* find(I objID) const {
    st.index_used = true;
    ++st.rows_scanned;
    return cat.photo->find(objID);
  }
  std::span<const Neighbor> neighbors_of(I objID) const {
    const auto n = cat.require_neighbors().of(objID);
    st.index_used = true;
    st.rows_scanned += n.size();
    return n;
  }
};

bool between(double x, double lo, double hi) { return x >= lo && x <= hi; }

// Flag screen shared by the luminous red galaxy selections.
bool lrg_flags_ok(std::uint64_t f) {
  const std::uint64_t binned = flag::kBinned1 | flag::kBinned2 | flag::kBinned4;
  return (f & binned) > 0 && (f & (flag::kBlended | flag::kNoDeblend | flag::kChild)) != flag::kBlended &&
         (f & (flag::kEdge | flag::kSaturated)) == 0;
}

bool q5_cut(const PhotoObj& g, double likelihood_ratio) {
  if (!(g.lDev_r > likelihood_ratio * g.lExp_r && g.lExp_r > 0)) return false;
  if (!lrg_flags_ok(g.flags)) return false;
  if (!(g.petroMag_i > 17.5)) return false;
  if (!(g.petroMag_r > 15.5 || g.petroR50_r > 2)) return false;
  if (!(g.petroMag_r < 30 && g.g < 30 && g.r < 30 && g.i < 30)) return false;
  const double dered = g.petroMag_r - g.reddening_r;
  const double gr = g.g - g.r, ri = g.r - g.i;
  const double cperp = ri - gr / 4 - 0.18;
  const bool cut1 = dered < 19.2 && dered < 13.1 + (7.0 / 3.0) * gr + 4 * ri - 4 * 0.18 && between(cperp, -0.2, 0.2);
  const bool cut2 = dered < 19.5 && cperp > 0.45 - 4 * gr && gr > 1.35 + 0.25 * ri;
  return cut1 || cut2;
}

bool q20_cut(const PhotoObj& g) {
  if (!lrg_flags_ok(g.flags)) return false;
  if (!(g.petroMag_i > 17.5)) return false;
  if (!(g.petroMag_r > 15.5 || g.petroR50_r > 2)) return false;
  if (!(g.g > 0 && g.r > 0 && g.i > 0)) return false;
  const double dered = g.petroMag_r - g.reddening_r;
  const double gr = g.g - g.r, ri = g.r - g.i;
  const double cperp = ri - gr / 4 - 0.18;
  const double sb = dered + 2.5 * std::log10(2 * std::numbers::pi * g.petroR50_r * g.petroR50_r);
  const bool cut1 = dered < 19.2 && dered < 12.38 + (7.0 / 3.0) * gr + 4 * ri && std::abs(cperp) < 0.2 && sb < 24.2;
  const bool cut2 = dered < 19.5 && cperp > 0.45 - 4 * gr && gr > 1.35 + 0.25 * ri && sb < 23.3;
  return cut1 || cut2;
}

bool magnitudes_reasonable(const PhotoObj& s) {
  return between(s.u, 1, 27) && between(s.g, 1, 27) && between(s.r, 1, 27) && between(s.i, 1, 27) &&
         between(s.z, 1, 27);
}

bool is_mask_type(int type) {
  return type == photo_type::kCosmicRay || type == photo_type::kDefect || type == photo_type::kGhost ||
         type == photo_type::kTrail || type == photo_type::kUnknown;
}

double snap30(double x) { return std::floor(x * 30) / 30.0; }

QueryResult ids(std::string column, const std::vector<const PhotoObj*>& rows) {
  QueryResult r{{std::move(column)}, {}};
  r.rows.reserve(rows.size());
  for (const auto* o : rows) r.rows.push_back({I{o->objID}});
  return r;
}

// ---------------------------------------------------------------------------

QueryResult q1(const Ctx& c) {
  const auto near = get_nearby(*c.cat.photo, eq_to_xyz(c.a["ra"], c.a["dec"]), c.a["radius"], &c.st);
  QueryResult r{{"objID", "distance"}, {}};
  for (const auto& n : near) {
    const PhotoObj* g = c.find(n.objID);
    if (in_view(PhotoView::Galaxy, *g) && (g->flags & flag::kSaturated) == 0) {
      r.rows.push_back({I{g->objID}, n.distanceMins});
    }
  }
  return r;
}

QueryResult q2(const Ctx& c) {
  const double ra0 = c.a["ra_min"], ra1 = c.a["ra_max"], dmax = c.a["dec_max"];
  const double sb0 = c.a["sb_min"], sb1 = c.a["sb_max"];
  return ids("objID", c.scan(PhotoView::Galaxy, [&](const PhotoObj& o) {
    return between(o.ra, ra0, ra1) && o.dec < dmax && between(o.g + o.rho, sb0, sb1);
  }));
}

QueryResult q3(const Ctx& c) {
  const double rmax = c.a["r_max"], red = c.a["reddening_min"];
  return ids("objID", c.scan(PhotoView::Galaxy, [&](const PhotoObj& o) { return o.r < rmax && o.reddening_r > red; }));
}

QueryResult q4(const Ctx& c) {
  const double sb = c.a["sb_max"], a0 = c.a["isoA_min"], a1 = c.a["isoA_max"], e2 = c.a["ellipticity2_min"];
  return ids("objID", c.scan(PhotoView::Galaxy, [&](const PhotoObj& o) {
    return o.r + o.rho < sb && between(o.isoA_r, a0, a1) && o.q_r * o.q_r + o.u_r * o.u_r > e2;
  }));
}

QueryResult q5(const Ctx& c) {
  const double lr = c.a["likelihood_ratio"];
  return ids("objID", c.scan(PhotoView::Galaxy, [&](const PhotoObj& o) { return q5_cut(o, lr); }));
}

// Walks the parent index once; within each parent group every galaxy pairs
// with every star.
QueryResult q6(const Ctx& c) {
  const PhotoTable& p = *c.cat.photo;
  const auto order = p.by_parent();
  c.st.index_used = true;
  c.st.rows_scanned += order.size();
  QueryResult r{{"objID", "u", "g", "r", "i", "z"}, {}};
  std::vector<const PhotoObj*> gals, stars;
  for (std::size_t k = 0; k < order.size();) {
    const I parent = p[order[k]].parentID;
    gals.clear();
    stars.clear();
    for (; k < order.size() && p[order[k]].parentID == parent; ++k) {
      const PhotoObj& o = p[order[k]];
      if (in_view(PhotoView::Galaxy, o)) gals.push_back(&o);
      if (in_view(PhotoView::Star, o)) stars.push_back(&o);
    }
    if (parent <= 0) continue;
    for (const auto* g : gals) {
      for (std::size_t s = 0; s < stars.size(); ++s) r.rows.push_back({I{g->objID}, g->u, g->g, g->r, g->i, g->z});
    }
  }
  return r;
}

QueryResult q7(const Ctx& c) {
  std::map<std::array<long long, 4>, I> bins;
  const auto ug = c.cat.photo->ugriz();
  c.st.rows_scanned += ug.size();
  for (const auto& o : ug) {
    if ((o.flags & flag::kPrimary) == 0 || o.type != photo_type::kStar) continue;
    if (!magnitudes_plausible(o.u, o.g, o.r, o.i, o.z)) continue;
    ++bins[color_bin(o.u, o.g, o.r, o.i, o.z)];
  }
  const double pop_max = c.a["pop_max"];
  QueryResult r{{"UG", "GR", "RI", "IZ", "pop"}, {}};
  for (const auto& [b, pop] : bins) {
    if (static_cast<double>(pop) > pop_max) continue;
    r.rows.push_back({I{b[0]}, I{b[1]}, I{b[2]}, I{b[3]}, I{pop}});
  }
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const Row& x, const Row& y) {
    return std::get<I>(x[4]) < std::get<I>(y[4]);
  });
  return r;
}

QueryResult q8(const Ctx& c) {
  QueryResult r{{"specObjID"}, {}};
  const auto rows = c.cat.spec->rows();
  c.st.rows_scanned += rows.size();
  for (const auto& s : rows) {
    if (s.specClass == spec_class::kUnknown) r.rows.push_back({I{s.specObjID}});
  }
  return r;
}

bool is_quasar(int cls) { return cls == spec_class::kQso || cls == spec_class::kHizQso; }

QueryResult q9(const Ctx& c) {
  const double z0 = c.a["z_min"], z1 = c.a["z_max"], wmin = c.a["width_min"], zc = c.a["zconf_min"];
  QueryResult r{{"specObjID", "veldisp", "z"}, {}};
  const auto specs = c.cat.spec->rows();
  c.st.rows_scanned += specs.size();
  for (const auto& s : specs) {
    if (!is_quasar(s.specClass) || !between(s.z, z0, z1) || !(s.zConf > zc)) continue;
    double vmax = 0, zsum = 0;
    I n = 0;
    for (const SpecLine* l : c.cat.lines->lines_of(s.specObjID)) {
      ++c.st.rows_scanned;
      const double w = line_width_kms(l->sigma, l->wave);
      if (!(w > wmin)) continue;
      vmax = n == 0 ? w : std::max(vmax, w);
      zsum += s.z;
      ++n;
    }
    if (n > 0) r.rows.push_back({I{s.specObjID}, vmax, zsum / static_cast<double>(n)});
  }
  c.st.index_used = true;
  return r;
}

// Inside out: qualifying lines first, then their spectra, then the galaxy.
QueryResult q10(const Ctx& c) {
  const double ew = c.a["ew_min"];
  QueryResult r{{"objID"}, {}};
  const auto lines = c.cat.lines->rows();
  c.st.rows_scanned += lines.size();
  c.st.index_used = true;
  for (const auto& l : lines) {
    if (l.lineID != line_id::kHa || !(l.ew > ew)) continue;
    const SpecObj* s = c.cat.spec->find(l.specObjID);
    if (!s) continue;
    const PhotoObj* g = c.find(s->objID);
    if (g && in_view(PhotoView::Galaxy, *g)) r.rows.push_back({I{g->objID}});
  }
  return r;
}

QueryResult q10a(const Ctx& c) {
  const double ha = c.a["ha_min"], hb = c.a["hb_min"], ratio = c.a["ratio"];
  QueryResult r{{"objID"}, {}};
  const auto lines = c.cat.lines->rows();
  c.st.rows_scanned += lines.size();
  c.st.index_used = true;
  for (const auto& l1 : lines) {
    if (l1.lineID != line_id::kHa || !(l1.ew > ha)) continue;
    const SpecObj* s = c.cat.spec->find(l1.specObjID);
    if (!s) continue;
    const PhotoObj* g = c.find(s->objID);
    if (!g || !in_view(PhotoView::Galaxy, *g)) continue;
    for (const SpecLine* l2 : c.cat.lines->lines_of(s->specObjID)) {
      ++c.st.rows_scanned;
      if (l2->lineID == line_id::kHb && l2->ew > hb && l2->ew * ratio < l1.ew) r.rows.push_back({I{g->objID}});
    }
  }
  return r;
}

QueryResult q11(const Ctx& c) {
  const double ew = c.a["ew_min"], tol = c.a["wave_tol"];
  const auto temp = static_cast<std::int32_t>(c.a["template"]);
  std::set<I> out;
  const auto lines = c.cat.lines->rows();
  c.st.rows_scanned += lines.size();
  c.st.index_used = true;
  for (const auto& l : lines) {
    if (l.lineID != line_id::kUnknown || !(l.ew > ew)) continue;
    const SpecObj* s = c.cat.spec->find(l.specObjID);
    if (!s || s->xcTempNo != temp) continue;
    const PhotoObj* g = c.find(s->objID);
    if (!g || !in_view(PhotoView::Galaxy, *g)) continue;
    bool identified_nearby = false;
    for (const SpecLine* l1 : c.cat.lines->lines_of(s->specObjID)) {
      ++c.st.rows_scanned;
      if (std::abs(l.wave - l1->wave) < tol && l1->lineID != line_id::kUnknown) identified_nearby = true;
    }
    if (!identified_nearby) out.insert(g->objID);
  }
  QueryResult r{{"objID"}, {}};
  for (I id : out) r.rows.push_back({id});
  return r;
}

QueryResult q12(const Ctx& c) {
  const double ra0 = c.a["ra_min"], ra1 = c.a["ra_max"], d0 = c.a["dec_min"], d1 = c.a["dec_max"];
  const double ug = c.a["ug_min"], rmax = c.a["r_max"];
  const Convex box = polygon_convex({eq_to_xyz(ra1, d0), eq_to_xyz(ra1, d1), eq_to_xyz(ra0, d1), eq_to_xyz(ra0, d0)});
  const auto ranges = cover(Area{box, 6});
  const auto cand = c.cat.photo->htm_lookup(ranges, &c.st);

  using Cell = std::pair<double, double>;
  std::map<Cell, I> gal, mask;
  for (const PhotoObj* o : cand) {
    if (!between(o->ra, ra0, ra1) || !between(o->dec, d0, d1)) continue;
    const double dec = snap30(o->dec);
    const Cell cell{snap30(o->ra / std::cos(deg_to_rad(dec))), dec};
    if (in_view(PhotoView::Galaxy, *o) && o->u - o->g > ug && o->r < rmax) ++gal[cell];
    if (is_mask_type(o->type)) ++mask[cell];
  }
  QueryResult r{{"kind", "raCosDec", "dec", "pop"}, {}};
  for (const auto& [cell, pop] : gal) r.rows.push_back({std::string("galaxy"), cell.first, cell.second, I{pop}});
  for (const auto& [cell, pop] : mask) r.rows.push_back({std::string("mask"), cell.first, cell.second, I{pop}});
  return r;
}

QueryResult q13(const Ctx& c) {
  const double cut = c.a["cut_max"], rmax = c.a["r_max"];
  struct Acc {
    double ra = 0, dec = 0;
    I n = 0;
  };
  std::map<std::uint64_t, Acc> cells;
  for (const PhotoObj* o : c.scan(PhotoView::Galaxy, [&](const PhotoObj& o) {
         return 0.7 * o.u - 0.5 * o.g - 0.2 * o.i < cut && o.r < rmax;
       })) {
    Acc& a = cells[o->htmID >> 24];
    a.ra += o->ra;
    a.dec += o->dec;
    ++a.n;
  }
  QueryResult r{{"htm_8", "ra", "dec", "pop"}, {}};
  for (const auto& [h, a] : cells) {
    const auto n = static_cast<double>(a.n);
    r.rows.push_back({static_cast<I>(h), a.ra / n, a.dec / n, I{a.n}});
  }
  return r;
}

QueryResult q14(const Ctx& c) {
  c.cat.require_neighbors();
  const double dmax = c.a["distance_max"], delta = c.a["delta"];
  QueryResult r{{"ObjID1", "ObjID2"}, {}};
  const auto differs = [&](double a, double b, double ea, double eb) {
    return std::abs(a - b) > delta + (std::abs(ea) + std::abs(eb));
  };
  for (const PhotoObj* s1 : c.scan(PhotoView::Star, magnitudes_reasonable)) {
    for (const Neighbor& n : c.neighbors_of(s1->objID)) {
      if (!(n.distanceMins < dmax)) continue;
      const PhotoObj* s2 = c.find(n.neighborObjID);
      if (!s2 || s1->run == s2->run || s2->type != photo_type::kStar || !magnitudes_reasonable(*s2)) continue;
      if (differs(s1->u, s2->u, s1->err_u, s2->err_u) || differs(s1->g, s2->g, s1->err_g, s2->err_g) ||
          differs(s1->r, s2->r, s1->err_r, s2->err_r) || differs(s1->i, s2->i, s1->err_i, s2->err_i) ||
          differs(s1->z, s2->z, s1->err_z, s2->err_z)) {
        r.rows.push_back({I{s1->objID}, I{s2->objID}});
      }
    }
  }
  return r;
}

QueryResult q15a(const Ctx& c) {
  const double v0 = c.a["v2_min"], v1 = c.a["v2_max"];
  QueryResult r{{"objID", "velocity"}, {}};
  for (const PhotoObj* o : c.scan(PhotoView::PhotoObj, [&](const PhotoObj& o) {
         return between(o.rowv * o.rowv + o.colv * o.colv, v0, v1) && o.rowv >= 0 && o.colv >= 0;
       })) {
    r.rows.push_back({I{o->objID}, velocity(o->rowv, o->colv)});
  }
  return r;
}

bool red_streak(const PhotoObj& r) {
  return r.q_r * r.q_r + r.u_r * r.u_r > 0.111111 && between(r.fiberMag_r, 6, 22) && r.fiberMag_r < r.fiberMag_u &&
         r.fiberMag_r < r.fiberMag_g && r.fiberMag_r < r.fiberMag_i && r.fiberMag_r < r.fiberMag_z &&
         r.parentID == 0 && r.isoA_r / r.isoB_r > 1.5 && r.isoA_r > 2.0;
}

bool green_streak(const PhotoObj& g) {
  return g.q_g * g.q_g + g.u_g * g.u_g > 0.111111 && between(g.fiberMag_g, 6, 22) && g.fiberMag_g < g.fiberMag_u &&
         g.fiberMag_g < g.fiberMag_r && g.fiberMag_g < g.fiberMag_i && g.fiberMag_g < g.fiberMag_z &&
         g.parentID == 0 && g.isoA_g / g.isoB_g > 1.5 && g.isoA_g > 2.0;
}

double chord_arcmin(const PhotoObj& a, const PhotoObj& b) {
  const double dx = a.cx - b.cx, dy = a.cy - b.cy, dz = a.cz - b.cz;
  return std::sqrt(dx * dx + dy * dy + dz * dz) * (180 * 60 / std::numbers::pi);
}

// Walks the (run, camcol, field, obj) projection; green candidates for a red
// one are found by binary search over the three adjacent fields.
QueryResult q15b(const Ctx& c) {
  const double dmax = c.a["distance_max"], dmag = c.a["dmag_max"];
  const PhotoTable& p = *c.cat.photo;
  const auto order = p.by_run_camcol_field();
  c.st.index_used = true;
  c.st.rows_scanned += order.size();
  std::vector<const PhotoObj*> reds, greens;
  for (std::uint32_t k : order) {
    if (red_streak(p[k])) reds.push_back(&p[k]);
    if (green_streak(p[k])) greens.push_back(&p[k]);
  }
  using Key = std::tuple<std::int32_t, std::int32_t, std::int32_t>;
  const auto key = [](const PhotoObj* o) { return Key{o->run, o->camcol, o->field}; };

  QueryResult r{{"rId", "gId", "run", "camcol", "field", "gField", "ra_r", "dec_r", "ra_g", "dec_g", "distance"}, {}};
  for (const PhotoObj* red : reds) {
    const auto lo = std::lower_bound(greens.begin(), greens.end(), Key{red->run, red->camcol, red->field - 1},
                                     [&](const PhotoObj* o, const Key& k) { return key(o) < k; });
    for (auto it = lo; it != greens.end() && key(*it) <= Key{red->run, red->camcol, red->field + 1}; ++it) {
      const PhotoObj* g = *it;
      const double d = chord_arcmin(*red, *g);
      if (d < dmax && std::abs(red->fiberMag_r - g->fiberMag_g) < dmag) {
        r.rows.push_back({I{red->objID}, I{g->objID}, I{red->run}, I{red->camcol}, I{red->field}, I{g->field},
                          red->ra, red->dec, g->ra, g->dec, d});
      }
    }
  }
  return r;
}

QueryResult q16(const Ctx& c) {
  I total = 0, gal = 0, star = 0, other = 0;
  const auto ug = c.cat.photo->ugriz();
  c.st.rows_scanned += ug.size();
  for (const auto& o : ug) {
    if ((o.flags & flag::kPrimary) == 0 || !quasar_color_cut(o.u, o.g, o.r, o.i, o.z)) continue;
    ++total;
    if (o.type == photo_type::kGalaxy) {
      ++gal;
    } else if (o.type == photo_type::kStar) {
      ++star;
    } else {
      ++other;
    }
  }
  return {{"total", "Galaxies", "Stars", "Other"}, {{total, gal, star, other}}};
}

QueryResult q17(const Ctx& c) {
  c.cat.require_neighbors();
  const double dmax = c.a["distance_max"];
  QueryResult r{{"s1", "s2"}, {}};
  for (const PhotoObj* s1 : c.scan(PhotoView::Star, [](const PhotoObj& s) {
         return s.u - s.g < 0.4 && s.g - s.r < 0.7 && s.r - s.i > 0.4 && s.i - s.z > 0.4;
       })) {
    for (const Neighbor& n : c.neighbors_of(s1->objID)) {
      if (n.neighborObjType != photo_type::kStar || !(n.distanceMins < dmax)) continue;
      const PhotoObj* s2 = c.find(n.neighborObjID);
      if (s2 && in_view(PhotoView::Star, *s2)) r.rows.push_back({I{s1->objID}, I{s2->objID}});
    }
  }
  return r;
}

QueryResult q18(const Ctx& c) {
  c.cat.require_neighbors();
  const double tol = c.a["color_tol"];
  std::set<I> out;
  for (const PhotoObj* p : c.scan(PhotoView::PhotoPrimary, [](const PhotoObj&) { return true; })) {
    for (const Neighbor& n : c.neighbors_of(p->objID)) {
      if (!(p->objID < n.neighborObjID)) continue;
      const PhotoObj* l = c.find(n.neighborObjID);
      if (!l || !in_view(PhotoView::PhotoPrimary, *l)) continue;
      if (std::abs((p->u - p->g) - (l->u - l->g)) < tol && std::abs((p->g - p->r) - (l->g - l->r)) < tol &&
          std::abs((p->r - p->i) - (l->r - l->i)) < tol && std::abs((p->i - p->z) - (l->i - l->z)) < tol) {
        out.insert(p->objID);
      }
    }
  }
  QueryResult r{{"objID"}, {}};
  for (I id : out) r.rows.push_back({id});
  return r;
}

QueryResult q19(const Ctx& c) {
  c.cat.require_neighbors();
  const double dmax = c.a["distance_max"], ew = c.a["ew_max"];
  QueryResult r{{"Quasar_candidate_ID", "Galaxy_ID"}, {}};
  const auto specs = c.cat.spec->rows();
  c.st.rows_scanned += specs.size();
  for (const auto& q : specs) {
    if (!is_quasar(q.specClass)) continue;
    for (const SpecLine* l : c.cat.lines->lines_of(q.specObjID)) {
      ++c.st.rows_scanned;
      if (l->lineID == line_id::kUnknown || !(l->ew < ew)) continue;
      for (const Neighbor& n : c.neighbors_of(q.objID)) {
        if (!(n.distanceMins < dmax)) continue;
        const PhotoObj* g = c.find(n.neighborObjID);
        if (g && in_view(PhotoView::Galaxy, *g)) r.rows.push_back({I{q.objID}, I{g->objID}});
      }
    }
  }
  return r;
}

QueryResult q20(const Ctx& c) {
  c.cat.require_neighbors();
  const double ra0 = c.a["ra_min"], ra1 = c.a["ra_max"], d0 = c.a["dec_min"], d1 = c.a["dec_max"];
  const double dz = c.a["dz_max"];
  QueryResult r{{"objID", "pop"}, {}};
  for (const PhotoObj* g : c.scan(PhotoView::Galaxy, [&](const PhotoObj& o) {
         return between(o.ra, ra0, ra1) && between(o.dec, d0, d1) && q20_cut(o);
       })) {
    I pop = 0;
    for (const Neighbor& n : c.neighbors_of(g->objID)) {
      if (!(n.objID < n.neighborObjID)) continue;
      const PhotoObj* u = c.find(n.neighborObjID);
      if (u && in_view(PhotoView::Galaxy, *u) && std::abs(g->photoZ - u->photoZ) < dz) ++pop;
    }
    if (pop > 0) r.rows.push_back({I{g->objID}, pop});
  }
  return r;
}

using Plan = QueryResult (*)(const Ctx&);

Plan plan_for(std::string_view id) {
  static const std::map<std::string, Plan, std::less<>> plans = {
      {"Q1", q1},   {"Q2", q2},   {"Q3", q3},   {"Q4", q4},     {"Q5", q5},     {"Q6", q6},   {"Q7", q7},
      {"Q8", q8},   {"Q9", q9},   {"Q10", q10}, {"Q10A", q10a}, {"Q11", q11},   {"Q12", q12}, {"Q13", q13},
      {"Q14", q14}, {"Q15A", q15a}, {"Q15B", q15b}, {"Q16", q16}, {"Q17", q17}, {"Q18", q18}, {"Q19", q19},
      {"Q20", q20},
  };
  return plans.find(id)->second;
}

bool value_less(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  return std::visit([&](const auto& x) { return x < std::get<std::decay_t<decltype(x)>>(b); }, a);
}

}  // namespace

void canonical_sort(QueryResult& r) {
  std::sort(r.rows.begin(), r.rows.end(), [](const Row& x, const Row& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), value_less);
  });
}

std::span<const QueryInfo> query_list() { return infos(); }

const QueryInfo& query_info(std::string_view id) {
  for (const auto& q : infos()) {
    if (iequals(q.id, id)) return q;
  }
  throw UnknownQuery("unknown query: " + std::string(id));
}

QueryResult run_query(const Catalog& cat, std::string_view id, const QueryParams& params, ScanStats* stats,
                      unsigned threads) {
  const QueryInfo& info = query_info(id);
  const Args args(info, params);
  ScanStats local;
  const Ctx ctx{cat, args, local, std::max(1u, threads)};
  QueryResult r = plan_for(info.id)(ctx);
  if (stats) *stats += local;
  return r;
}

}  // namespace sky
