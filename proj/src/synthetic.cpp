#include "skyserver/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "skyserver/dictionary.hpp"
#include "skyserver/formulas.hpp"
#include "skyserver/geometry.hpp"

namespace sky {

void SyntheticSpec::validate() const {
  const auto sums_to_one = [](double a, double b, double c) { return std::abs(a + b + c - 1.0) <= 1e-9; };
  if (!sums_to_one(frac_primary, frac_secondary, frac_family)) {
    throw std::invalid_argument("primary/secondary/family fractions must sum to 1");
  }
  if (!sums_to_one(frac_star, frac_galaxy, frac_other)) {
    throw std::invalid_argument("star/galaxy/other fractions must sum to 1");
  }
  for (double f : {frac_primary, frac_secondary, frac_family, frac_star, frac_galaxy, frac_other, spectro_fraction,
                   plant_fraction, cluster_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("fractions must lie in [0, 1]");
  }
  if (profile == DensityProfile::Clustered && (clusters < 1 || !(cluster_scale_arcmin > 0.0))) {
    throw std::invalid_argument("clustered profile needs clusters >= 1 and a positive scale");
  }
  if (!(mag_sigma >= 0.0)) throw std::invalid_argument("mag_sigma must be non-negative");
  if (!(ra_min < ra_max) || !(dec_min < dec_max) || dec_min < -90.0 || dec_max > 90.0) {
    throw std::invalid_argument("bad footprint");
  }
}

FieldKey field_of(double ra_deg, double dec_deg) {
  const double d = std::clamp(dec_deg + 90.0, 0.0, 180.0);
  const int stripe = std::min(static_cast<int>(d / 2.5), 71);
  const double within = (d - stripe * 2.5) / 2.5;
  const int camcol = 1 + std::clamp(static_cast<int>(within * 6.0), 0, 5);
  const int field = std::clamp(static_cast<int>(ra_deg / 0.15), 0, 2399);
  return {1 + stripe, camcol, field};
}

namespace {

constexpr std::int64_t kFirstObjID = 1000000;
constexpr std::int64_t kFirstSpecObjID = 3000000000LL;
constexpr std::int32_t kRepeatRunOffset = 500;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : e_(seed) {}
  double uniform() { return static_cast<double>(e_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal(double mean, double sigma) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  bool chance(double p) { return uniform() < p; }
  std::size_t below(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

 private:
  std::mt19937_64 e_;
};

struct Colors {
  double ug, gr, ri, iz;
};

class Generator {
 public:
  explicit Generator(const SyntheticSpec& s) : s_(s), rng_(s.seed) {
    if (s_.profile == DensityProfile::Clustered) {
      centers_.push_back(eq_to_xyz(185.0, -0.5));
      while (static_cast<int>(centers_.size()) < s_.clusters) centers_.push_back(uniform_position());
    }
  }

  SyntheticCatalog run() {
    while (out_.photo.size() < s_.n_objects) step();
    finish_fields();
    return std::move(out_);
  }

 private:
  std::size_t remaining() const { return s_.n_objects - out_.photo.size(); }

  // Deblended children are primaries, so they use up primary draws.
  void step() {
    if (remaining() >= 6 && rng_.chance(s_.plant_fraction)) {
      plant(static_cast<int>(rng_.below(16)));
      return;
    }
    const double role = rng_.uniform();
    if (role < s_.frac_primary || (role < s_.frac_primary + s_.frac_secondary && primaries_.empty())) {
      if (pending_children_ > 0) {
        --pending_children_;
        emit_child();
        return;
      }
      PhotoObj o = base(position(), draw_type());
      o.flags |= flag::kPrimary;
      push_primary(o, true);
    } else if (role < s_.frac_primary + s_.frac_secondary) {
      emit_secondary(primaries_[rng_.below(primaries_.size())], rng_.chance(0.3));
    } else {
      emit_family(position(), 2 + static_cast<int>(rng_.below(2)), draw_type(), draw_type());
    }
  }

  // --- positions -------------------------------------------------------

  UnitVector uniform_position() {
    const double ra = rng_.uniform(s_.ra_min, s_.ra_max);
    const double sin_dec = rng_.uniform(std::sin(deg_to_rad(s_.dec_min)), std::sin(deg_to_rad(s_.dec_max)));
    return eq_to_xyz(ra, rad_to_deg(std::asin(sin_dec)));
  }

  UnitVector position() {
    if (s_.profile == DensityProfile::Clustered && rng_.chance(s_.cluster_fraction)) {
      const UnitVector& c = centers_[rng_.below(centers_.size())];
      const double r = s_.cluster_scale_arcmin * std::sqrt(-2.0 * std::log(1.0 - rng_.uniform()));
      return offset_point(c, arcmin_to_rad(r), rng_.uniform(0.0, 2.0 * kPi));
    }
    return uniform_position();
  }

  UnitVector box_position(double ra_lo, double ra_hi, double dec_lo, double dec_hi) {
    return eq_to_xyz(rng_.uniform(ra_lo, ra_hi), rng_.uniform(dec_lo, dec_hi));
  }

  UnitVector near(const UnitVector& p, double min_arcsec, double max_arcsec) {
    return offset_point(p, arcmin_to_rad(rng_.uniform(min_arcsec, max_arcsec) / 60.0), rng_.uniform(0.0, 2.0 * kPi));
  }

  // --- photometry ------------------------------------------------------

  int draw_type() {
    const double t = rng_.uniform();
    if (t < s_.frac_star) return photo_type::kStar;
    if (t < s_.frac_star + s_.frac_galaxy) return photo_type::kGalaxy;
    static constexpr int kOther[] = {photo_type::kUnknown, photo_type::kCosmicRay, photo_type::kDefect,
                                     photo_type::kGhost,   photo_type::kKnownObj,  photo_type::kTrail,
                                     photo_type::kSky};
    return kOther[rng_.below(std::size(kOther))];
  }

  Colors draw_colors(int type) {
    if (type == photo_type::kStar) {
      return {rng_.normal(1.2, 0.5), rng_.normal(0.5, 0.3), rng_.normal(0.2, 0.2), rng_.normal(0.1, 0.15)};
    }
    if (type == photo_type::kGalaxy) {
      return {rng_.normal(1.6, 0.4), rng_.normal(0.8, 0.3), rng_.normal(0.4, 0.15), rng_.normal(0.3, 0.15)};
    }
    return {rng_.normal(1.0, 0.8), rng_.normal(0.6, 0.5), rng_.normal(0.3, 0.4), rng_.normal(0.2, 0.3)};
  }

  static void set_colors(PhotoObj& o, double r, const Colors& c) {
    o.r = r;
    o.g = r + c.gr;
    o.u = o.g + c.ug;
    o.i = r - c.ri;
    o.z = o.i - c.iz;
  }

  void derive_magnitudes(PhotoObj& o) {
    const double m[5] = {o.u, o.g, o.r, o.i, o.z};
    double* err[5] = {&o.err_u, &o.err_g, &o.err_r, &o.err_i, &o.err_z};
    double* psf[5] = {&o.psfMag_u, &o.psfMag_g, &o.psfMag_r, &o.psfMag_i, &o.psfMag_z};
    double* petro[5] = {&o.petroMag_u, &o.petroMag_g, &o.petroMag_r, &o.petroMag_i, &o.petroMag_z};
    double* fiber[5] = {&o.fiberMag_u, &o.fiberMag_g, &o.fiberMag_r, &o.fiberMag_i, &o.fiberMag_z};
    const double extended = o.type == photo_type::kGalaxy ? 0.2 : 0.0;
    for (int b = 0; b < 5; ++b) {
      *err[b] = rng_.uniform(0.01, 0.06);
      *psf[b] = m[b] + extended + rng_.normal(0.0, 0.05);
      *petro[b] = m[b] - extended + rng_.normal(0.0, 0.05);
      *fiber[b] = m[b] + 0.5 + rng_.normal(0.0, 0.2);
    }
  }

  void set_reddening(PhotoObj& o, double red_r) {
    o.reddening_r = red_r;
    o.reddening_u = 1.87 * red_r;
    o.reddening_g = 1.38 * red_r;
    o.reddening_i = 0.76 * red_r;
    o.reddening_z = 0.54 * red_r;
  }

  void set_radius(PhotoObj& o, double r50) {
    o.petroR50_r = r50;
    o.petroRad_r = 2.2 * r50;
    o.rho = surface_brightness_rho(r50);
  }

  static void set_shape(PhotoObj& o, double iso_a_r, double iso_a_g) {
    o.isoA_r = iso_a_r;
    o.isoB_r = iso_a_r * std::max(0.2, 1.0 - std::hypot(o.q_r, o.u_r));
    o.isoA_g = iso_a_g;
    o.isoB_g = iso_a_g * std::max(0.2, 1.0 - std::hypot(o.q_g, o.u_g));
  }

  PhotoObj base(const UnitVector& p, int type) {
    PhotoObj o;
    const EquatorialCoord eq = xyz_to_eq(p);
    o.ra = eq.ra_deg();
    o.dec = eq.dec_deg();
    o.type = type;

    set_colors(o, std::clamp(rng_.normal(s_.mag_mean, s_.mag_sigma), 14.0, 26.0), draw_colors(type));
    if (rng_.chance(0.01)) o.u = 999.0;
    derive_magnitudes(o);

    const double r50 = type == photo_type::kGalaxy ? std::exp(rng_.normal(std::log(2.0), 0.4))
                       : type == photo_type::kStar ? std::exp(rng_.normal(std::log(1.2), 0.1))
                                                   : rng_.uniform(0.5, 3.0);
    set_radius(o, r50);
    set_reddening(o, -0.1 * std::log(1.0 - rng_.uniform()));
    o.q_r = rng_.normal(0.0, 0.15);
    o.u_r = rng_.normal(0.0, 0.15);
    o.q_g = rng_.normal(0.0, 0.15);
    o.u_g = rng_.normal(0.0, 0.15);
    set_shape(o, 2.0 * r50 * rng_.uniform(1.0, 1.5), 2.0 * r50 * rng_.uniform(1.0, 1.5));
    o.lDev_r = rng_.uniform();
    o.lExp_r = rng_.uniform();
    o.rowv = rng_.normal(0.0, 0.5);
    o.colv = rng_.normal(0.0, 0.5);
    o.rowvErr = rng_.uniform(0.1, 0.5);
    o.colvErr = rng_.uniform(0.1, 0.5);
    o.colc_u = rng_.uniform(0.0, 2048.0);
    o.colc_g = rng_.uniform(0.0, 2048.0);
    o.colc_r = rng_.uniform(0.0, 2048.0);
    o.photoZ = type == photo_type::kGalaxy ? rng_.uniform(0.02, 0.6) : 0.0;

    o.flags = rng_.chance(0.9) ? flag::kBinned1 : flag::kBinned2;
    if (rng_.chance(0.03)) o.flags |= flag::kEdge;
    if (rng_.chance(o.r < 17.0 ? 0.3 : 0.05)) o.flags |= flag::kSaturated;
    if (rng_.chance(0.05)) o.flags |= flag::kBlended | (rng_.chance(0.4) ? flag::kNoDeblend : 0);
    return o;
  }

  /// Clean photometry flags for templates.
  static void clean_flags(PhotoObj& o) { o.flags = flag::kBinned1 | flag::kPrimary; }

  // --- emission --------------------------------------------------------

  std::size_t push(PhotoObj& o) {
    o.objID = kFirstObjID + static_cast<std::int64_t>(out_.photo.size());
    if (o.run == 0) {
      const FieldKey k = field_of(o.ra, o.dec);
      o.run = k.run;
      o.camcol = k.camcol;
      o.field = k.field;
    }
    o.fieldID = make_field_id(o.run, o.camcol, o.field);
    o.obj = field_objects_[o.fieldID]++;
    const UnitVector v = eq_to_xyz(o.ra, o.dec);
    o.cx = v.x();
    o.cy = v.y();
    o.cz = v.z();
    o.htmID = locate(v, kMaxHtmDepth).id();
    out_.photo.push_back(o);
    return out_.photo.size() - 1;
  }

  std::size_t push_primary(PhotoObj& o, bool maybe_spectrum) {
    const std::size_t idx = push(o);
    primaries_.push_back(idx);
    if (maybe_spectrum && rng_.chance(s_.spectro_fraction) &&
        (o.type == photo_type::kGalaxy || o.type == photo_type::kStar)) {
      random_spectrum(out_.photo[idx]);
    }
    return idx;
  }

  void emit_secondary(std::size_t primary_index, bool variable) {
    PhotoObj o = out_.photo[primary_index];
    const PhotoObj src = o;
    o.parentID = 0;
    const EquatorialCoord eq = xyz_to_eq(near(eq_to_xyz(src.ra, src.dec), 0.0, 0.3));
    o.ra = eq.ra_deg();
    o.dec = eq.dec_deg();
    o.run = src.run + kRepeatRunOffset;
    o.flags = (src.flags & ~(flag::kPrimary | flag::kChild)) | flag::kSecondary;
    double* mags[5] = {&o.u, &o.g, &o.r, &o.i, &o.z};
    for (double* m : mags) {
      if (*m < 900.0) *m += rng_.normal(0.0, 0.02);
    }
    if (variable) *mags[rng_.below(5)] += 0.6;
    derive_magnitudes(o);
    push(o);
  }

  void emit_family(const UnitVector& p, int children, int type_a, int type_b) {
    PhotoObj parent = base(p, type_a);
    parent.flags = (parent.flags & ~(flag::kNoDeblend)) | flag::kBlended;
    const std::size_t idx = push(parent);
    family_parent_ = idx;
    child_types_[0] = type_a;
    child_types_[1] = type_b;
    child_counter_ = 0;
    pending_children_ = children;
  }

  void emit_child() {
    const PhotoObj& parent = out_.photo[family_parent_];
    const int type = child_counter_ < 2 ? child_types_[child_counter_] : draw_type();
    ++child_counter_;
    PhotoObj o = base(near(eq_to_xyz(parent.ra, parent.dec), 1.0, 3.0), type);
    o.parentID = parent.objID;
    o.flags = (o.flags & ~(flag::kBlended | flag::kNoDeblend)) | flag::kChild | flag::kPrimary;
    push_primary(o, true);
  }

  // --- spectra ---------------------------------------------------------

  SpecObj& new_spectrum(std::int64_t objID, int specClass, double z, double zConf) {
    SpecObj s;
    s.specObjID = kFirstSpecObjID + static_cast<std::int64_t>(out_.spec.size());
    s.objID = objID;
    s.specClass = specClass;
    s.z = z;
    s.zConf = zConf;
    s.xcTempNo = 1 + static_cast<std::int32_t>(rng_.below(10));
    out_.spec.push_back(s);
    return out_.spec.back();
  }

  void add_line(std::int64_t specObjID, int lineID, double wave, double sigma, double ew) {
    out_.lines.push_back(SpecLine{specObjID, lineID, wave, sigma, ew, 0});
  }

  void random_lines(const SpecObj& s) {
    static constexpr int kLines[] = {line_id::kUnknown, line_id::kLya, line_id::kCIV, line_id::kMgII,
                                     line_id::kOII,     line_id::kHb,  line_id::kOIII, line_id::kHa};
    const int n = 3 + static_cast<int>(rng_.below(4));
    for (int k = 0; k < n; ++k) {
      const int id = kLines[rng_.below(std::size(kLines))];
      const double wave = id == line_id::kUnknown ? rng_.uniform(3800.0, 9200.0) : id * (1.0 + std::max(0.0, s.z));
      const double ew = id == line_id::kHa ? -15.0 * std::log(1.0 - rng_.uniform()) : rng_.normal(5.0, 25.0);
      add_line(s.specObjID, id, wave, rng_.uniform(0.5, 20.0), ew);
    }
  }

  void random_spectrum(const PhotoObj& o) {
    const double c = rng_.uniform();
    int cls;
    double z;
    if (o.type == photo_type::kGalaxy) {
      cls = c < 0.75 ? spec_class::kGalaxy : c < 0.85 ? spec_class::kGalEm : c < 0.9 ? spec_class::kUnknown
            : c < 0.95 ? spec_class::kQso : spec_class::kSky;
      z = cls == spec_class::kQso ? rng_.uniform(0.3, 3.5) : rng_.uniform(0.01, 0.3);
    } else {
      cls = c < 0.75 ? spec_class::kStar : c < 0.9 ? spec_class::kStarLate : c < 0.95 ? spec_class::kUnknown
            : spec_class::kHizQso;
      z = cls == spec_class::kHizQso ? rng_.uniform(2.3, 5.0) : rng_.normal(0.0, 0.0003);
    }
    random_lines(new_spectrum(o.objID, cls, z, rng_.uniform(0.5, 1.0)));
    if (rng_.chance(0.03)) {
      random_lines(new_spectrum(o.objID, cls, z + rng_.normal(0.0, 0.001), rng_.uniform(0.5, 1.0)));
    }
    if (rng_.chance(0.02)) random_lines(new_spectrum(0, spec_class::kSky, 0.0, rng_.uniform(0.0, 0.5)));
  }

  // --- planted templates -----------------------------------------------

  PhotoObj lrg(const UnitVector& p) {
    PhotoObj o = base(p, photo_type::kGalaxy);
    clean_flags(o);
    const double petro_r = rng_.uniform(18.5, 19.2);
    set_colors(o, petro_r + 0.05, Colors{rng_.uniform(1.5, 2.5), rng_.uniform(1.55, 1.65), rng_.uniform(0.55, 0.65),
                                         rng_.uniform(0.2, 0.4)});
    derive_magnitudes(o);
    o.petroMag_r = petro_r;
    o.petroMag_i = petro_r - 0.6;
    set_reddening(o, rng_.uniform(0.01, 0.05));
    set_radius(o, rng_.uniform(1.2, 2.0));
    o.lExp_r = rng_.uniform(0.1, 0.4);
    o.lDev_r = rng_.uniform(0.5, 1.0);
    o.photoZ = rng_.uniform(0.2, 0.4);
    return o;
  }

  void plant(int which) {
    switch (which) {
      case 0: {  // faint, compact galaxy south of the equator
        PhotoObj o = base(box_position(170.5, 189.5, -5.0, -0.5), photo_type::kGalaxy);
        clean_flags(o);
        set_radius(o, rng_.uniform(0.8, 1.5));
        const double sb = rng_.uniform(23.2, 24.8);
        set_colors(o, sb - o.rho - 0.8, Colors{1.5, 0.8, 0.4, 0.3});
        derive_magnitudes(o);
        push_primary(o, false);
        break;
      }
      case 1: {  // large elongated galaxy
        PhotoObj o = base(position(), photo_type::kGalaxy);
        clean_flags(o);
        set_radius(o, rng_.uniform(8.0, 12.0));
        o.q_r = 0.45;
        o.u_r = 0.3;
        set_shape(o, rng_.uniform(32.0, 58.0), 20.0);
        push_primary(o, false);
        break;
      }
      case 2: {  // luminous red galaxy with photo-z companions
        const UnitVector c = box_position(160.5, 169.5, -4.5, 4.5);
        PhotoObj o = lrg(c);
        const double zc = o.photoZ;
        push_primary(o, false);
        for (int k = 0; k < 3; ++k) {
          PhotoObj m = base(near(c, 5.0, 20.0), photo_type::kGalaxy);
          clean_flags(m);
          m.photoZ = zc + rng_.uniform(-0.02, 0.02);
          push_primary(m, false);
        }
        break;
      }
      case 3: {
        PhotoObj o = lrg(position());
        push_primary(o, false);
        break;
      }
      case 4: {  // broad-line quasar
        PhotoObj o = base(position(), photo_type::kStar);
        clean_flags(o);
        push_primary(o, false);
        const double z = rng_.uniform(2.52, 2.68);
        const SpecObj& s = new_spectrum(o.objID, rng_.chance(0.5) ? spec_class::kQso : spec_class::kHizQso, z,
                                        rng_.uniform(0.92, 1.0));
        add_line(s.specObjID, line_id::kCIV, line_id::kCIV * (1 + z), rng_.uniform(45.0, 80.0), rng_.uniform(5, 50));
        add_line(s.specObjID, line_id::kLya, line_id::kLya * (1 + z), rng_.uniform(5.0, 20.0), rng_.uniform(5, 50));
        add_line(s.specObjID, line_id::kMgII, line_id::kMgII * (1 + z), rng_.uniform(30.0, 60.0), rng_.uniform(5, 50));
        break;
      }
      case 5: {  // strong H alpha, weak H beta
        PhotoObj o = base(position(), photo_type::kGalaxy);
        clean_flags(o);
        push_primary(o, false);
        const double z = rng_.uniform(0.02, 0.2);
        const SpecObj& s = new_spectrum(o.objID, spec_class::kGalEm, z, rng_.uniform(0.9, 1.0));
        add_line(s.specObjID, line_id::kHa, line_id::kHa * (1 + z), rng_.uniform(2.0, 8.0), rng_.uniform(260.0, 300.0));
        add_line(s.specObjID, line_id::kHb, line_id::kHb * (1 + z), rng_.uniform(2.0, 8.0), rng_.uniform(10.5, 12.3));
        add_line(s.specObjID, line_id::kOIII, line_id::kOIII * (1 + z), rng_.uniform(2.0, 8.0), rng_.uniform(50, 90));
        break;
      }
      case 6: {  // elliptical with an unidentified emission line
        PhotoObj o = base(position(), photo_type::kGalaxy);
        clean_flags(o);
        push_primary(o, false);
        const double z = rng_.uniform(0.02, 0.2);
        SpecObj& s = new_spectrum(o.objID, spec_class::kGalaxy, z, rng_.uniform(0.9, 1.0));
        s.xcTempNo = 8;
        const std::int64_t id = s.specObjID;
        add_line(id, line_id::kUnknown, rng_.uniform(7000.0, 7400.0), rng_.uniform(2.0, 8.0), rng_.uniform(12.0, 30.0));
        add_line(id, line_id::kHa, line_id::kHa * (1 + z), rng_.uniform(2.0, 8.0), rng_.uniform(1.0, 5.0));
        add_line(id, line_id::kOII, line_id::kOII * (1 + z), rng_.uniform(2.0, 8.0), rng_.uniform(1.0, 5.0));
        break;
      }
      case 7: {  // slow mover
        PhotoObj o = base(position(), draw_type());
        clean_flags(o);
        o.rowv = rng_.uniform(6.0, 20.0);
        o.colv = rng_.uniform(6.0, 20.0);
        push_primary(o, false);
        break;
      }
      case 8: {  // streak pair in adjacent fields
        const UnitVector p = position();
        PhotoObj red = base(p, photo_type::kUnknown);
        clean_flags(red);
        red.q_r = 0.3;
        red.u_r = 0.2;
        red.fiberMag_r = rng_.uniform(18.0, 20.0);
        red.fiberMag_u = red.fiberMag_r + rng_.uniform(1.0, 2.0);
        red.fiberMag_g = red.fiberMag_r + rng_.uniform(1.0, 2.0);
        red.fiberMag_i = red.fiberMag_r + rng_.uniform(1.0, 2.0);
        red.fiberMag_z = red.fiberMag_r + rng_.uniform(1.0, 2.0);
        set_shape(red, rng_.uniform(3.0, 6.0), 2.0);
        red.isoB_r = red.isoA_r / 2.0;
        const FieldKey k = field_of(red.ra, red.dec);
        push_primary(red, false);

        const double bearing = rng_.chance(0.5) ? kPi / 2 : -kPi / 2;
        PhotoObj green = base(offset_point(p, arcmin_to_rad(rng_.uniform(1.0, 3.0)), bearing), photo_type::kUnknown);
        clean_flags(green);
        green.q_g = 0.3;
        green.u_g = -0.2;
        green.fiberMag_g = red.fiberMag_r + rng_.uniform(-1.0, 1.0);
        green.fiberMag_u = green.fiberMag_g + rng_.uniform(1.0, 2.0);
        green.fiberMag_r = green.fiberMag_g + rng_.uniform(1.0, 2.0);
        green.fiberMag_i = green.fiberMag_g + rng_.uniform(1.0, 2.0);
        green.fiberMag_z = green.fiberMag_g + rng_.uniform(1.0, 2.0);
        set_shape(green, 2.0, rng_.uniform(3.0, 6.0));
        green.isoB_g = green.isoA_g / 2.0;
        green.run = k.run;
        green.camcol = k.camcol;
        green.field = field_of(green.ra, green.dec).field;
        push_primary(green, false);
        break;
      }
      case 9: {  // high-redshift quasar colors
        PhotoObj o = base(position(), draw_type());
        clean_flags(o);
        const double i = rng_.uniform(17.0, 18.5);
        const double gr = rng_.uniform(1.1, 1.3);
        set_colors(o, i + 0.05, Colors{rng_.uniform(2.2, 3.0), gr, 0.05, rng_.uniform(0.0, 0.2)});
        derive_magnitudes(o);
        push_primary(o, false);
        break;
      }
      case 10: {  // white dwarf with a close stellar companion
        const UnitVector p = position();
        PhotoObj wd = base(p, photo_type::kStar);
        clean_flags(wd);
        set_colors(wd, rng_.uniform(17.0, 20.0), Colors{0.2, 0.5, 0.5, 0.5});
        derive_magnitudes(wd);
        push_primary(wd, false);
        PhotoObj mate = base(near(p, 1.0, 2.5), photo_type::kStar);
        clean_flags(mate);
        push_primary(mate, false);
        break;
      }
      case 11: {  // color twins
        const UnitVector p = position();
        PhotoObj a = base(p, draw_type());
        clean_flags(a);
        PhotoObj b = base(near(p, 10.0, 25.0), draw_type());
        clean_flags(b);
        const Colors c = draw_colors(a.type);
        set_colors(a, rng_.uniform(17.0, 21.0), c);
        set_colors(b, rng_.uniform(17.0, 21.0), Colors{c.ug + 0.01, c.gr - 0.01, c.ri + 0.01, c.iz - 0.01});
        derive_magnitudes(a);
        derive_magnitudes(b);
        push_primary(a, false);
        push_primary(b, false);
        break;
      }
      case 12: {  // absorption-line quasar next to a galaxy
        const UnitVector p = position();
        PhotoObj q = base(p, photo_type::kStar);
        clean_flags(q);
        push_primary(q, false);
        const double z = rng_.uniform(1.5, 3.0);
        const SpecObj& s = new_spectrum(q.objID, rng_.chance(0.5) ? spec_class::kQso : spec_class::kHizQso, z,
                                        rng_.uniform(0.8, 1.0));
        add_line(s.specObjID, line_id::kCIV, line_id::kCIV * (1 + z), rng_.uniform(5.0, 20.0), rng_.uniform(-30, -12));
        add_line(s.specObjID, line_id::kMgII, line_id::kMgII * (1 + z), rng_.uniform(5.0, 20.0), rng_.uniform(5, 20));
        PhotoObj g = base(near(p, 3.0, 8.0), photo_type::kGalaxy);
        clean_flags(g);
        push_primary(g, false);
        break;
      }
      case 13: {  // artifact inside the gridded window
        static constexpr int kMask[] = {photo_type::kCosmicRay, photo_type::kDefect, photo_type::kGhost,
                                        photo_type::kTrail, photo_type::kUnknown};
        PhotoObj o = base(box_position(175.2, 184.8, -4.8, 4.8), kMask[rng_.below(std::size(kMask))]);
        o.flags |= flag::kPrimary;
        push_primary(o, false);
        break;
      }
      case 14: {  // variable star observed twice
        PhotoObj o = base(position(), photo_type::kStar);
        clean_flags(o);
        set_colors(o, rng_.uniform(16.0, 20.0), draw_colors(photo_type::kStar));
        derive_magnitudes(o);
        const std::size_t idx = push_primary(o, false);
        emit_secondary(idx, true);
        break;
      }
      default: {  // deblended galaxy and star sharing a parent
        emit_family(position(), 2, photo_type::kGalaxy, photo_type::kStar);
        break;
      }
    }
  }

  void finish_fields() {
    std::map<std::int64_t, Field> fields;
    for (const auto& o : out_.photo) fields.emplace(o.fieldID, Field{o.fieldID, o.run, o.camcol, o.field, 0});
    for (auto& [id, f] : fields) out_.fields.push_back(f);
  }

  const SyntheticSpec& s_;
  Rng rng_;
  std::vector<UnitVector> centers_;
  SyntheticCatalog out_;
  std::vector<std::size_t> primaries_;
  std::map<std::int64_t, std::int32_t> field_objects_;
  std::size_t family_parent_ = 0;
  int pending_children_ = 0;
  int child_types_[2] = {0, 0};
  int child_counter_ = 0;
};

template <class Row>
void write_table(const std::filesystem::path& path, std::span<const Column<Row>> cols, const std::vector<Row>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv_header(cols, SeqColumn::Omit) << '\n';
  for (const auto& r : rows) out << csv_line(cols, r, SeqColumn::Omit) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

SyntheticCatalog generate(const SyntheticSpec& spec) {
  spec.validate();
  return Generator(spec).run();
}

void write_synthetic(const SyntheticCatalog& cat, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_table(dir / "field.csv", field_columns(), cat.fields);
  write_table(dir / "photoObj.csv", photo_columns(), cat.photo);
  write_table(dir / "specObj.csv", spec_columns(), cat.spec);
  write_table(dir / "specLine.csv", line_columns(), cat.lines);
}

Catalog make_catalog(SyntheticCatalog cat) {
  Catalog c;
  c.photo = std::make_shared<PhotoTable>(std::move(cat.photo));
  c.spec = std::make_shared<SpecTable>(std::move(cat.spec));
  c.lines = std::make_shared<LineTable>(std::move(cat.lines));
  c.fields = std::make_shared<FieldTable>(std::move(cat.fields));
  return c;
}

}  // namespace sky
