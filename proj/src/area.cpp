#include "skyserver/area.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "skyserver/htm.hpp"

namespace sky {
namespace {

constexpr double kOrientationTolerance = 1e-12;

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); };
  while (i < text.size()) {
    while (i < text.size() && is_sep(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_sep(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

double parse_number(std::string_view tok) {
  std::string_view body = tok;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (body.empty() || ec != std::errc{} || end != body.data() + body.size() || !std::isfinite(value)) {
    throw AreaParseError("non-numeric token '" + std::string(tok) + "'");
  }
  return value;
}

bool is_integer_token(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  return !tok.empty() && std::all_of(tok.begin(), tok.end(),
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

long parse_count(std::string_view tok, const char* what) {
  if (!is_integer_token(tok)) {
    throw AreaParseError(std::string(what) + " must be a non-negative integer, got '" + std::string(tok) + "'");
  }
  return std::lround(parse_number(tok));
}

int parse_depth(std::string_view tok) {
  const long d = parse_count(tok, "depth");
  if (d > kMaxHtmDepth) throw AreaParseError("depth must be in [0, 20]");
  return static_cast<int>(d);
}

UnitVector radec_point(double ra, double dec) {
  try {
    return eq_to_xyz(ra, dec);
  } catch (const std::out_of_range&) {
    throw AreaParseError("dec out of range [-90, 90]");
  }
}

UnitVector cartesian_point(double x, double y, double z) {
  try {
    return UnitVector::normalize(x, y, z);
  } catch (const std::invalid_argument&) {
    throw AreaParseError("zero-length cartesian vector");
  }
}

double check_radius(double r) {
  if (r < 0.0 || r > 10800.0) throw AreaParseError("circle radius must be in [0, 10800] arcmin");
  return r;
}

class Cursor {
 public:
  Cursor(const std::vector<std::string_view>& toks, std::size_t pos) : toks_(toks), pos_(pos) {}
  std::size_t remaining() const { return toks_.size() - pos_; }
  std::string_view next() {
    if (pos_ >= toks_.size()) throw AreaParseError("wrong token count: unexpected end of area");
    return toks_[pos_++];
  }
  double number() { return parse_number(next()); }

 private:
  const std::vector<std::string_view>& toks_;
  std::size_t pos_;
};

Area parse_circle(const std::string& frame, Cursor cur) {
  const std::size_t n = cur.remaining();
  const std::size_t base = frame == "J2000" ? 3 : 4;
  if (n != base && n != base + 1) {
    throw AreaParseError("wrong token count for CIRCLE " + frame);
  }
  Area area;
  if (n == base + 1) area.declared_depth = parse_depth(cur.next());
  UnitVector center = UnitVector::from_unit({1.0, 0.0, 0.0});
  if (frame == "J2000") {
    const double ra = cur.number();
    const double dec = cur.number();
    center = radec_point(ra, dec);
  } else {
    const double x = cur.number();
    const double y = cur.number();
    const double z = cur.number();
    center = cartesian_point(x, y, z);
  }
  area.shape = Circle{center, check_radius(cur.number())};
  return area;
}

Area parse_convex(const std::string& frame, Cursor cur) {
  Area area;
  std::vector<UnitVector> corners;
  if (frame == "J2000") {
    area.declared_depth = parse_depth(cur.next());
    const long n = parse_count(cur.next(), "polygon point count");
    if (cur.remaining() != static_cast<std::size_t>(2 * n)) {
      throw AreaParseError("wrong token count: CONVEX J2000 declares " + std::to_string(n) + " points");
    }
    for (long i = 0; i < n; ++i) {
      const double ra = cur.number();
      const double dec = cur.number();
      corners.push_back(radec_point(ra, dec));
    }
  } else {
    if (cur.remaining() % 3 != 0) throw AreaParseError("wrong token count: CONVEX CARTESIAN needs xyz triples");
    while (cur.remaining() > 0) {
      const double x = cur.number();
      const double y = cur.number();
      const double z = cur.number();
      corners.push_back(cartesian_point(x, y, z));
    }
  }
  area.shape = polygon_convex(corners);
  return area;
}

Area parse_domain(Cursor cur) {
  Area area;
  area.declared_depth = parse_depth(cur.next());
  const long k = parse_count(cur.next(), "convex count");
  if (k < 1) throw AreaParseError("DOMAIN needs at least one convex");
  Domain domain;
  for (long c = 0; c < k; ++c) {
    const long n = parse_count(cur.next(), "halfspace count");
    if (n < 1) throw AreaParseError("a DOMAIN convex needs at least one halfspace");
    Convex convex;
    for (long h = 0; h < n; ++h) {
      const double x = cur.number();
      const double y = cur.number();
      const double z = cur.number();
      const double d = cur.number();
      if (d < -1.0 || d > 1.0) throw AreaParseError("halfspace offset must be in [-1, 1]");
      convex.halfspaces.push_back(Halfspace{cartesian_point(x, y, z), d});
    }
    domain.convexes.push_back(std::move(convex));
  }
  if (cur.remaining() != 0) throw AreaParseError("wrong token count: trailing tokens after DOMAIN");
  if (domain.convexes.size() == 1) {
    area.shape = std::move(domain.convexes.front());
  } else {
    area.shape = std::move(domain);
  }
  return area;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, " %.17g", v);
  out += buf;
}

void append_halfspaces(std::string& out, const Convex& c) {
  out += ' ' + std::to_string(c.halfspaces.size());
  for (const auto& h : c.halfspaces) {
    append_number(out, h.normal.x());
    append_number(out, h.normal.y());
    append_number(out, h.normal.z());
    append_number(out, h.offset);
  }
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool near(const UnitVector& a, const UnitVector& b, double tol) {
  return near(a.x(), b.x(), tol) && near(a.y(), b.y(), tol) && near(a.z(), b.z(), tol);
}

bool convex_equal(const Convex& a, const Convex& b, double tol) {
  if (a.halfspaces.size() != b.halfspaces.size()) return false;
  for (std::size_t i = 0; i < a.halfspaces.size(); ++i) {
    if (!near(a.halfspaces[i].normal, b.halfspaces[i].normal, tol) ||
        !near(a.halfspaces[i].offset, b.halfspaces[i].offset, tol)) {
      return false;
    }
  }
  return true;
}

}  // namespace

Area make_circle(const UnitVector& center, double radius_arcmin, std::optional<int> declared_depth) {
  return Area{Circle{center, check_radius(radius_arcmin)}, declared_depth};
}

Convex polygon_convex(const std::vector<UnitVector>& corners) {
  const std::size_t n = corners.size();
  if (n < 3) throw AreaParseError("a polygon needs at least 3 points");
  Convex convex;
  convex.corners = corners;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 normal = cross(corners[i].vec(), corners[(i + 1) % n].vec());
    if (normal.norm() < 1e-15) throw AreaParseError("degenerate polygon edge");
    convex.halfspaces.push_back(Halfspace{UnitVector::normalize(normal), 0.0});
  }
  bool all_inside = true;
  bool all_outside = true;
  for (const auto& h : convex.halfspaces) {
    for (const auto& p : corners) {
      const double s = dot(h.normal, p);
      if (s < -kOrientationTolerance) all_inside = false;
      if (s > kOrientationTolerance) all_outside = false;
    }
  }
  if (!all_inside) {
    throw AreaParseError(all_outside ? "polygon is clockwise; corners must be counter-clockwise"
                                     : "polygon is not convex");
  }
  return convex;
}

Area parse_area(std::string_view text) {
  const auto toks = tokenize(text);
  if (toks.empty()) throw AreaParseError("empty area");
  const std::string kind = upper(toks[0]);
  if (kind == "DOMAIN") return parse_domain(Cursor(toks, 1));
  if (kind != "CIRCLE" && kind != "CONVEX") throw AreaParseError("unknown keyword '" + std::string(toks[0]) + "'");
  if (toks.size() < 2) throw AreaParseError("wrong token count: missing coordinate frame");
  const std::string frame = upper(toks[1]);
  if (frame != "J2000" && frame != "CARTESIAN") {
    throw AreaParseError("unknown keyword '" + std::string(toks[1]) + "'");
  }
  return kind == "CIRCLE" ? parse_circle(frame, Cursor(toks, 2)) : parse_convex(frame, Cursor(toks, 2));
}

std::string serialize(const Area& area) {
  std::string out;
  const auto depth_token = [&] { return area.declared_depth ? " " + std::to_string(*area.declared_depth) : std::string(); };
  if (const auto* c = std::get_if<Circle>(&area.shape)) {
    out = "CIRCLE CARTESIAN" + depth_token();
    append_number(out, c->center.x());
    append_number(out, c->center.y());
    append_number(out, c->center.z());
    append_number(out, c->radius_arcmin);
  } else if (const auto* cv = std::get_if<Convex>(&area.shape)) {
    if (area.declared_depth) {
      out = "DOMAIN" + depth_token() + " 1";
      append_halfspaces(out, *cv);
    } else if (!cv->corners.empty()) {
      out = "CONVEX CARTESIAN";
      for (const auto& p : cv->corners) {
        append_number(out, p.x());
        append_number(out, p.y());
        append_number(out, p.z());
      }
    } else {
      throw std::invalid_argument("convex without depth or corners has no textual form");
    }
  } else {
    const auto& d = std::get<Domain>(area.shape);
    if (!area.declared_depth) throw std::invalid_argument("domain without depth has no textual form");
    out = "DOMAIN" + depth_token() + " " + std::to_string(d.convexes.size());
    for (const auto& cv : d.convexes) append_halfspaces(out, cv);
  }
  return out;
}

bool contains(const Convex& convex, const UnitVector& p) {
  return std::all_of(convex.halfspaces.begin(), convex.halfspaces.end(),
                     [&](const Halfspace& h) { return h.contains(p); });
}

bool contains(const Area& area, const UnitVector& p) {
  if (const auto* c = std::get_if<Circle>(&area.shape)) {
    return c->radius_arcmin >= 10800.0 || arc_distance_arcmin(c->center, p) <= c->radius_arcmin;
  }
  if (const auto* cv = std::get_if<Convex>(&area.shape)) return contains(*cv, p);
  const auto& d = std::get<Domain>(area.shape);
  return std::any_of(d.convexes.begin(), d.convexes.end(), [&](const Convex& c) { return contains(c, p); });
}

bool structurally_equal(const Area& a, const Area& b, double tol) {
  if (a.declared_depth != b.declared_depth || a.shape.index() != b.shape.index()) return false;
  if (const auto* ca = std::get_if<Circle>(&a.shape)) {
    const auto& cb = std::get<Circle>(b.shape);
    return near(ca->center, cb.center, tol) && near(ca->radius_arcmin, cb.radius_arcmin, tol);
  }
  if (const auto* ca = std::get_if<Convex>(&a.shape)) return convex_equal(*ca, std::get<Convex>(b.shape), tol);
  const auto& da = std::get<Domain>(a.shape);
  const auto& db = std::get<Domain>(b.shape);
  if (da.convexes.size() != db.convexes.size()) return false;
  for (std::size_t i = 0; i < da.convexes.size(); ++i) {
    if (!convex_equal(da.convexes[i], db.convexes[i], tol)) return false;
  }
  return true;
}

}  // namespace sky
