#include "skyserver/dictionary.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <utility>

namespace sky {
namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  return out;
}

std::vector<DictEntry> builtin_entries() {
  using K = DictKind;
  return {
      {K::PhotoFlag, "CANONICAL_CENTER", 0x1, "measurements used the canonical center"},
      {K::PhotoFlag, "BRIGHT", 0x2, "detected in the bright object pass"},
      {K::PhotoFlag, "EDGE", 0x4, "object too close to the frame edge"},
      {K::PhotoFlag, "BLENDED", 0x8, "object has more than one peak"},
      {K::PhotoFlag, "CHILD", 0x10, "product of deblending"},
      {K::PhotoFlag, "PEAKCENTER", 0x20, "center is the peak pixel"},
      {K::PhotoFlag, "NODEBLEND", 0x40, "blended but not deblended"},
      {K::PhotoFlag, "NOPROFILE", 0x80, "too small for a radial profile"},
      {K::PhotoFlag, "NOPETRO", 0x100, "no Petrosian radius"},
      {K::PhotoFlag, "MANYPETRO", 0x200, "more than one Petrosian radius"},
      {K::PhotoFlag, "NOPETRO_BIG", 0x400, "Petrosian radius too large"},
      {K::PhotoFlag, "DEBLEND_TOO_MANY_PEAKS", 0x800, "too many peaks to deblend"},
      {K::PhotoFlag, "COSMIC_RAY", 0x1000, "contains a cosmic ray pixel"},
      {K::PhotoFlag, "MANYR50", 0x2000, "more than one 50% light radius"},
      {K::PhotoFlag, "MANYR90", 0x4000, "more than one 90% light radius"},
      {K::PhotoFlag, "BAD_RADIAL", 0x8000, "negative radial profile points"},
      {K::PhotoFlag, "INCOMPLETE_PROFILE", 0x10000, "profile runs off the frame"},
      {K::PhotoFlag, "INTERP", 0x20000, "contains interpolated pixels"},
      {K::PhotoFlag, "SATURATED", 0x40000, "contains saturated pixels"},
      {K::PhotoFlag, "NOTCHECKED", 0x80000, "contains unchecked pixels"},
      {K::PhotoFlag, "SUBTRACTED", 0x100000, "wings subtracted"},
      {K::PhotoFlag, "NOSTOKES", 0x200000, "no Stokes parameters"},
      {K::PhotoFlag, "BADSKY", 0x400000, "sky level is unreliable"},
      {K::PhotoFlag, "PETROFAINT", 0x800000, "Petrosian radius measured at low surface brightness"},
      {K::PhotoFlag, "TOO_LARGE", 0x1000000, "object is too large"},
      {K::PhotoFlag, "DEBLENDED_AS_PSF", 0x2000000, "deblended as a point source"},
      {K::PhotoFlag, "DEBLEND_PRUNED", 0x4000000, "deblender pruned peaks"},
      {K::PhotoFlag, "ELLIPFAINT", 0x8000000, "isophotal center below the threshold"},
      {K::PhotoFlag, "BINNED1", 0x10000000, "detected at 1x1 binning"},
      {K::PhotoFlag, "BINNED2", 0x20000000, "detected at 2x2 binning"},
      {K::PhotoFlag, "BINNED4", 0x40000000, "detected at 4x4 binning"},
      {K::PhotoFlag, "MOVED", 0x80000000, "object may have moved"},
      {K::PhotoFlag, "PRIMARY", 1ull << 32, "primary observation"},
      {K::PhotoFlag, "SECONDARY", 1ull << 33, "repeat observation"},
      {K::PhotoType, "UNKNOWN", 0, "unclassified"},
      {K::PhotoType, "COSMIC_RAY", 1, "cosmic ray"},
      {K::PhotoType, "DEFECT", 2, "detector defect"},
      {K::PhotoType, "GALAXY", 3, "extended source"},
      {K::PhotoType, "GHOST", 4, "scattered light ghost"},
      {K::PhotoType, "KNOWNOBJ", 5, "known object outside the survey"},
      {K::PhotoType, "STAR", 6, "point source"},
      {K::PhotoType, "TRAIL", 7, "satellite or airplane trail"},
      {K::PhotoType, "SKY", 8, "blank sky"},
      {K::SpecClass, "UNKNOWN", 0, "not classified"},
      {K::SpecClass, "STAR", 1, "stellar spectrum"},
      {K::SpecClass, "GALAXY", 2, "galaxy spectrum"},
      {K::SpecClass, "QSO", 3, "quasar"},
      {K::SpecClass, "HIZ_QSO", 4, "high redshift quasar"},
      {K::SpecClass, "SKY", 5, "sky fiber"},
      {K::SpecClass, "STAR_LATE", 6, "late type star"},
      {K::SpecClass, "GAL_EM", 7, "emission line galaxy"},
      {K::SpecLineName, "UNKNOWN", 0, "unidentified line"},
      {K::SpecLineName, "Lya_1216", 1216, "Lyman alpha"},
      {K::SpecLineName, "CIV_1549", 1549, "carbon IV"},
      {K::SpecLineName, "MgII_2799", 2799, "magnesium II"},
      {K::SpecLineName, "OII_3727", 3727, "oxygen II doublet"},
      {K::SpecLineName, "Hb_4863", 4863, "H beta"},
      {K::SpecLineName, "OIII_5008", 5008, "oxygen III"},
      {K::SpecLineName, "Ha_6565", 6565, "H alpha"},
  };
}

void validate(const std::vector<DictEntry>& entries) {
  std::set<std::pair<DictKind, std::string>> seen;
  std::uint64_t flag_bits = 0;
  for (const auto& e : entries) {
    if (!seen.emplace(e.kind, fold(e.name)).second) {
      throw std::runtime_error("duplicate dictionary entry " + e.name);
    }
    if (e.kind == DictKind::PhotoFlag) {
      if (std::popcount(e.value) != 1 || (flag_bits & e.value) != 0) {
        throw std::runtime_error("photo flag " + e.name + " is not a distinct single bit");
      }
      flag_bits |= e.value;
    }
  }
}

}  // namespace

std::string_view to_string(DictKind k) {
  switch (k) {
    case DictKind::PhotoFlag: return "PhotoFlag";
    case DictKind::PhotoType: return "PhotoType";
    case DictKind::SpecClass: return "SpecClass";
    case DictKind::SpecLineName: return "SpecLineName";
  }
  return "";
}

DictKind dict_kind_from_string(std::string_view s) {
  for (auto k : {DictKind::PhotoFlag, DictKind::PhotoType, DictKind::SpecClass, DictKind::SpecLineName}) {
    if (s == to_string(k)) return k;
  }
  throw std::runtime_error("unknown dictionary kind " + std::string(s));
}

Dictionary::Dictionary(std::vector<DictEntry> entries) : entries_(std::move(entries)) { validate(entries_); }

const Dictionary& Dictionary::builtin() {
  static const Dictionary d(builtin_entries());
  return d;
}

Dictionary Dictionary::read_csv(std::istream& in) {
  std::vector<DictEntry> entries;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "kind,name,value,description") throw std::runtime_error("dictionary: bad header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    for (int i = 0; i < 3 && std::getline(ss, tok, ','); ++i) f.push_back(tok);
    std::getline(ss, tok);
    f.push_back(tok);
    if (f.size() != 4) throw std::runtime_error("dictionary line " + std::to_string(lineno) + ": expected 4 fields");
    std::uint64_t value = 0;
    const std::string& v = f[2];
    const bool hex = v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X');
    const char* begin = v.data() + (hex ? 2 : 0);
    const auto [end, ec] = std::from_chars(begin, v.data() + v.size(), value, hex ? 16 : 10);
    if (ec != std::errc{} || end != v.data() + v.size()) {
      throw std::runtime_error("dictionary line " + std::to_string(lineno) + ": bad value");
    }
    entries.push_back({dict_kind_from_string(f[0]), f[1], value, f[3]});
  }
  return Dictionary(std::move(entries));
}

void Dictionary::write_csv(std::ostream& out) const {
  out << "# skyserver dictionary, format version 1\n";
  out << "kind,name,value,description\n";
  for (const auto& e : entries_) {
    out << to_string(e.kind) << ',' << e.name << ',';
    if (e.kind == DictKind::PhotoFlag) {
      char buf[32];
      const auto r = std::to_chars(buf, buf + sizeof buf, e.value, 16);
      out << "0x" << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
    } else {
      out << e.value;
    }
    out << ',' << e.description << '\n';
  }
}

std::uint64_t Dictionary::value(DictKind kind, std::string_view name) const {
  const std::string key = fold(name);
  for (const auto& e : entries_) {
    if (e.kind == kind && fold(e.name) == key) return e.value;
  }
  throw UnknownName("unknown " + std::string(to_string(kind)) + " name '" + std::string(name) + "'");
}

std::optional<std::string> Dictionary::name_of(DictKind kind, std::uint64_t value) const {
  for (const auto& e : entries_) {
    if (e.kind == kind && e.value == value) return e.name;
  }
  return std::nullopt;
}

bool Dictionary::operator==(const Dictionary& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = o.entries_[i];
    if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.description != b.description) return false;
  }
  return true;
}

}  // namespace sky
