#include "skyserver/catalog.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <thread>
#include <tuple>

#include "skyserver/dictionary.hpp"

namespace sky {
namespace {

#define COL(T, m) Column<T>{#m, &T::m}

const std::array kPhotoColumns = {
    COL(PhotoObj, objID), COL(PhotoObj, run), COL(PhotoObj, camcol), COL(PhotoObj, field),
    COL(PhotoObj, obj), COL(PhotoObj, type), COL(PhotoObj, flags), COL(PhotoObj, parentID),
    COL(PhotoObj, ra), COL(PhotoObj, dec), COL(PhotoObj, cx), COL(PhotoObj, cy),
    COL(PhotoObj, cz), COL(PhotoObj, htmID), COL(PhotoObj, u), COL(PhotoObj, g),
    COL(PhotoObj, r), COL(PhotoObj, i), COL(PhotoObj, z), COL(PhotoObj, err_u),
    COL(PhotoObj, err_g), COL(PhotoObj, err_r), COL(PhotoObj, err_i), COL(PhotoObj, err_z),
    COL(PhotoObj, psfMag_u), COL(PhotoObj, psfMag_g), COL(PhotoObj, psfMag_r), COL(PhotoObj, psfMag_i),
    COL(PhotoObj, psfMag_z), COL(PhotoObj, petroMag_u), COL(PhotoObj, petroMag_g), COL(PhotoObj, petroMag_r),
    COL(PhotoObj, petroMag_i), COL(PhotoObj, petroMag_z), COL(PhotoObj, fiberMag_u), COL(PhotoObj, fiberMag_g),
    COL(PhotoObj, fiberMag_r), COL(PhotoObj, fiberMag_i), COL(PhotoObj, fiberMag_z), COL(PhotoObj, petroRad_r),
    COL(PhotoObj, petroR50_r), COL(PhotoObj, reddening_u), COL(PhotoObj, reddening_g),
    COL(PhotoObj, reddening_r), COL(PhotoObj, reddening_i), COL(PhotoObj, reddening_z), COL(PhotoObj, rho),
    COL(PhotoObj, isoA_r), COL(PhotoObj, isoB_r), COL(PhotoObj, isoA_g), COL(PhotoObj, isoB_g),
    COL(PhotoObj, q_r), COL(PhotoObj, u_r), COL(PhotoObj, q_g), COL(PhotoObj, u_g),
    COL(PhotoObj, lDev_r), COL(PhotoObj, lExp_r), COL(PhotoObj, rowv), COL(PhotoObj, colv),
    COL(PhotoObj, rowvErr), COL(PhotoObj, colvErr), COL(PhotoObj, colc_u), COL(PhotoObj, colc_g),
    COL(PhotoObj, colc_r), COL(PhotoObj, photoZ), COL(PhotoObj, fieldID),
};

const std::array kSpecColumns = {
    COL(SpecObj, specObjID), COL(SpecObj, objID), COL(SpecObj, specClass),
    COL(SpecObj, z),         COL(SpecObj, zConf), COL(SpecObj, xcTempNo),
};

const std::array kLineColumns = {
    COL(SpecLine, specObjID), COL(SpecLine, lineID), COL(SpecLine, wave), COL(SpecLine, sigma), COL(SpecLine, ew),
};

const std::array kFieldColumns = {
    COL(Field, fieldID), COL(Field, run), COL(Field, camcol), COL(Field, field),
};

const std::array kNeighborColumns = {
    COL(Neighbor, objID), COL(Neighbor, neighborObjID), COL(Neighbor, distanceMins), COL(Neighbor, neighborObjType),
};

#undef COL

template <class Row>
constexpr bool has_load_seq = !std::is_same_v<Row, Neighbor>;

template <class T>
void append_number(std::string& out, T v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

template <class T>
T parse_number(std::string_view tok, const char* name) {
  if (tok.empty()) throw CsvError(std::string("null value in column ") + name);
  T v{};
  const char* first = tok.data();
  if constexpr (std::is_integral_v<T>) {
    if (*first == '+') ++first;
  }
  const auto [end, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) throw CsvError(std::string("value out of range in column ") + name);
  if (ec != std::errc{} || end != tok.data() + tok.size()) {
    throw CsvError(std::string("non-numeric value '") + std::string(tok) + "' in column " + name);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw CsvError(std::string("non-finite value in column ") + name);
  }
  return v;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::span<const Column<PhotoObj>> photo_columns() { return kPhotoColumns; }
std::span<const Column<SpecObj>> spec_columns() { return kSpecColumns; }
std::span<const Column<SpecLine>> line_columns() { return kLineColumns; }
std::span<const Column<Field>> field_columns() { return kFieldColumns; }
std::span<const Column<Neighbor>> neighbor_columns() { return kNeighborColumns; }

// ---------------------------------------------------------------------------

bool in_view(PhotoView v, const PhotoObj& o) {
  const bool primary = (o.flags & flag::kPrimary) != 0;
  switch (v) {
    case PhotoView::PhotoObj: return true;
    case PhotoView::PhotoPrimary: return primary;
    case PhotoView::PhotoSecondary: return !primary && (o.flags & flag::kSecondary) != 0;
    case PhotoView::PhotoFamily: return (o.flags & (flag::kPrimary | flag::kSecondary)) == 0;
    case PhotoView::Sky: return o.type == photo_type::kSky;
    case PhotoView::Unknown: return o.type == photo_type::kUnknown;
    case PhotoView::Star: return primary && o.type == photo_type::kStar;
    case PhotoView::Galaxy: return primary && o.type == photo_type::kGalaxy;
  }
  return false;
}

std::string_view to_string(PhotoView v) {
  switch (v) {
    case PhotoView::PhotoObj: return "PhotoObj";
    case PhotoView::PhotoPrimary: return "PhotoPrimary";
    case PhotoView::PhotoSecondary: return "PhotoSecondary";
    case PhotoView::PhotoFamily: return "PhotoFamily";
    case PhotoView::Sky: return "Sky";
    case PhotoView::Unknown: return "Unknown";
    case PhotoView::Star: return "Star";
    case PhotoView::Galaxy: return "Galaxy";
  }
  return "";
}

PhotoTable::PhotoTable(std::vector<PhotoObj> rows) : rows_(std::move(rows)) {
  const auto n = static_cast<std::uint32_t>(rows_.size());
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);

  htm_rows_ = ids;
  std::stable_sort(htm_rows_.begin(), htm_rows_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return rows_[a].htmID < rows_[b].htmID; });
  htm_keys_.reserve(n);
  for (auto r : htm_rows_) htm_keys_.push_back(rows_[r].htmID);

  by_objid_ = ids;
  std::sort(by_objid_.begin(), by_objid_.end(),
            [&](std::uint32_t a, std::uint32_t b) { return rows_[a].objID < rows_[b].objID; });

  by_parent_ = ids;
  std::stable_sort(by_parent_.begin(), by_parent_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return rows_[a].parentID < rows_[b].parentID; });

  by_rcfo_ = std::move(ids);
  std::stable_sort(by_rcfo_.begin(), by_rcfo_.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto& x = rows_[a];
    const auto& y = rows_[b];
    return std::tie(x.run, x.camcol, x.field, x.obj) < std::tie(y.run, y.camcol, y.field, y.obj);
  });

  ugriz_.reserve(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto& o = rows_[k];
    ugriz_.push_back({o.u, o.g, o.r, o.i, o.z, o.flags, o.type, k});
  }
}

const PhotoObj* PhotoTable::find(std::int64_t objID) const {
  const auto it = std::lower_bound(by_objid_.begin(), by_objid_.end(), objID,
                                   [&](std::uint32_t r, std::int64_t id) { return rows_[r].objID < id; });
  if (it == by_objid_.end() || rows_[*it].objID != objID) return nullptr;
  return &rows_[*it];
}

const PhotoObj* PhotoTable::find(std::int32_t run, std::int32_t camcol, std::int32_t field, std::int32_t obj) const {
  const auto key = std::tie(run, camcol, field, obj);
  const auto it = std::lower_bound(by_rcfo_.begin(), by_rcfo_.end(), key, [&](std::uint32_t r, const auto& k) {
    const auto& x = rows_[r];
    return std::tie(x.run, x.camcol, x.field, x.obj) < k;
  });
  if (it == by_rcfo_.end()) return nullptr;
  const auto& x = rows_[*it];
  return std::tie(x.run, x.camcol, x.field, x.obj) == key ? &x : nullptr;
}

std::vector<const PhotoObj*> PhotoTable::htm_lookup(std::span<const TrixelRange> ranges, ScanStats* stats) const {
  std::vector<const PhotoObj*> out;
  for (const auto& range : ranges) {
    const std::uint64_t lo = subtree_range(range.start, kMaxHtmDepth).start.id();
    const std::uint64_t hi = subtree_range(range.end, kMaxHtmDepth).end.id();
    auto it = std::lower_bound(htm_keys_.begin(), htm_keys_.end(), lo);
    for (; it != htm_keys_.end() && *it <= hi; ++it) {
      out.push_back(&rows_[htm_rows_[static_cast<std::size_t>(it - htm_keys_.begin())]]);
    }
  }
  if (stats) {
    stats->rows_scanned += out.size();
    stats->index_used = true;
  }
  return out;
}

std::vector<const PhotoObj*> PhotoTable::scan(PhotoView view, const PhotoPredicate& pred, ScanStats* stats,
                                              unsigned threads) const {
  const std::size_t n = rows_.size();
  const auto run = [&](std::size_t lo, std::size_t hi, std::vector<const PhotoObj*>& out) {
    for (std::size_t k = lo; k < hi; ++k) {
      if (in_view(view, rows_[k]) && pred(rows_[k])) out.push_back(&rows_[k]);
    }
  };
  std::vector<const PhotoObj*> out;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 10000 + 1)));
  if (threads == 1) {
    run(0, n, out);
  } else {
    std::vector<std::vector<const PhotoObj*>> parts(threads);
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back(run, n * t / threads, n * (t + 1) / threads, std::ref(parts[t]));
    }
    for (auto& w : workers) w.join();
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  }
  if (stats) stats->rows_scanned += n;
  return out;
}

SpecTable::SpecTable(std::vector<SpecObj> rows) : rows_(std::move(rows)) {
  by_id_.reserve(rows_.size());
  for (std::uint32_t k = 0; k < rows_.size(); ++k) by_id_.emplace(rows_[k].specObjID, k);
}

const SpecObj* SpecTable::find(std::int64_t specObjID) const {
  const auto it = by_id_.find(specObjID);
  return it == by_id_.end() ? nullptr : &rows_[it->second];
}

LineTable::LineTable(std::vector<SpecLine> rows) : rows_(std::move(rows)) {
  by_spec_.resize(rows_.size());
  std::iota(by_spec_.begin(), by_spec_.end(), 0u);
  std::stable_sort(by_spec_.begin(), by_spec_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return rows_[a].specObjID < rows_[b].specObjID; });
}

std::vector<const SpecLine*> LineTable::lines_of(std::int64_t specObjID) const {
  auto it = std::lower_bound(by_spec_.begin(), by_spec_.end(), specObjID,
                             [&](std::uint32_t r, std::int64_t id) { return rows_[r].specObjID < id; });
  std::vector<const SpecLine*> out;
  for (; it != by_spec_.end() && rows_[*it].specObjID == specObjID; ++it) out.push_back(&rows_[*it]);
  return out;
}

FieldTable::FieldTable(std::vector<Field> rows) : rows_(std::move(rows)) {
  by_id_.reserve(rows_.size());
  for (std::uint32_t k = 0; k < rows_.size(); ++k) by_id_.emplace(rows_[k].fieldID, k);
}

const Field* FieldTable::find(std::int64_t fieldID) const {
  const auto it = by_id_.find(fieldID);
  return it == by_id_.end() ? nullptr : &rows_[it->second];
}

NeighborTable::NeighborTable(std::vector<Neighbor> rows, double radius_arcmin)
    : rows_(std::move(rows)), radius_(radius_arcmin) {
  std::sort(rows_.begin(), rows_.end(), [](const Neighbor& a, const Neighbor& b) {
    return std::tie(a.objID, a.distanceMins, a.neighborObjID) < std::tie(b.objID, b.distanceMins, b.neighborObjID);
  });
}

std::span<const Neighbor> NeighborTable::of(std::int64_t objID) const {
  const auto lo = std::lower_bound(rows_.begin(), rows_.end(), objID,
                                   [](const Neighbor& n, std::int64_t id) { return n.objID < id; });
  auto hi = lo;
  while (hi != rows_.end() && hi->objID == objID) ++hi;
  return {lo, hi};
}

const NeighborTable& Catalog::require_neighbors() const {
  if (!neighbors) throw MissingTable("neighbors table has not been built (run build-neighbors)");
  return *neighbors;
}

// ---------------------------------------------------------------------------

std::variant<PhotoView, SpecView> parse_view(std::string_view name) {
  const std::string key = upper(name);
  for (auto v : {PhotoView::PhotoObj, PhotoView::PhotoPrimary, PhotoView::PhotoSecondary, PhotoView::PhotoFamily,
                 PhotoView::Sky, PhotoView::Unknown, PhotoView::Star, PhotoView::Galaxy}) {
    if (key == upper(to_string(v))) return v;
  }
  if (key == "SPECOBJ") return SpecView::SpecObj;
  if (key == "SPECOBJ-PRIMARY" || key == "SPECOBJPRIMARY" || key == "SPECOBJ_PRIMARY") return SpecView::SpecObjPrimary;
  throw std::invalid_argument("unknown view '" + std::string(name) + "'");
}

std::vector<const SpecObj*> spec_primary(const SpecTable& spec) {
  std::unordered_map<std::int64_t, const SpecObj*> best;
  for (const auto& s : spec.rows()) {
    if (s.objID == 0) continue;
    auto [it, fresh] = best.emplace(s.objID, &s);
    if (fresh) continue;
    const SpecObj* cur = it->second;
    if (s.zConf > cur->zConf || (s.zConf == cur->zConf && s.specObjID < cur->specObjID)) it->second = &s;
  }
  std::vector<const SpecObj*> out;
  for (const auto& s : spec.rows()) {
    if (s.objID == 0 || best.at(s.objID) == &s) out.push_back(&s);
  }
  return out;
}

ViewPredicate view_predicate(std::string_view name, const SpecTable& spec) {
  const auto v = parse_view(name);
  if (const auto* pv = std::get_if<PhotoView>(&v)) {
    const PhotoView view = *pv;
    return PhotoPredicate([view](const PhotoObj& o) { return in_view(view, o); });
  }
  if (std::get<SpecView>(v) == SpecView::SpecObj) return SpecPredicate([](const SpecObj&) { return true; });
  auto keep = std::make_shared<std::unordered_map<std::int64_t, bool>>();
  for (const SpecObj* s : spec_primary(spec)) (*keep)[s->specObjID] = true;
  return SpecPredicate([keep](const SpecObj& s) { return keep->count(s.specObjID) != 0; });
}

// ---------------------------------------------------------------------------

template <class Row>
std::string csv_header(std::span<const Column<Row>> cols, SeqColumn seq) {
  std::string out;
  for (const auto& c : cols) {
    if (!out.empty()) out += ',';
    out += c.name;
  }
  if constexpr (has_load_seq<Row>) {
    if (seq == SeqColumn::Include) out += ",load_seq";
  }
  return out;
}

template <class Row>
std::string csv_line(std::span<const Column<Row>> cols, const Row& row, SeqColumn seq) {
  std::string out;
  out.reserve(cols.size() * 12);
  bool first = true;
  for (const auto& c : cols) {
    if (!first) out += ',';
    first = false;
    std::visit([&](auto m) { append_number(out, row.*m); }, c.member);
  }
  if constexpr (has_load_seq<Row>) {
    if (seq == SeqColumn::Include) {
      out += ',';
      append_number(out, row.load_seq);
    }
  }
  return out;
}

template <class Row>
CsvReader<Row>::CsvReader(std::span<const Column<Row>> cols, std::string_view header, SeqColumn seq)
    : cols_(cols), seq_(seq == SeqColumn::Include) {
  std::vector<bool> seen(cols.size(), false);
  bool seen_seq = false;
  std::size_t pos = 0;
  while (pos <= header.size()) {
    const std::size_t comma = std::min(header.find(',', pos), header.size());
    std::string_view name = header.substr(pos, comma - pos);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
    int idx = -2;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (name == cols[k].name) idx = static_cast<int>(k);
    }
    if (idx == -2 && seq_ && name == "load_seq") {
      idx = -1;
      seen_seq = true;
    }
    if (idx == -2) throw CsvError("unknown column '" + std::string(name) + "'");
    if (idx >= 0) {
      if (seen[static_cast<std::size_t>(idx)]) throw CsvError("duplicate column '" + std::string(name) + "'");
      seen[static_cast<std::size_t>(idx)] = true;
    }
    order_.push_back(idx);
    pos = comma + 1;
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (!seen[k]) throw CsvError(std::string("missing column '") + cols[k].name + "'");
  }
  if (seq_ && !seen_seq) throw CsvError("missing column 'load_seq'");
}

template <class Row>
Row CsvReader<Row>::parse(std::string_view line) const {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Row row{};
  std::size_t pos = 0;
  std::size_t field = 0;
  while (true) {
    const std::size_t comma = std::min(line.find(',', pos), line.size());
    if (field >= order_.size()) throw CsvError("too many fields");
    std::string_view tok = line.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    const int idx = order_[field];
    if (idx < 0) {
      if constexpr (has_load_seq<Row>) row.load_seq = parse_number<std::uint64_t>(tok, "load_seq");
    } else {
      const auto& c = cols_[static_cast<std::size_t>(idx)];
      std::visit(
          [&](auto m) {
            using T = std::remove_reference_t<decltype(row.*m)>;
            row.*m = parse_number<T>(tok, c.name);
          },
          c.member);
    }
    ++field;
    if (comma >= line.size()) break;
    pos = comma + 1;
  }
  if (field != order_.size()) {
    throw CsvError("expected " + std::to_string(order_.size()) + " fields, found " + std::to_string(field));
  }
  return row;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

template <class Row>
std::uint64_t table_checksum(std::span<const Column<Row>> cols, std::span<const Row> rows) {
  std::uint64_t sum = 0;
  for (const auto& r : rows) sum += fnv1a(csv_line(cols, r, SeqColumn::Omit));
  return sum;
}

#define SKY_INSTANTIATE(Row)                                                                       \
  template std::string csv_header<Row>(std::span<const Column<Row>>, SeqColumn);                   \
  template std::string csv_line<Row>(std::span<const Column<Row>>, const Row&, SeqColumn);         \
  template class CsvReader<Row>;                                                                   \
  template std::uint64_t table_checksum<Row>(std::span<const Column<Row>>, std::span<const Row>);

SKY_INSTANTIATE(PhotoObj)
SKY_INSTANTIATE(SpecObj)
SKY_INSTANTIATE(SpecLine)
SKY_INSTANTIATE(Field)
SKY_INSTANTIATE(Neighbor)

#undef SKY_INSTANTIATE

}  // namespace sky
