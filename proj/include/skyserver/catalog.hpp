#pragma once

// In-memory star schema: PhotoObj at the center, SpecObj/SpecLine for
// spectra, Field for referential integrity, and the derived neighbor table.
// Tables are immutable once built; a Catalog is a set of shared table
// pointers, so publishing a modified catalog copies only what changed.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "skyserver/htm.hpp"

namespace sky {

struct PhotoObj {
  std::int64_t objID = 0;
  std::int32_t run = 0, camcol = 0, field = 0, obj = 0;
  std::int32_t type = 0;
  std::uint64_t flags = 0;
  std::int64_t parentID = 0;
  double ra = 0, dec = 0;
  double cx = 0, cy = 0, cz = 1;
  std::uint64_t htmID = 0;
  double u = 0, g = 0, r = 0, i = 0, z = 0;
  double err_u = 0, err_g = 0, err_r = 0, err_i = 0, err_z = 0;
  double psfMag_u = 0, psfMag_g = 0, psfMag_r = 0, psfMag_i = 0, psfMag_z = 0;
  double petroMag_u = 0, petroMag_g = 0, petroMag_r = 0, petroMag_i = 0, petroMag_z = 0;
  double fiberMag_u = 0, fiberMag_g = 0, fiberMag_r = 0, fiberMag_i = 0, fiberMag_z = 0;
  double petroRad_r = 0, petroR50_r = 0;
  double reddening_u = 0, reddening_g = 0, reddening_r = 0, reddening_i = 0, reddening_z = 0;
  double rho = 0;
  double isoA_r = 0, isoB_r = 0, isoA_g = 0, isoB_g = 0;
  double q_r = 0, u_r = 0, q_g = 0, u_g = 0;
  double lDev_r = 0, lExp_r = 0;
  double rowv = 0, colv = 0, rowvErr = 0, colvErr = 0;
  double colc_u = 0, colc_g = 0, colc_r = 0;
  double photoZ = 0;
  std::int64_t fieldID = 0;
  std::uint64_t load_seq = 0;

  bool operator==(const PhotoObj&) const = default;
};

struct SpecObj {
  std::int64_t specObjID = 0;
  std::int64_t objID = 0;  // 0 when unmatched
  std::int32_t specClass = 0;
  double z = 0, zConf = 0;
  std::int32_t xcTempNo = 0;  // best cross-correlation template
  std::uint64_t load_seq = 0;

  bool operator==(const SpecObj&) const = default;
};

struct SpecLine {
  std::int64_t specObjID = 0;
  std::int32_t lineID = 0;
  double wave = 0, sigma = 0, ew = 0;
  std::uint64_t load_seq = 0;

  bool operator==(const SpecLine&) const = default;
};

struct Field {
  std::int64_t fieldID = 0;
  std::int32_t run = 0, camcol = 0, field = 0;
  std::uint64_t load_seq = 0;

  bool operator==(const Field&) const = default;
};

struct Neighbor {
  std::int64_t objID = 0, neighborObjID = 0;
  double distanceMins = 0;
  std::int32_t neighborObjType = 0;

  bool operator==(const Neighbor&) const = default;
};

/// The identifier SDSS uses for a field.
constexpr std::int64_t make_field_id(std::int32_t run, std::int32_t camcol, std::int32_t field) {
  return static_cast<std::int64_t>(run) * 100000 + camcol * 10000 + field;
}

// ---------------------------------------------------------------------------
// Column descriptors, used by the CSV codecs and checksums.

template <class Row>
struct Column {
  const char* name;
  std::variant<std::int32_t Row::*, std::int64_t Row::*, std::uint64_t Row::*, double Row::*> member;
};

std::span<const Column<PhotoObj>> photo_columns();
std::span<const Column<SpecObj>> spec_columns();
std::span<const Column<SpecLine>> line_columns();
std::span<const Column<Field>> field_columns();
std::span<const Column<Neighbor>> neighbor_columns();

/// Counters reported by scans and lookups.
struct ScanStats {
  std::uint64_t rows_scanned = 0;
  bool index_used = false;

  ScanStats& operator+=(const ScanStats& o) {
    rows_scanned += o.rows_scanned;
    index_used = index_used || o.index_used;
    return *this;
  }
};

// ---------------------------------------------------------------------------

enum class PhotoView { PhotoObj, PhotoPrimary, PhotoSecondary, PhotoFamily, Sky, Unknown, Star, Galaxy };

using PhotoPredicate = std::function<bool(const PhotoObj&)>;

bool in_view(PhotoView v, const PhotoObj& o);
std::string_view to_string(PhotoView v);

/// Narrow copy of the columns most scans touch.
struct UgrizRow {
  double u, g, r, i, z;
  std::uint64_t flags;
  std::int32_t type;
  std::uint32_t row;
};

class PhotoTable {
 public:
  PhotoTable() = default;
  /// Takes ownership of `rows` and builds every index.
  explicit PhotoTable(std::vector<PhotoObj> rows);

  std::span<const PhotoObj> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const PhotoObj& operator[](std::size_t i) const { return rows_[i]; }

  const PhotoObj* find(std::int64_t objID) const;
  const PhotoObj* find(std::int32_t run, std::int32_t camcol, std::int32_t field, std::int32_t obj) const;

  /// Rows whose htmID lies in some range, via the sorted htmID index, in
  /// htmID order. Shallower ranges are lifted to depth 20.
  std::vector<const PhotoObj*> htm_lookup(std::span<const TrixelRange> ranges, ScanStats* stats = nullptr) const;

  /// Rows of `view` satisfying `pred`, in storage order. With threads > 1 the
  /// table is split into contiguous partitions.
  std::vector<const PhotoObj*> scan(PhotoView view, const PhotoPredicate& pred, ScanStats* stats = nullptr,
                                    unsigned threads = 1) const;

  /// Row numbers ordered by (parentID, row).
  std::span<const std::uint32_t> by_parent() const { return by_parent_; }
  /// Row numbers ordered by (run, camcol, field, obj).
  std::span<const std::uint32_t> by_run_camcol_field() const { return by_rcfo_; }
  std::span<const UgrizRow> ugriz() const { return ugriz_; }

 private:
  std::vector<PhotoObj> rows_;
  std::vector<std::uint64_t> htm_keys_;
  std::vector<std::uint32_t> htm_rows_;
  std::vector<std::uint32_t> by_objid_;
  std::vector<std::uint32_t> by_parent_;
  std::vector<std::uint32_t> by_rcfo_;
  std::vector<UgrizRow> ugriz_;
};

class SpecTable {
 public:
  SpecTable() = default;
  explicit SpecTable(std::vector<SpecObj> rows);

  std::span<const SpecObj> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const SpecObj* find(std::int64_t specObjID) const;

 private:
  std::vector<SpecObj> rows_;
  std::unordered_map<std::int64_t, std::uint32_t> by_id_;
};

class LineTable {
 public:
  LineTable() = default;
  explicit LineTable(std::vector<SpecLine> rows);

  std::span<const SpecLine> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  /// Lines of one spectrum, in storage order.
  std::vector<const SpecLine*> lines_of(std::int64_t specObjID) const;

 private:
  std::vector<SpecLine> rows_;
  std::vector<std::uint32_t> by_spec_;
};

class FieldTable {
 public:
  FieldTable() = default;
  explicit FieldTable(std::vector<Field> rows);

  std::span<const Field> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const Field* find(std::int64_t fieldID) const;

 private:
  std::vector<Field> rows_;
  std::unordered_map<std::int64_t, std::uint32_t> by_id_;
};

/// Ordered pairs within a fixed radius, sorted by (objID, distanceMins,
/// neighborObjID).
class NeighborTable {
 public:
  NeighborTable() = default;
  NeighborTable(std::vector<Neighbor> rows, double radius_arcmin);

  std::span<const Neighbor> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  double radius_arcmin() const { return radius_; }
  std::span<const Neighbor> of(std::int64_t objID) const;

 private:
  std::vector<Neighbor> rows_;
  double radius_ = 0.5;
};

class MissingTable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Catalog {
  std::shared_ptr<const PhotoTable> photo = std::make_shared<PhotoTable>();
  std::shared_ptr<const SpecTable> spec = std::make_shared<SpecTable>();
  std::shared_ptr<const LineTable> lines = std::make_shared<LineTable>();
  std::shared_ptr<const FieldTable> fields = std::make_shared<FieldTable>();
  /// Null until built, and reset whenever the photo table changes.
  std::shared_ptr<const NeighborTable> neighbors;

  /// Throws MissingTable when the neighbor table has not been built.
  const NeighborTable& require_neighbors() const;
};

// ---------------------------------------------------------------------------
// Views by name.

enum class SpecView { SpecObj, SpecObjPrimary };

using SpecPredicate = std::function<bool(const SpecObj&)>;
using ViewPredicate = std::variant<PhotoPredicate, SpecPredicate>;

/// Names: PhotoObj, PhotoPrimary, PhotoSecondary, PhotoFamily, Sky, Unknown,
/// Star, Galaxy, SpecObj, SpecObj-primary (case-insensitive). Throws
/// std::invalid_argument for anything else.
std::variant<PhotoView, SpecView> parse_view(std::string_view name);

/// The SpecObj-primary predicate depends on the whole spectro table, so it
/// captures `spec`.
ViewPredicate view_predicate(std::string_view name, const SpecTable& spec);

/// One spectrum per photo object: the highest zConf, ties to the smaller
/// specObjID. Unmatched spectra (objID 0) are all kept. Storage order.
std::vector<const SpecObj*> spec_primary(const SpecTable& spec);

// ---------------------------------------------------------------------------
// CSV. Header row required; comma separated; doubles in shortest
// round-trip form.

enum class SeqColumn { Omit, Include };

template <class Row>
std::string csv_header(std::span<const Column<Row>> cols, SeqColumn seq);
template <class Row>
std::string csv_line(std::span<const Column<Row>> cols, const Row& row, SeqColumn seq);

/// Row-level parse error with a human readable reason.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps header names to column positions; throws CsvError for a missing or
/// unknown column. `load_seq` is accepted only with SeqColumn::Include.
template <class Row>
class CsvReader {
 public:
  CsvReader(std::span<const Column<Row>> cols, std::string_view header, SeqColumn seq);
  /// Parses one data line. Throws CsvError (wrong field count, empty field,
  /// non-numeric or out-of-range value).
  Row parse(std::string_view line) const;

 private:
  std::span<const Column<Row>> cols_;
  std::vector<int> order_;  // header position -> column index, -1 for load_seq
  bool seq_ = false;
};

/// Order-independent table checksum: the wrapping sum of FNV-1a hashes of
/// every row's csv_line without load_seq.
template <class Row>
std::uint64_t table_checksum(std::span<const Column<Row>> cols, std::span<const Row> rows);

std::uint64_t fnv1a(std::string_view s);

}  // namespace sky
