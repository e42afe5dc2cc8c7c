#include "skyserver/loader.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "skyserver/dictionary.hpp"
#include "skyserver/geometry.hpp"
#include "skyserver/htm.hpp"

namespace sky {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

constexpr TableId kTables[] = {TableId::PhotoObj, TableId::SpecObj, TableId::SpecLine, TableId::Field};
constexpr LoadStatus kStatuses[] = {LoadStatus::OK, LoadStatus::FAILED, LoadStatus::UNDONE};

bool known(DictKind kind, std::int64_t v) {
  return v >= 0 && Dictionary::builtin().name_of(kind, static_cast<std::uint64_t>(v)).has_value();
}

// Row checks beyond what the CSV codec enforces. Return an empty string when
// the row is acceptable.
std::string validate(const PhotoObj& o, const Catalog& cat, const std::unordered_set<std::int64_t>& batch) {
  if (cat.photo->find(o.objID) || batch.count(o.objID)) return "duplicate objID " + std::to_string(o.objID);
  if (!cat.fields->find(o.fieldID)) return "dangling fieldID " + std::to_string(o.fieldID);
  if (o.ra < 0.0 || o.ra >= 360.0) return "ra out of range";
  if (o.dec < -90.0 || o.dec > 90.0) return "dec out of range";
  if (!known(DictKind::PhotoType, o.type)) return "unknown type " + std::to_string(o.type);
  if (o.parentID < 0) return "negative parentID";
  const UnitVector p = eq_to_xyz(o.ra, o.dec);
  if (std::abs(p.x() - o.cx) > 1e-9 || std::abs(p.y() - o.cy) > 1e-9 || std::abs(p.z() - o.cz) > 1e-9) {
    return "cx,cy,cz disagree with ra,dec";
  }
  if (locate(p, 20).id() != o.htmID) return "htmID disagrees with ra,dec";
  return {};
}

std::string validate(const SpecObj& s, const Catalog& cat, const std::unordered_set<std::int64_t>& batch) {
  if (cat.spec->find(s.specObjID) || batch.count(s.specObjID)) {
    return "duplicate specObjID " + std::to_string(s.specObjID);
  }
  if (s.objID != 0 && !cat.photo->find(s.objID)) return "dangling objID " + std::to_string(s.objID);
  if (!known(DictKind::SpecClass, s.specClass)) return "unknown specClass " + std::to_string(s.specClass);
  if (s.zConf < 0.0 || s.zConf > 1.0) return "zConf outside [0, 1]";
  return {};
}

std::string validate(const SpecLine& l, const Catalog& cat, const std::unordered_set<std::int64_t>&) {
  if (!cat.spec->find(l.specObjID)) return "dangling specObjID " + std::to_string(l.specObjID);
  if (!known(DictKind::SpecLineName, l.lineID)) return "unknown lineID " + std::to_string(l.lineID);
  if (l.wave <= 0.0) return "wave must be positive";
  if (l.sigma < 0.0) return "negative sigma";
  return {};
}

std::string validate(const Field& f, const Catalog& cat, const std::unordered_set<std::int64_t>& batch) {
  if (cat.fields->find(f.fieldID) || batch.count(f.fieldID)) return "duplicate fieldID " + std::to_string(f.fieldID);
  if (f.run < 0 || f.camcol < 1 || f.camcol > 6 || f.field < 0) return "run, camcol or field out of range";
  return {};
}

std::int64_t key_of(const PhotoObj& o) { return o.objID; }
std::int64_t key_of(const SpecObj& s) { return s.specObjID; }
std::int64_t key_of(const SpecLine&) { return 0; }
std::int64_t key_of(const Field& f) { return f.fieldID; }

std::span<const Column<PhotoObj>> columns_of(const PhotoObj*) { return photo_columns(); }
std::span<const Column<SpecObj>> columns_of(const SpecObj*) { return spec_columns(); }
std::span<const Column<SpecLine>> columns_of(const SpecLine*) { return line_columns(); }
std::span<const Column<Field>> columns_of(const Field*) { return field_columns(); }

template <class Row>
std::vector<Row> rows_of(const Catalog& cat) {
  std::span<const Row> rows;
  if constexpr (std::is_same_v<Row, PhotoObj>) rows = cat.photo->rows();
  if constexpr (std::is_same_v<Row, SpecObj>) rows = cat.spec->rows();
  if constexpr (std::is_same_v<Row, SpecLine>) rows = cat.lines->rows();
  if constexpr (std::is_same_v<Row, Field>) rows = cat.fields->rows();
  return {rows.begin(), rows.end()};
}

// Replaces one table in a copy of `cat`. A new photo table drops neighbors.
template <class Row>
Catalog with_rows(const Catalog& cat, std::vector<Row> rows) {
  Catalog next = cat;
  if constexpr (std::is_same_v<Row, PhotoObj>) {
    next.photo = std::make_shared<const PhotoTable>(std::move(rows));
    next.neighbors.reset();
  }
  if constexpr (std::is_same_v<Row, SpecObj>) next.spec = std::make_shared<const SpecTable>(std::move(rows));
  if constexpr (std::is_same_v<Row, SpecLine>) next.lines = std::make_shared<const LineTable>(std::move(rows));
  if constexpr (std::is_same_v<Row, Field>) next.fields = std::make_shared<const FieldTable>(std::move(rows));
  return next;
}

struct StepResult {
  std::shared_ptr<const Catalog> next;  // null when nothing was inserted
  std::uint64_t source = 0, inserted = 0;
  std::string trace;
  bool failed = false;
};

template <class Row>
StepResult run_step(const Catalog& cat, std::istream& in, std::uint64_t first_seq) {
  StepResult res;
  std::ostringstream trace;
  const auto cols = columns_of(static_cast<const Row*>(nullptr));

  std::string line;
  std::size_t lineno = 0;
  std::optional<CsvReader<Row>> reader;
  std::string header_error;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      reader.emplace(cols, line, SeqColumn::Omit);
    } catch (const CsvError& e) {
      header_error = e.what();
    }
    break;
  }

  std::vector<Row> staged;
  std::unordered_set<std::int64_t> batch_keys;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++res.source;
    if (!reader) continue;
    try {
      Row row = reader->parse(line);
      if (std::string why = validate(row, cat, batch_keys); !why.empty()) {
        trace << "line " << lineno << ": " << why << '\n';
        continue;
      }
      row.load_seq = first_seq + staged.size();
      batch_keys.insert(key_of(row));
      staged.push_back(row);
    } catch (const CsvError& e) {
      trace << "line " << lineno << ": " << e.what() << '\n';
    }
  }
  if (in.bad()) throw LoadError("read error");

  if (!reader) {
    trace << "line 1: " << (header_error.empty() ? std::string("missing header") : header_error) << '\n';
  }
  res.inserted = staged.size();
  res.failed = res.inserted != res.source || !reader;
  trace << "inserted " << res.inserted << " of " << res.source << " rows\n";
  res.trace = trace.str();

  if (!staged.empty()) {
    std::vector<Row> rows = rows_of<Row>(cat);
    rows.insert(rows.end(), staged.begin(), staged.end());
    res.next = std::make_shared<const Catalog>(with_rows(cat, std::move(rows)));
  }
  return res;
}

template <class Row>
std::pair<std::shared_ptr<const Catalog>, std::uint64_t> remove_seq(const Catalog& cat, std::uint64_t lo,
                                                                    std::uint64_t hi) {
  std::vector<Row> rows = rows_of<Row>(cat);
  const auto before = rows.size();
  std::erase_if(rows, [&](const Row& r) { return r.load_seq >= lo && r.load_seq <= hi; });
  const std::uint64_t removed = before - rows.size();
  if (removed == 0) return {nullptr, 0};
  return {std::make_shared<const Catalog>(with_rows(cat, std::move(rows))), removed};
}

// Persistence helpers.

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw LoadError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

template <class Row>
std::string dump_csv(std::span<const Column<Row>> cols, std::span<const Row> rows, SeqColumn seq) {
  std::string out = csv_header(cols, seq) + '\n';
  for (const Row& r : rows) {
    out += csv_line(cols, r, seq);
    out += '\n';
  }
  return out;
}

template <class Row>
std::vector<Row> read_csv_file(const std::filesystem::path& path, std::span<const Column<Row>> cols, SeqColumn seq) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  const CsvReader<Row> reader(cols, line, seq);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(reader.parse(line));
  }
  return rows;
}

constexpr const char* kPhotoFile = "photoObj.csv";
constexpr const char* kSpecFile = "specObj.csv";
constexpr const char* kLineFile = "specLine.csv";
constexpr const char* kFieldFile = "field.csv";
constexpr const char* kNeighborFile = "neighbors.csv";
constexpr const char* kJournalFile = "loadEvents.json";

}  // namespace

std::string_view to_string(TableId t) {
  switch (t) {
    case TableId::PhotoObj: return "PhotoObj";
    case TableId::SpecObj: return "SpecObj";
    case TableId::SpecLine: return "SpecLine";
    case TableId::Field: return "Field";
  }
  return "?";
}

std::string_view to_string(LoadStatus s) {
  switch (s) {
    case LoadStatus::OK: return "OK";
    case LoadStatus::FAILED: return "FAILED";
    case LoadStatus::UNDONE: return "UNDONE";
  }
  return "?";
}

TableId table_from_string(std::string_view s) {
  for (TableId t : kTables) {
    if (iequals(s, to_string(t))) return t;
  }
  throw LoadError("unknown table: " + std::string(s));
}

LoadStatus status_from_string(std::string_view s) {
  for (LoadStatus st : kStatuses) {
    if (iequals(s, to_string(st))) return st;
  }
  throw LoadError("unknown status: " + std::string(s));
}

Store::Store() : current_(std::make_shared<const Catalog>()) {}
Store::Store(Catalog initial) : current_(std::make_shared<const Catalog>(std::move(initial))) {}

Store::WriteLock Store::lock() { return WriteLock(write_mu_); }

std::shared_ptr<const Catalog> Store::snapshot() const {
  std::lock_guard g(state_mu_);
  return current_;
}

void Store::check(const WriteLock& lock) const {
  if (!lock.owns_lock() || lock.mutex() != &write_mu_) throw LoadError("write lock not held");
}

void Store::publish(std::shared_ptr<const Catalog> next) {
  std::lock_guard g(state_mu_);
  if (next->photo != current_->photo && current_->neighbors) neighbors_stale_ = true;
  current_ = std::move(next);
}

LoadEvent Store::load_step(const WriteLock& lock, TableId table, std::istream& csv) {
  check(lock);
  if (!csv) throw LoadError("unreadable source");
  const auto cat = snapshot();
  StepResult res;
  switch (table) {
    case TableId::PhotoObj: res = run_step<PhotoObj>(*cat, csv, next_seq_); break;
    case TableId::SpecObj: res = run_step<SpecObj>(*cat, csv, next_seq_); break;
    case TableId::SpecLine: res = run_step<SpecLine>(*cat, csv, next_seq_); break;
    case TableId::Field: res = run_step<Field>(*cat, csv, next_seq_); break;
  }

  LoadEvent ev;
  ev.table = table;
  ev.seq_start = next_seq_;
  ev.seq_stop = next_seq_ + std::max<std::uint64_t>(res.inserted, 1) - 1;
  ev.sourceRows = res.source;
  ev.insertedRows = res.inserted;
  ev.status = res.failed ? LoadStatus::FAILED : LoadStatus::OK;
  ev.trace = std::move(res.trace);

  if (res.next) publish(std::move(res.next));
  std::lock_guard g(state_mu_);
  ev.eventID = next_event_++;
  next_seq_ = ev.seq_stop + 1;
  events_.push_back(ev);
  return ev;
}

LoadEvent Store::load_step(const WriteLock& lock, TableId table, const std::filesystem::path& csv_path) {
  check(lock);
  std::ifstream in(csv_path);
  if (!in) throw LoadError("unreadable source: " + csv_path.string());
  LoadEvent ev = load_step(lock, table, in);
  auto trace_path = csv_path;
  trace_path += ".trace.txt";
  std::ofstream out(trace_path, std::ios::trunc);
  out << "event " << ev.eventID << " " << to_string(ev.table) << " " << to_string(ev.status) << '\n' << ev.trace;
  return ev;
}

std::uint64_t Store::undo(const WriteLock& lock, std::uint64_t eventID) {
  check(lock);
  LoadEvent ev;
  {
    std::lock_guard g(state_mu_);
    auto it = std::find_if(events_.begin(), events_.end(), [&](const LoadEvent& e) { return e.eventID == eventID; });
    if (it == events_.end()) throw LoadError("unknown event " + std::to_string(eventID));
    if (it->status == LoadStatus::UNDONE) throw LoadError("event " + std::to_string(eventID) + " already undone");
    ev = *it;
  }
  const auto cat = snapshot();
  std::pair<std::shared_ptr<const Catalog>, std::uint64_t> res;
  switch (ev.table) {
    case TableId::PhotoObj: res = remove_seq<PhotoObj>(*cat, ev.seq_start, ev.seq_stop); break;
    case TableId::SpecObj: res = remove_seq<SpecObj>(*cat, ev.seq_start, ev.seq_stop); break;
    case TableId::SpecLine: res = remove_seq<SpecLine>(*cat, ev.seq_start, ev.seq_stop); break;
    case TableId::Field: res = remove_seq<Field>(*cat, ev.seq_start, ev.seq_stop); break;
  }
  if (res.first) publish(std::move(res.first));
  std::lock_guard g(state_mu_);
  for (auto& e : events_) {
    if (e.eventID == eventID) e.status = LoadStatus::UNDONE;
  }
  return res.second;
}

std::vector<LoadEvent> Store::list_events(const EventFilter& filter) const {
  std::lock_guard g(state_mu_);
  std::vector<LoadEvent> out;
  for (const auto& e : events_) {
    if (filter.table && e.table != *filter.table) continue;
    if (filter.status && e.status != *filter.status) continue;
    out.push_back(e);
  }
  return out;
}

void Store::set_neighbors(const WriteLock& lock, std::shared_ptr<const NeighborTable> table) {
  check(lock);
  std::lock_guard g(state_mu_);
  auto next = std::make_shared<Catalog>(*current_);
  next->neighbors = std::move(table);
  current_ = std::move(next);
  neighbors_stale_ = false;
}

bool Store::neighbors_stale() const {
  std::lock_guard g(state_mu_);
  return neighbors_stale_;
}

void Store::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::shared_ptr<const Catalog> cat;
  nlohmann::json journal;
  {
    std::lock_guard g(state_mu_);
    cat = current_;
    journal["next_seq"] = next_seq_;
    journal["next_event"] = next_event_;
    journal["neighbors_stale"] = neighbors_stale_;
    journal["events"] = nlohmann::json::array();
    for (const auto& e : events_) {
      journal["events"].push_back({{"eventID", e.eventID},
                                   {"table", to_string(e.table)},
                                   {"seq_start", e.seq_start},
                                   {"seq_stop", e.seq_stop},
                                   {"sourceRows", e.sourceRows},
                                   {"insertedRows", e.insertedRows},
                                   {"status", to_string(e.status)},
                                   {"trace", e.trace}});
    }
  }
  write_atomic(dir / kFieldFile, dump_csv(field_columns(), cat->fields->rows(), SeqColumn::Include));
  write_atomic(dir / kPhotoFile, dump_csv(photo_columns(), cat->photo->rows(), SeqColumn::Include));
  write_atomic(dir / kSpecFile, dump_csv(spec_columns(), cat->spec->rows(), SeqColumn::Include));
  write_atomic(dir / kLineFile, dump_csv(line_columns(), cat->lines->rows(), SeqColumn::Include));
  if (cat->neighbors) {
    journal["neighbor_radius"] = cat->neighbors->radius_arcmin();
    write_atomic(dir / kNeighborFile, dump_csv(neighbor_columns(), cat->neighbors->rows(), SeqColumn::Omit));
  } else {
    std::filesystem::remove(dir / kNeighborFile);
  }
  write_atomic(dir / kJournalFile, journal.dump(2) + '\n');
}

std::unique_ptr<Store> Store::open(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / kJournalFile)) return std::make_unique<Store>();
  std::ifstream jin(dir / kJournalFile);
  nlohmann::json journal;
  try {
    jin >> journal;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("corrupt journal: " + std::string(e.what()));
  }

  Catalog cat;
  cat.fields = std::make_shared<const FieldTable>(read_csv_file(dir / kFieldFile, field_columns(), SeqColumn::Include));
  cat.photo = std::make_shared<const PhotoTable>(read_csv_file(dir / kPhotoFile, photo_columns(), SeqColumn::Include));
  cat.spec = std::make_shared<const SpecTable>(read_csv_file(dir / kSpecFile, spec_columns(), SeqColumn::Include));
  cat.lines = std::make_shared<const LineTable>(read_csv_file(dir / kLineFile, line_columns(), SeqColumn::Include));
  if (std::filesystem::exists(dir / kNeighborFile)) {
    cat.neighbors = std::make_shared<const NeighborTable>(
        read_csv_file(dir / kNeighborFile, neighbor_columns(), SeqColumn::Omit),
        journal.value("neighbor_radius", 0.5));
  }

  auto store = std::make_unique<Store>(std::move(cat));
  store->next_seq_ = journal.at("next_seq").get<std::uint64_t>();
  store->next_event_ = journal.at("next_event").get<std::uint64_t>();
  store->neighbors_stale_ = journal.value("neighbors_stale", false);
  for (const auto& j : journal.at("events")) {
    LoadEvent e;
    e.eventID = j.at("eventID").get<std::uint64_t>();
    e.table = table_from_string(j.at("table").get<std::string>());
    e.seq_start = j.at("seq_start").get<std::uint64_t>();
    e.seq_stop = j.at("seq_stop").get<std::uint64_t>();
    e.sourceRows = j.at("sourceRows").get<std::uint64_t>();
    e.insertedRows = j.at("insertedRows").get<std::uint64_t>();
    e.status = status_from_string(j.at("status").get<std::string>());
    e.trace = j.at("trace").get<std::string>();
    store->events_.push_back(std::move(e));
  }
  return store;
}

}  // namespace sky
