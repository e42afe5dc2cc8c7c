#pragma once

// Batch CSV ingestion with a load-event journal and undo. Every inserted row
// carries the load sequence number assigned by its step; undo deletes the
// step's closed sequence interval. Readers take immutable snapshots, so they
// see either the state before a step or after it, never a partial step.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skyserver/catalog.hpp"

namespace sky {

enum class TableId { PhotoObj, SpecObj, SpecLine, Field };
enum class LoadStatus { OK, FAILED, UNDONE };

std::string_view to_string(TableId t);
std::string_view to_string(LoadStatus s);
/// Case-insensitive. Throws LoadError for an unknown name.
TableId table_from_string(std::string_view s);
LoadStatus status_from_string(std::string_view s);

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadEvent {
  std::uint64_t eventID = 0;
  TableId table = TableId::PhotoObj;
  std::uint64_t seq_start = 0, seq_stop = 0;
  std::uint64_t sourceRows = 0, insertedRows = 0;
  LoadStatus status = LoadStatus::OK;
  std::string trace;

  bool operator==(const LoadEvent&) const = default;
};

struct EventFilter {
  std::optional<TableId> table;
  std::optional<LoadStatus> status;
};

class Store {
 public:
  using WriteLock = std::unique_lock<std::mutex>;

  Store();
  explicit Store(Catalog initial);
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// The single-writer lock that load_step, undo and set_neighbors require.
  WriteLock lock();

  std::shared_ptr<const Catalog> snapshot() const;

  /// Validates and inserts every acceptable row of `csv` into `table`. Each
  /// rejected row adds "line N: reason" to the trace and makes the event
  /// FAILED; accepted rows stay. A step with no accepted rows still consumes
  /// one sequence number. Throws LoadError when the lock is not held or the
  /// stream is unreadable.
  LoadEvent load_step(const WriteLock& lock, TableId table, std::istream& csv);
  /// As above, reading `csv_path` and writing the trace to
  /// `<csv_path>.trace.txt`.
  LoadEvent load_step(const WriteLock& lock, TableId table, const std::filesystem::path& csv_path);

  /// Deletes the rows of an event and marks it UNDONE. Returns the number
  /// of deleted rows. Throws LoadError for an unknown or already undone
  /// event.
  std::uint64_t undo(const WriteLock& lock, std::uint64_t eventID);

  std::vector<LoadEvent> list_events(const EventFilter& filter = {}) const;

  /// Publishes a neighbor table built from the current photo table.
  void set_neighbors(const WriteLock& lock, std::shared_ptr<const NeighborTable> table);
  /// True once the photo table has changed after neighbors were built.
  bool neighbors_stale() const;

  /// CSV snapshots of every table (with load_seq) plus the journal in
  /// store.json. Files are replaced atomically.
  void save(const std::filesystem::path& dir) const;
  /// Reads a directory written by save(); a missing directory gives an
  /// empty store.
  static std::unique_ptr<Store> open(const std::filesystem::path& dir);

 private:
  void check(const WriteLock& lock) const;
  void publish(std::shared_ptr<const Catalog> next);

  mutable std::mutex state_mu_;  // guards current_, events_ and the flags
  std::shared_ptr<const Catalog> current_;
  std::vector<LoadEvent> events_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t next_event_ = 1;
  bool neighbors_stale_ = false;

  std::mutex write_mu_;
};

}  // namespace sky
