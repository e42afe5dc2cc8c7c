// skyq: command-line front end for the catalog store.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skyserver/area.hpp"
#include "skyserver/bench.hpp"
#include "skyserver/cover.hpp"
#include "skyserver/loader.hpp"
#include "skyserver/neighbors.hpp"
#include "skyserver/queries.hpp"
#include "skyserver/synthetic.hpp"

namespace fs = std::filesystem;
using namespace sky;

namespace {

struct Global {
  std::string data_dir = "skyserver-data";
  std::uint64_t seed = 1;
  std::string format = "tsv";
  unsigned threads = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) return fmt(*d);
  return std::get<std::string>(v);
}

char separator(const Global& g) {
  if (g.format == "tsv") return '\t';
  if (g.format == "csv") return ',';
  throw UsageError("--format must be tsv or csv for this command");
}

void print_table(const Global& g, const std::vector<std::string>& columns,
                 const std::vector<std::vector<std::string>>& rows) {
  if (g.format == "json") {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
      out.push_back(obj);
    }
    std::cout << out.dump(2) << '\n';
    return;
  }
  const char sep = separator(g);
  for (std::size_t c = 0; c < columns.size(); ++c) std::cout << (c ? std::string(1, sep) : "") << columns[c];
  std::cout << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) std::cout << (c ? std::string(1, sep) : "") << row[c];
    std::cout << '\n';
  }
}

std::vector<std::string> event_row(const LoadEvent& e) {
  return {std::to_string(e.eventID),     std::string(to_string(e.table)), std::to_string(e.seq_start),
          std::to_string(e.seq_stop),    std::to_string(e.sourceRows),    std::to_string(e.insertedRows),
          std::string(to_string(e.status))};
}

const std::vector<std::string> kEventColumns = {"eventID",    "table",        "seq_start", "seq_stop",
                                                "sourceRows", "insertedRows", "status"};

void print_nearby(const Global& g, const std::vector<NearbyRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    out.push_back({std::to_string(r.objID), fmt(r.distanceMins), std::to_string(r.type), fmt(r.ra), fmt(r.dec)});
  }
  print_table(g, {"objID", "distanceMins", "type", "ra", "dec"}, out);
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError("bad number for " + what + ": " + s);
  return v;
}

int load_into(Store& store, const Global& g, TableId table, const fs::path& file) {
  auto lock = store.lock();
  const LoadEvent ev = store.load_step(lock, table, file);
  lock.unlock();
  print_table(g, kEventColumns, {event_row(ev)});
  if (ev.status == LoadStatus::FAILED) {
    std::cerr << "skyq: load FAILED: inserted " << ev.insertedRows << " of " << ev.sourceRows << " rows, see "
              << file.string() << ".trace.txt\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial catalog store: HTM index, covers, neighbor search and the query suite."};
  app.fallthrough();
  app.require_subcommand(1);
  Global g;
  app.add_option("--data-dir", g.data_dir, "Store directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for gen")->capture_default_str();
  app.add_option("--format", g.format, "tsv, csv, json, or names (cover only)")
      ->check(CLI::IsMember({"tsv", "csv", "json", "names"}))
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for scans and neighbor builds")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Write a seeded synthetic catalog as CSV");
  std::string gen_out;
  SyntheticSpec spec;
  std::string profile = "clustered";
  bool gen_load = false;
  gen->add_option("out", gen_out, "Output directory (default <data-dir>/source)");
  gen->add_option("--objects", spec.n_objects, "Number of photo objects")->capture_default_str();
  gen->add_option("--profile", profile, "clustered or uniform")
      ->check(CLI::IsMember({"clustered", "uniform"}))
      ->capture_default_str();
  gen->add_option("--clusters", spec.clusters)->capture_default_str();
  gen->add_option("--cluster-scale", spec.cluster_scale_arcmin, "Cluster sigma, arcmin")->capture_default_str();
  gen->add_option("--spectro", spec.spectro_fraction, "Fraction of objects with spectra")->capture_default_str();
  gen->add_option("--plant", spec.plant_fraction, "Fraction of planted query targets")->capture_default_str();
  gen->add_flag("--load", gen_load, "Also load the files into the store");

  // load / undo / events
  auto* load = app.add_subcommand("load", "Load one CSV file into a table");
  std::string load_table, load_file;
  load->add_option("table", load_table, "PhotoObj, SpecObj, SpecLine or Field")->required();
  load->add_option("file", load_file)->required();

  auto* undo = app.add_subcommand("undo", "Delete the rows of one load event");
  std::uint64_t undo_id = 0;
  undo->add_option("eventID", undo_id)->required();

  auto* events = app.add_subcommand("events", "List load events");
  std::string ev_table, ev_status;
  events->add_option("--table", ev_table);
  events->add_option("--status", ev_status);

  auto* build_index = app.add_subcommand("build-index", "Rebuild table indices and report their sizes");
  auto* build_nb = app.add_subcommand("build-neighbors", "Compute the neighbor table");
  double nb_radius = kNeighborRadiusArcmin;
  build_nb->add_option("--radius", nb_radius, "arcmin")->capture_default_str();

  // cover
  auto* cov = app.add_subcommand("cover", "Print the trixel ranges covering an area");
  std::string area_text;
  std::optional<int> cover_depth;
  cov->add_option("area", area_text, "e.g. \"CIRCLE J2000 12 5.5 60.2 1\"")->required();
  cov->add_option("--depth", cover_depth)->check(CLI::Range(0, 20));

  // near / nearest
  double ra = 0, dec = 0, radius = 0;
  auto* near = app.add_subcommand("near", "Objects within a radius, nearest first");
  auto* nearest = app.add_subcommand("nearest", "The nearest object within a radius");
  for (auto* sc : {near, nearest}) {
    sc->add_option("ra", ra)->required();
    sc->add_option("dec", dec)->required();
    sc->add_option("radius", radius, "arcmin")->required();
  }

  // query
  auto* query = app.add_subcommand("query", "Run one of Q1..Q20, Q10A, Q15A, Q15B");
  std::string query_id;
  std::vector<std::string> query_params;
  bool explain = false, list = false;
  query->add_option("id", query_id);
  query->add_option("--param", query_params, "k=v, repeatable");
  query->add_flag("--explain", explain, "Print rows scanned and index use to stderr as JSON");
  query->add_flag("--list", list, "List queries and their parameters");

  // bench
  auto* bench = app.add_subcommand("bench", "Time scans, cone searches and optionally the query suite");
  BenchOptions bopt;
  bench->add_option("--ra", bopt.cone_ra)->capture_default_str();
  bench->add_option("--dec", bopt.cone_dec)->capture_default_str();
  bench->add_option("--radius", bopt.cone_radius_arcmin)->capture_default_str();
  bench->add_option("--repeats", bopt.repeats)->capture_default_str();
  bench->add_flag("--queries", bopt.queries, "Include every query");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "skyq: error: " << e.what() << '\n';
    return e.get_exit_code() ? e.get_exit_code() : 2;
  }

  try {
    const fs::path dd = g.data_dir;
    if (gen->parsed()) {
      spec.seed = g.seed;
      spec.profile = profile == "uniform" ? DensityProfile::Uniform : DensityProfile::Clustered;
      const fs::path out = gen_out.empty() ? dd / "source" : fs::path(gen_out);
      write_synthetic(generate(spec), out);
      std::cout << "wrote " << spec.n_objects << " objects to " << out.string() << '\n';
      if (!gen_load) return 0;
      auto store = Store::open(dd);
      int rc = 0;
      for (auto [t, file] : {std::pair{TableId::Field, "field.csv"}, {TableId::PhotoObj, "photoObj.csv"},
                             {TableId::SpecObj, "specObj.csv"}, {TableId::SpecLine, "specLine.csv"}}) {
        rc = std::max(rc, load_into(*store, g, t, out / file));
      }
      store->save(dd);
      return rc;
    }
    if (load->parsed()) {
      auto store = Store::open(dd);
      const int rc = load_into(*store, g, table_from_string(load_table), load_file);
      store->save(dd);
      return rc;
    }
    if (undo->parsed()) {
      auto store = Store::open(dd);
      auto lock = store->lock();
      const auto n = store->undo(lock, undo_id);
      lock.unlock();
      store->save(dd);
      std::cout << "deleted " << n << " rows\n";
      return 0;
    }
    if (events->parsed()) {
      EventFilter f;
      if (!ev_table.empty()) f.table = table_from_string(ev_table);
      if (!ev_status.empty()) f.status = status_from_string(ev_status);
      std::vector<std::vector<std::string>> rows;
      for (const auto& e : Store::open(dd)->list_events(f)) rows.push_back(event_row(e));
      print_table(g, kEventColumns, rows);
      return 0;
    }
    if (build_index->parsed()) {
      const auto cat = Store::open(dd)->snapshot();
      print_table(g, {"table", "rows"},
                  {{"PhotoObj", std::to_string(cat->photo->size())},
                   {"SpecObj", std::to_string(cat->spec->size())},
                   {"SpecLine", std::to_string(cat->lines->size())},
                   {"Field", std::to_string(cat->fields->size())},
                   {"Neighbors", cat->neighbors ? std::to_string(cat->neighbors->size()) : "absent"}});
      return 0;
    }
    if (build_nb->parsed()) {
      auto store = Store::open(dd);
      auto lock = store->lock();
      auto table = build_neighbors(*store->snapshot()->photo, nb_radius, g.threads);
      const auto n = table.size();
      store->set_neighbors(lock, std::make_shared<const NeighborTable>(std::move(table)));
      lock.unlock();
      store->save(dd);
      std::cout << "neighbors: " << n << " pairs within " << fmt(nb_radius) << " arcmin\n";
      return 0;
    }
    if (cov->parsed()) {
      const Area area = parse_area(area_text);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : cover(area, cover_depth)) {
        if (g.format == "names") {
          rows.push_back({id_to_name(r.start), id_to_name(r.end)});
        } else {
          rows.push_back({std::to_string(r.start.id()), std::to_string(r.end.id())});
        }
      }
      if (g.format == "names") g.format = "tsv";
      print_table(g, {"start", "end"}, rows);
      return 0;
    }
    if (near->parsed() || nearest->parsed()) {
      const auto cat = Store::open(dd)->snapshot();
      if (near->parsed()) {
        print_nearby(g, get_nearby_obj_eq(*cat->photo, ra, dec, radius));
      } else {
        const auto hit = get_nearest_obj_eq(*cat->photo, ra, dec, radius);
        print_nearby(g, hit ? std::vector<NearbyRow>{*hit} : std::vector<NearbyRow>{});
      }
      return 0;
    }
    if (query->parsed()) {
      if (list) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& q : query_list()) {
          std::string params;
          for (const auto& [k, v] : q.defaults) params += (params.empty() ? "" : " ") + k + "=" + fmt(v);
          rows.push_back({q.id, q.summary, params});
        }
        print_table(g, {"id", "summary", "defaults"}, rows);
        return 0;
      }
      if (query_id.empty()) throw UsageError("query id required");
      QueryParams params;
      for (const auto& kv : query_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects k=v, got " + kv);
        params[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1), kv.substr(0, eq));
      }
      const auto cat = Store::open(dd)->snapshot();
      ScanStats st;
      const auto t0 = std::chrono::steady_clock::now();
      const QueryResult r = run_query(*cat, query_id, params, &st, g.threads);
      const auto t1 = std::chrono::steady_clock::now();
      std::vector<std::vector<std::string>> rows;
      for (const auto& row : r.rows) {
        std::vector<std::string> cells;
        for (const auto& v : row) cells.push_back(fmt(v));
        rows.push_back(std::move(cells));
      }
      print_table(g, r.columns, rows);
      if (explain) {
        nlohmann::json j = {{"query", query_info(query_id).id},
                            {"rows_scanned", st.rows_scanned},
                            {"index_used", st.index_used},
                            {"rows_returned", r.rowCount()},
                            {"wall_ms", std::chrono::duration<double, std::milli>(t1 - t0).count()}};
        std::cerr << j.dump() << '\n';
      }
      return 0;
    }
    if (bench->parsed()) {
      bopt.threads = g.threads;
      const BenchReport rep = run_bench(*Store::open(dd)->snapshot(), bopt);
      if (g.format == "json") {
        std::cout << rep.to_json() << '\n';
        return 0;
      }
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : rep.rows) {
        rows.push_back({r.workload, fmt(r.wall_ms), std::to_string(r.rows_scanned), std::to_string(r.rows_returned),
                        r.index_used ? "1" : "0", fmt(r.records_per_s)});
      }
      print_table(g, {"workload", "wall_ms", "rows_scanned", "rows_returned", "index_used", "records_per_s"}, rows);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "skyq: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
