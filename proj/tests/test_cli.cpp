#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(SKY_SOURCE_DIR) / "tests" / "golden";

struct Run {
  int code;
  std::string out, err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "skyserver_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run skyq(const std::string& args) {
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string cmd = std::string(SKYQ_BINARY) + " --data-dir " + (work_dir() / "store").string() + " " + args +
                          " 2>" + err_file.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf;
  while (const std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  std::ifstream ef(err_file);
  std::stringstream es;
  es << ef.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, es.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Set SKY_UPDATE_GOLDEN=1 to rewrite the expected files.
void golden(const std::string& name, const std::string& actual) {
  const fs::path file = kGolden / (name + ".txt");
  if (std::getenv("SKY_UPDATE_GOLDEN")) {
    std::ofstream(file, std::ios::binary) << actual;
    return;
  }
  REQUIRE_MESSAGE(fs::exists(file), file.string());
  CHECK_MESSAGE(read_file(file) == actual, "golden mismatch: " << name);
}

bool one_line(const std::string& s) { return !s.empty() && s.find('\n') == s.size() - 1; }

}  // namespace

TEST_CASE("cli workflow matches golden output") {
  const Run gen = skyq("--seed 7 gen " + (work_dir() / "src").string() + " --objects 3000 --plant 0.2 --load");
  REQUIRE(gen.code == 0);
  REQUIRE(skyq("build-neighbors").code == 0);

  golden("events", skyq("events").out);
  golden("events_csv", skyq("--format csv events --table PhotoObj").out);
  golden("build_index", skyq("build-index").out);
  golden("cover_reference_example", skyq("cover \"CIRCLE J2000 12 5.5 60.2 1\"").out);
  golden("cover_reference_example_names", skyq("--format names cover \"CIRCLE J2000 12 5.5 60.2 1\"").out);
  golden("near", skyq("near 185 -0.5 2").out);
  golden("nearest", skyq("nearest 185 -0.5 2").out);
  golden("query_list", skyq("query --list").out);

  std::string all;
  for (const char* q : {"Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q8", "Q9", "Q10", "Q10A", "Q11", "Q12", "Q13",
                        "Q14", "Q15A", "Q15B", "Q16", "Q17", "Q18", "Q19", "Q20"}) {
    const Run r = skyq(std::string("query ") + q);
    CHECK_MESSAGE(r.code == 0, q);
    all += "## " + std::string(q) + "\n" + r.out;
  }
  golden("queries", all);
  golden("query_q1_csv", skyq("--format csv query Q1 --param radius=6 --param ra=185.01").out);

  const Run explain = skyq("query Q1 --explain");
  CHECK(explain.code == 0);
  CHECK(one_line(explain.err));
  CHECK(explain.err.find("\"index_used\":true") != std::string::npos);
}

TEST_CASE("cli load, undo and events") {
  const fs::path csv = work_dir() / "fields.csv";
  std::ofstream(csv) << "fieldID,run,camcol,field\n990000001,9900,1,1\n990000002,9900,1,2\n990000003,9900,9,3\n";
  const Run bad = skyq("load Field " + csv.string());
  CHECK(bad.code == 3);
  CHECK(one_line(bad.err));
  CHECK(read_file(csv.string() + ".trace.txt").find("line 4:") != std::string::npos);

  const Run failed = skyq("events --status failed");
  CHECK(failed.out.find("\tField\t") != std::string::npos);
  const std::string id = failed.out.substr(failed.out.find('\n') + 1, failed.out.find('\t', failed.out.find('\n')) -
                                                                          failed.out.find('\n') - 1);
  const Run u = skyq("undo " + id);
  CHECK(u.code == 0);
  CHECK(u.out == "deleted 2 rows\n");
  const Run again = skyq("undo " + id);
  CHECK(again.code != 0);
  CHECK(one_line(again.err));
}

TEST_CASE("cli errors exit nonzero with one line on stderr") {
  for (const char* args : {"query Q99", "undo 12345", "cover \"CIRCLE J2000 1 2\"", "load PhotoTag x.csv",
                           "load Field /nonexistent.csv", "near 10 95 1", "near 10 0 -1", "query Q1 --param nope=1",
                           "query Q1 --param radius=abc", "--format names query Q1", "frobnicate"}) {
    const Run r = skyq(args);
    CHECK_MESSAGE(r.code != 0, args);
    CHECK_MESSAGE(one_line(r.err), args << " -> " << r.err);
  }
}
