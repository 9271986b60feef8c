#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "wpt/runner.hpp"

using namespace wpt;
namespace fs = std::filesystem;

namespace {

const char *kSmall = R"(
[ot-solve]
manifold = sphere
points = 6
instances = 3
seed = 1

[pt-delta]
arc_length = 1.5707963267948966
particles = 16
spread = 0.3
q_values = 16, 32, 64
seed = 7

[pt-smooth]
grid = 32
steps = 40
epsilon = 0.01

[pt-petrunin]
grid = 32
steps = 40
epsilon = 0.01
q_values = 4, 8
tol = 1e-10
max_frequency = 2
time_degree = 1

[weak-check]
grid = 32
steps = 40
epsilon = 0.01
source = pde
max_frequency = 2
time_degree = 1

[cylinder-example]
n_values = 64, 128
amplitude = 0.3

[el-diagnostics]
n = 128
y0 = 0.2
y1 = 0.6
shift = 0.25
amplitude = 0.5
levels = 0.5

[cone-distance]
samples = 16
fiber_size = 2
triples = 4
radius = 0.25
seed = 3
)";

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("wpt_runner_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string write(const std::string &name, const std::string &text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
  std::string path(const std::string &name) const { return (dir / name).string(); }
};

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<double> column(const std::string &csv, size_t col) {
  std::vector<double> out;
  const auto ls = lines(csv);
  for (size_t k = 1; k < ls.size(); ++k) {
    if (ls[k].empty() || ls[k][0] == '#') continue;
    std::istringstream row(ls[k]);
    std::string cell;
    for (size_t c = 0; c <= col; ++c) std::getline(row, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("every command runs on a small config") {
  Workspace ws;
  const std::string cfg = ws.write("small.ini", kSmall);
  for (const std::string &cmd : runner_commands()) {
    std::ostringstream log;
    const std::string out = ws.path(cmd + ".csv");
    INFO(cmd);
    CHECK(run({cmd, cfg, out}, log) == 0);
    const auto ls = lines(slurp(out));
    REQUIRE(ls.size() >= 3);
    CHECK(ls.back().rfind("#wall_seconds,", 0) == 0);
    CHECK(slurp(out + ".json").find("\"command\": \"" + cmd + "\"") != std::string::npos);
  }
}

TEST_CASE("pt-delta errors decrease and cylinder errors are small") {
  Workspace ws;
  const std::string cfg = ws.write("small.ini", kSmall);
  std::ostringstream log;
  REQUIRE(run({"pt-delta", cfg, ws.path("d.csv")}, log) == 0);
  const std::string csv = slurp(ws.path("d.csv"));
  CHECK(lines(csv)[0] == "Q,w2_error");
  const auto err = column(csv, 1);
  REQUIRE(err.size() == 3);
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);

  REQUIRE(run({"cylinder-example", cfg, ws.path("c.csv")}, log) == 0);
  const std::string cyl = slurp(ws.path("c.csv"));
  const auto header = lines(cyl)[0];
  size_t col = 0, idx = 0;
  std::istringstream hs(header);
  for (std::string name; std::getline(hs, name, ','); ++idx)
    if (name == "max_potential_error") col = idx;
  REQUIRE(col > 0);
  for (double e : column(cyl, col)) CHECK(e <= 1e-3);
}

TEST_CASE("configuration errors exit with code 2") {
  Workspace ws;
  const std::string missing = ws.write("missing.ini", "[pt-delta]\narc_length = 1.0\nparticles = 8\n");
  std::ostringstream log;
  CHECK(run({"pt-delta", missing, ws.path("x.csv")}, log) == 2);
  CHECK(log.str().find("spread") != std::string::npos);

  std::ostringstream log2;
  const std::string broken = ws.write("broken.ini", "[pt-delta\nparticles = 8\n");
  CHECK(run({"pt-delta", broken, ws.path("x.csv")}, log2) == 2);

  std::ostringstream log3;
  const std::string cfg = ws.write("small.ini", kSmall);
  CHECK(run({"no-such-command", cfg, ws.path("x.csv")}, log3) == 2);

  std::ostringstream log4;
  CHECK(run({"pt-delta", ws.path("absent.ini"), ws.path("x.csv")}, log4) == 2);
}

TEST_CASE("runs are deterministic apart from the timing footer") {
  Workspace ws;
  const std::string cfg = ws.write("small.ini", kSmall);
  for (const char *cmd : {"ot-solve", "pt-delta", "cone-distance"}) {
    std::ostringstream log;
    REQUIRE(run({cmd, cfg, ws.path("a.csv"), 11}, log) == 0);
    REQUIRE(run({cmd, cfg, ws.path("b.csv"), 11}, log) == 0);
    auto a = lines(slurp(ws.path("a.csv"))), b = lines(slurp(ws.path("b.csv")));
    a.pop_back();
    b.pop_back();
    CHECK(a == b);
    CHECK(slurp(ws.path("a.csv.json")) == slurp(ws.path("b.csv.json")));
  }
}

TEST_CASE("shipped configuration parses") {
  Workspace ws;
  std::ostringstream log;
  CHECK(run({"cylinder-example", std::string(WPT_CONFIG_DIR) + "/default.ini", ws.path("c.csv")}, log) == 0);
}
