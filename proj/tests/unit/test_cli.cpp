#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "config.hpp"
#include "experiment.hpp"

using namespace rdlab::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rdlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Config preset(const std::string& name) { return Config::load(std::string(RDLAB_PRESET_DIR) + "/" + name); }

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nseed = 42\n\nsolver.dt = 0.02  # trailing\ndomain.lengths = 2*pi\n");
  const Config c = Config::parse(in, "inline");
  CHECK(c.unsigned_integer("seed") == 42);
  CHECK(c.number("solver.dt") == 0.02);
  CHECK(c.number("domain.lengths") == doctest::Approx(2 * std::numbers::pi));
  CHECK(c.text("solver.scheme") == "etd2rk");
  CHECK(c.numbers("output.norm_orders").size() == 6);

  CHECK(parse_number("pi/2") == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(parse_number("two"), ConfigError);
}

TEST_CASE("unknown keys are named with their line") {
  std::istringstream in("seed = 1\nsolver.dtt = 0.1\n");
  try {
    Config::parse(in, "bad.cfg");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.cfg:2") != std::string::npos);
    CHECK(msg.find("solver.dtt") != std::string::npos);
  }
  Config c;
  CHECK_THROWS_AS(c.apply_override("nope.key=1"), ConfigError);
  CHECK_THROWS_AS(c.apply_override("missing_equals"), ConfigError);
  CHECK_NOTHROW(c.apply_override("solver.horizon=3"));
  CHECK(c.number("solver.horizon") == 3.0);
  CHECK_THROWS_AS(run("nonsense", c, scratch("nonsense")), ConfigError);
}

TEST_CASE("every preset parses") {
  for (const auto& entry : fs::directory_iterator(RDLAB_PRESET_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const Config c = Config::load(entry.path().string());
    CHECK_NOTHROW(make_problem(c));
  }
}

TEST_CASE("reports are byte-identical across reruns") {
  Config c = preset("default.cfg");
  c.set("solver.horizon", "2");
  c.set("ensemble.size", "4");
  c.set("ensemble.held_out", "2");
  for (const std::string sub : {"simulate", "ladder", "equilibria"}) {
    const fs::path a = scratch(sub + "_a"), b = scratch(sub + "_b");
    run(sub, c, a);
    run(sub, c, b);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      CAPTURE(entry.path().string());
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
      ++files;
    }
    CHECK(files > 0);
  }
}

TEST_CASE("seed changes the random initial datum") {
  Config c = preset("default.cfg");
  const Problem p = make_problem(c);
  const auto u = initial_state(c, p);
  c.set("seed", "7");
  const auto v = initial_state(c, make_problem(c));
  CHECK(rdlab::l2_distance(u, v) > 0.0);
}

TEST_CASE("check and dimension on the default preset") {
  const Config c = preset("default.cfg");
  const Outcome chk = run("check", c, scratch("check"));
  CHECK(chk.status == 0);
  CHECK(chk.report["pass"] == true);
  CHECK(chk.report["schema_version"] == kSchemaVersion);

  const Outcome dim = run("dimension", c, scratch("dimension"));
  CHECK(dim.status == 0);
  const double bound = dim.report["result"]["search"]["bound"];
  CHECK(std::isfinite(bound));
  CHECK(bound > 0.0);
}
