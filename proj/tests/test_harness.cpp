#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "superosc/errors.hpp"
#include "superosc/harness/config.hpp"
#include "superosc/harness/experiments.hpp"
#include "superosc/harness/output.hpp"

using namespace superosc::harness;
namespace fs = std::filesystem;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in, "test.cfg");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

}  // namespace

TEST_CASE("config values") {
  const Config c = parse("[signal]\nphase_int = 40\ncosh_boost = 3\n\n[particle]\nprobes = 1.2, 1.6 ,2.4\ngap = matched\n[freq]\nfar_field = no\n");
  CHECK(c.integer("signal.phase_int", 0) == 40);
  CHECK(c.number("signal.cosh_boost") == 3.0);
  CHECK(c.number("signal.extent", 7.0) == 7.0);
  CHECK(c.numbers("particle.probes") == std::vector<double>{1.2, 1.6, 2.4});
  CHECK(c.text("particle.gap") == "matched");
  CHECK_FALSE(c.flag("freq.far_field", true));
  CHECK(c.line_of("particle.gap") == 7);
}

TEST_CASE("config errors carry field and line") {
  const Config c = parse("[signal]\n\ncosh_boost = three\n");
  try {
    c.number("signal.cosh_boost");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "signal.cosh_boost");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("test.cfg:3") != std::string::npos);
  }
  CHECK_THROWS_AS(c.text("signal.extent"), ConfigError);
  CHECK_THROWS_AS(parse("loose = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[signal]\ncolour = blue\n").require_known({"signal.phase_int"}), ConfigError);
  CHECK_NOTHROW(parse("[vary]\nsignal.boost = list:1\n").require_known({"vary.*"}));
}

TEST_CASE("config hash ignores layout") {
  const Config a = parse("[signal]\nphase_int = 40\ncosh_boost = 3\n");
  const Config b = parse("; comment\n[signal]\ncosh_boost=3\n\nphase_int =  40\n");
  const Config d = parse("[signal]\nphase_int = 41\ncosh_boost = 3\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != d.hash());
  CHECK(a.hash().size() == 16);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("ranges") {
  CHECK(parse_range("list:1, 2.5,3") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(parse_range("4,5") == std::vector<double>{4.0, 5.0});
  CHECK(parse_range("list:").empty());
  CHECK(parse_range("lin:0:1:0").empty());
  CHECK(parse_range("lin:2:9:1") == std::vector<double>{2.0});
  const auto l = parse_range("lin:0:1:5");
  REQUIRE(l.size() == 5);
  CHECK(l[3] == doctest::Approx(0.75));
  const auto g = parse_range("log:1:100:3");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK_THROWS_AS(parse_range("log:0:1:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("lin:0:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("list:1,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("geo:1:2:3"), std::invalid_argument);
}

TEST_CASE("csv writer") {
  const fs::path dir = fs::temp_directory_path() / "superosc_test_csv";
  fs::remove_all(dir);
  {
    CsvWriter w(dir / "a.csv", {"x", "n", "label"});
    w.row({0.1, 3L, std::string("far_field")});
    CHECK_THROWS_AS(w.row({1.0}), std::logic_error);
    CHECK(w.rows() == 1);
  }
  CHECK(slurp(dir / "a.csv") == "x,n,label\n1.0000000000000001e-01,3,far_field\n");
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(superosc::DomainError("x")) == 2);
  CHECK(exit_code_for(std::invalid_argument("x")) == 2);
  CHECK(exit_code_for(superosc::InsufficientData("x")) == 3);
  CHECK(exit_code_for(MissingPayload("x")) == 3);
}

TEST_CASE("synth run without files, and figure data") {
  const Config c = parse("[signal]\ndelta = 0.5\nboost = 0.5\nextent = 0.05\n[grid]\nz_min = -10\nz_max = 30\nn = 401\n");
  RunOptions o;
  o.write_files = false;
  const RunRecord r = run_experiment("synth", c, o);
  CHECK(r.files.empty());
  CHECK(r.payload["route"] == "bessel");
  CHECK(r.payload["grid"]["n"] == 401);
  CHECK(r.payload["zero_relative_difference"].get<double>() < 1e-12);
  CHECK(r.to_json()["config_hash"] == c.hash());

  const fs::path dir = fs::temp_directory_path() / "superosc_test_fig";
  fs::remove_all(dir);
  const fs::path fig = emit_figure_data(r, dir);
  const std::string text = slurp(fig);
  CHECK(text.rfind("z,re,im,abs,log_abs,region\n", 0) == 0);
  CHECK(text.find(",growth\n") != std::string::npos);
  CHECK(text.find(",superoscillatory\n") != std::string::npos);
  fs::remove_all(dir);

  RunRecord empty;
  empty.experiment = "energy";
  CHECK_THROWS_AS(emit_figure_data(empty, dir), MissingPayload);
}

TEST_CASE("validation failures") {
  RunOptions o;
  o.write_files = false;
  CHECK_THROWS_AS(run_experiment("synth", parse("[signal]\ndelta = 0.5\nphase_int = 3\n"), o), ConfigError);
  CHECK_THROWS_AS(run_experiment("synth", parse("[signal]\nroute = magic\ndelta = 0.5\n"), o), ConfigError);
  CHECK_THROWS_AS(run_experiment("energy", parse("[signal]\ndelta = 0.5\n"), o), ConfigError);
  CHECK_THROWS_AS(run_experiment("nope", parse(""), o), ConfigError);
  CHECK_THROWS_AS(run_experiment("sweep", parse("[sweep]\nexperiment = sweep\n"), o), ConfigError);
}
