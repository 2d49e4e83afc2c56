#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fzeta/cli/run.hpp"
#include "fzeta/geometry/tube.hpp"

using namespace fzeta;
using namespace fzeta::cli;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig command(const std::string& name) {
  RunConfig cfg;
  cfg.command = name;
  return cfg;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fzeta_cli_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(1.0) == "1.0");
  CHECK(format_number(-3.0) == "-3.0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.5) == "2.5");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_number(1e-20)) == 1e-20);
  CHECK(format_complex({1.0, -2.0}) == "1.0-2.0i");
  CHECK(format_complex({0.5, 0.25}) == "0.5+0.25i");
}

TEST_CASE("eval command") {
  auto cfg = command("eval");
  cfg.catalog = "cantor-geometric";
  cfg.s = cplx{1.0, 0.0};
  const auto r = invoke(cfg);
  CHECK(r.code == kOk);
  CHECK(r.out == "1.0\n");

  cfg.catalog.clear();
  cfg.spec = "cantor";
  cfg.s = cplx{2.0, 0.0};
  cfg.format = "json";
  const auto j = json::parse(invoke(cfg).out);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["value"][0].get<double>() == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("poles command lists the lattice") {
  auto cfg = command("poles");
  cfg.catalog = "cantor-geometric";
  const auto r = invoke(cfg);
  REQUIRE(r.code == kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "re,im,order,res_re,res_im,provenance");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",analytic") != std::string::npos);
  }
  CHECK(rows == 3);  // k = -1, 0, 1 inside |Im s| <= 10
}

TEST_CASE("residues from the Cantor tube") {
  auto cfg = command("residues");
  cfg.set = "cantor";
  cfg.k_max = 1;
  cfg.format = "json";
  const auto r = invoke(cfg);
  REQUIRE(r.code == kOk);
  const auto j = json::parse(r.out);
  const double D = std::log(2.0) / std::log(3.0);
  bool found = false;
  for (const auto& p : j["poles"]) {
    if (std::abs(p["im"].get<double>()) > 1e-12) continue;
    found = true;
    const double expected = std::pow(2.0, -D) / (std::log(3.0) * D);
    CHECK(p["residue"][0].get<double>() == doctest::Approx(expected).epsilon(1e-4));
  }
  CHECK(found);
}

TEST_CASE("tube output reads back") {
  auto cfg = command("tube");
  cfg.set = "cantor";
  cfg.t_min = 1e-4;
  cfg.t_max = 0.1;
  cfg.per_decade = 20;
  const auto r = invoke(cfg);
  REQUIRE(r.code == kOk);
  std::istringstream in(r.out);
  const auto tube = geometry::read_tube_csv(in, 1);
  CHECK(tube.samples.size() >= 60);
  for (const auto& s : tube.samples) CHECK(s.volume == doctest::Approx(geometry::cantor_tube_exact(s.t)).epsilon(1e-15));
}

TEST_CASE("exit codes") {
  auto bad = command("eval");
  bad.catalog = "not-a-catalog";
  bad.s = cplx{1.0, 0.0};
  const auto r = invoke(bad);
  CHECK(r.code == kConfigError);
  CHECK(r.err.rfind("fzeta eval: ", 0) == 0);

  auto pole = command("eval");
  pole.catalog = "cantor-geometric";
  pole.s = cplx{std::log(2.0) / std::log(3.0), 0.0};
  CHECK(invoke(pole).code == kNumericError);

  auto unknown = command("frobnicate");
  CHECK(invoke(unknown).code == kConfigError);

  auto res = command("eval");
  res.catalog = "cantor-geometric";
  res.s = cplx{1.0, 0.0};
  res.resolution = 1000;
  CHECK(invoke(res).code == kConfigError);

  auto hyper = command("verify");
  hyper.check = "hyperfractal";
  hyper.K = 10;
  CHECK(invoke(hyper).code == kVerificationFailed);

  auto moran = command("verify");
  moran.check = "moran";
  moran.ratios = {0.25, 0.25};
  CHECK(invoke(moran).code == kOk);
  moran.ratios = {0.75, 0.5};
  CHECK(invoke(moran).code == kConfigError);

  auto missing = command("report");
  missing.set = "cantor";
  missing.artifacts = scratch_dir("missing").string();
  CHECK(invoke(missing).code == kConfigError);
}

TEST_CASE("functional-equation verification is seeded and repeatable") {
  auto cfg = command("verify");
  cfg.check = "functional-equation";
  cfg.set = "cantor";
  const auto a = invoke(cfg);
  const auto b = invoke(cfg);
  CHECK(a.code == kOk);
  CHECK(a.out == b.out);
  cfg.seed = 2;
  CHECK(invoke(cfg).out != a.out);
  const auto j = json::parse(a.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"][0]["defects"].size() == 10);
}

TEST_CASE("set report") {
  auto cfg = command("report");
  cfg.set = "cantor";
  const auto a = invoke(cfg);
  REQUIRE(a.code == kOk);
  CHECK(invoke(cfg).out == a.out);
  const auto j = json::parse(a.out);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["D"].get<double>() == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-6));
  CHECK(j["pass"] == true);
  std::vector<std::string> names;
  for (const auto& c : j["checks"]) names.push_back(c["check"]);
  CHECK(names == std::vector<std::string>{"functional-equation", "residue-content", "residue-catalog"});
  CHECK(j.contains("profile"));

  // fit and residues written separately feed a later report
  const auto dir = scratch_dir("artifacts");
  auto fit = command("fit");
  fit.set = "cantor";
  fit.out = (dir / "fit.json").string();
  REQUIRE(invoke(fit).code == kOk);
  auto res = command("residues");
  res.set = "cantor";
  res.format = "json";
  res.out = (dir / "residues.json").string();
  REQUIRE(invoke(res).code == kOk);
  auto from = cfg;
  from.artifacts = dir.string();
  const auto r = invoke(from);
  REQUIRE(r.code == kOk);
  const auto k = json::parse(r.out);
  CHECK(k["fit"] == json::parse(slurp(dir / "fit.json")));
  CHECK(k["residues"] == json::parse(slurp(dir / "residues.json")));
}

TEST_CASE("output file matches stdout") {
  auto cfg = command("poles");
  cfg.catalog = "sierpinski-carpet";
  cfg.delta = 1.0 / 3.0;
  const auto direct = invoke(cfg);
  const auto dir = scratch_dir("out");
  cfg.out = (dir / "poles.csv").string();
  const auto r = invoke(cfg);
  CHECK(r.code == kOk);
  CHECK(slurp(dir / "poles.csv") == direct.out);
}

#ifdef FZETA_BINARY
TEST_CASE("installed binary") {
  FILE* pipe = popen(FZETA_BINARY " eval --catalog cantor-geometric --s 1 0", "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  CHECK(pclose(pipe) == 0);
  CHECK(out == "1.0\n");
}
#endif
