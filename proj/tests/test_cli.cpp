#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "blowup/acceptance.hpp"
#include "blowup/commands.hpp"
#include "blowup/config.hpp"
#include "blowup/io.hpp"
#include "blowup/stationary.hpp"

using namespace blowup;
namespace fs = std::filesystem;
using io::Json;

namespace {

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("blowup_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const Json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::string& command, const fs::path& config, const fs::path& out_dir,
                std::vector<std::string> overrides = {}) {
  overrides.push_back("output.directory=\"" + out_dir.string() + "\"");
  overrides.push_back("output.svg=false");
  std::ostringstream out, err;
  const int code = cli::run({command, config.string(), overrides}, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json constant_config() {
  return Json::parse(R"({
    "p": 3,
    "grid": {"xmin": -1, "xmax": 1, "n": 64},
    "initial": {"type": "constant", "u0": [1.4142135623730951, 0], "u1": [1.4142135623730951, 0]},
    "time": {"probes": [0.0]}
  })");
}

}  // namespace

TEST_CASE("format_double keeps 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config hash ignores key order and tracks values") {
  const Json a = Json::parse(R"({"p": 3, "grid": {"n": 8, "xmin": 0, "xmax": 1}})");
  const Json b = Json::parse(R"({"grid": {"xmax": 1, "xmin": 0, "n": 8}, "p": 3})");
  CHECK(io::config_hash(a) == io::config_hash(b));
  CHECK(io::config_hash(a).size() == 16);
  Json c = a;
  c["p"] = 5;
  CHECK(io::config_hash(a) != io::config_hash(c));
}

TEST_CASE("config validation names the offending field") {
  auto message = [](const Json& doc) -> std::string {
    try {
      parse_config(doc);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      return e.what();
    }
    return {};
  };
  CHECK(message(Json::parse(R"({"grid": {"xmin": 0, "xmax": 1, "n": 16}})")).find("'p'") != std::string::npos);
  CHECK(message(Json::parse(R"({"p": 0.5})")).find("'p'") != std::string::npos);
  CHECK(message(Json::parse(R"({"p": 3, "time": {"cfl": 1.5}})")).find("time.cfl") != std::string::npos);
  CHECK(message(Json::parse(R"({"p": 3, "selfsim": {"m": 16}})")).find("selfsim.m") != std::string::npos);
  CHECK(message(Json::parse(R"({"p": 3, "tme": {}})")).find("'tme': unknown field") != std::string::npos);
  CHECK(message(Json::parse(R"({"p": 3, "liouville": {"battery": [{"type": "kappa", "d": 1.2}]}})"))
            .find("liouville.battery[0].d") != std::string::npos);
  CHECK(message(Json::parse(R"({"p": 3})")).empty());
}

TEST_CASE("overrides follow dotted paths and parse JSON values") {
  Json doc = Json::parse(R"({"p": 3})");
  apply_override(doc, "time.cfl=0.25");
  apply_override(doc, "initial.type=gaussian");
  apply_override(doc, "scan.x=[0.1,0.2]");
  CHECK(doc["time"]["cfl"].get<double>() == 0.25);
  CHECK(doc["initial"]["type"].get<std::string>() == "gaussian");
  CHECK(doc["scan"]["x"].size() == 2);
  CHECK_THROWS_AS(apply_override(doc, "novalue"), Error);
  CHECK_THROWS_AS(apply_override(doc, "p.x=1"), Error);
  const RunConfig cfg = parse_config(doc);
  CHECK(cfg.evolve.cfl == 0.25);
}

TEST_CASE("quarter-turn rotation of physical data is exact") {
  Json doc = constant_config();
  doc["initial"]["rotate"] = 1.5707963267948966;
  const WaveState turned = build_initial(parse_config(doc));
  const WaveState base = build_initial(parse_config(constant_config()));
  CHECK(turned.u == base.u.times_i());
  CHECK(turned.v == base.v.times_i());
}

TEST_CASE("exit codes") {
  CHECK(cli::exit_code(ErrorKind::config) == 2);
  CHECK(cli::exit_code(ErrorKind::out_of_cone) == 3);
  CHECK(cli::exit_code(ErrorKind::domain) == 3);
  CHECK(cli::exit_code(ErrorKind::divergence) == 4);
}

TEST_CASE("simulate on constant data") {
  TempDir tmp("simulate");
  const fs::path cfg = write_config(tmp.path, constant_config());
  const Outcome o = run_cli("simulate", cfg, tmp.path / "run", {"time.cfl=0.25"});
  REQUIRE(o.code == 0);
  const std::string traces = slurp(tmp.path / "run" / "traces.csv");
  CHECK(traces.rfind("# config_hash=", 0) == 0);
  CHECK(traces.find("\nprobe,x,t,modulus\n") != std::string::npos);
  const Json meta = Json::parse(slurp(tmp.path / "run" / "meta.json"));
  CHECK(meta["command"] == "simulate");
  CHECK(meta["overrides"][0] == "time.cfl=0.25");
  CHECK(meta["config"]["time"]["cfl"].get<double>() == 0.25);
  CHECK(std::abs(meta["results"]["estimates"][0]["T_hat"].get<double>() - 1.0) <= 1e-3);
  CHECK(meta["results"]["event"]["cause"] == "threshold");
  CHECK(fs::exists(tmp.path / "run" / "snapshots" / "final.json"));
  const Json snap = Json::parse(slurp(tmp.path / "run" / "snapshots" / "final.json"));
  CHECK(snap["grid"]["n"] == 64);
  CHECK(snap["re"].size() == 64);
  CHECK(snap["config_hash"] == meta["config_hash"]);

  // identical config and build: byte-identical data files
  const Outcome again = run_cli("simulate", cfg, tmp.path / "run2", {"time.cfl=0.25"});
  REQUIRE(again.code == 0);
  const bool same_traces = slurp(tmp.path / "run2" / "traces.csv") == traces;
  const bool same_estimates = slurp(tmp.path / "run2" / "estimates.csv") == slurp(tmp.path / "run" / "estimates.csv");
  CHECK(same_traces);
  CHECK(same_estimates);
}

TEST_CASE("simulate on zero data records completion without an event") {
  TempDir tmp("zero");
  Json doc = constant_config();
  doc["initial"] = {{"type", "zero"}};
  doc["time"]["t_end"] = 0.5;
  const Outcome o = run_cli("simulate", write_config(tmp.path, doc), tmp.path / "run");
  REQUIRE(o.code == 0);
  const Json meta = Json::parse(slurp(tmp.path / "run" / "meta.json"));
  CHECK(meta["results"]["event"].is_null());
  CHECK(meta["results"]["completion"]["cause"] == "time_limit");
}

TEST_CASE("config errors exit with 2 and name the field") {
  TempDir tmp("badconfig");
  Json doc = constant_config();
  doc.erase("p");
  const Outcome o = run_cli("simulate", write_config(tmp.path, doc), tmp.path / "run");
  CHECK(o.code == 2);
  CHECK(o.err.find("'p'") != std::string::npos);
  CHECK(run_cli("simulate", tmp.path / "missing.json", tmp.path / "run").code == 2);
  CHECK(run_cli("bogus", write_config(tmp.path, constant_config()), tmp.path / "run").code == 2);
}

TEST_CASE("curve on a too-narrow grid exits with 3") {
  TempDir tmp("narrow");
  Json doc = constant_config();
  doc["scan"] = {{"x", {-0.25, 0.0, 0.25}}};
  const Outcome o = run_cli("curve", write_config(tmp.path, doc), tmp.path / "run");
  CHECK(o.code == 3);
  CHECK(o.err.find("backward cone leaves the domain") != std::string::npos);
  CHECK(fs::exists(tmp.path / "run" / "curve.csv"));
}

TEST_CASE("curve on constant data") {
  TempDir tmp("curve");
  Json doc = constant_config();
  doc["grid"] = {{"xmin", -2.0}, {"xmax", 2.0}, {"n", 256}};
  doc["scan"] = {{"from", -0.5}, {"to", 0.5}, {"count", 5}};
  doc["selfsim"] = {{"m", 64}};
  const Outcome o = run_cli("curve", write_config(tmp.path, doc), tmp.path / "run");
  REQUIRE(o.code == 0);
  const std::string csv = slurp(tmp.path / "run" / "curve.csv");
  CHECK(csv.find("\nx,T,d,theta_raw,theta_unwrapped,residual,r2_T,converged,skip_reason\n") != std::string::npos);
  const Json holder = Json::parse(slurp(tmp.path / "run" / "holder.json"));
  CHECK(holder["reports"].size() == 10);
  for (const Json& r : holder["reports"]) {
    if (!r.contains("error")) CHECK(r.contains("window"));
  }
  const Json meta = Json::parse(slurp(tmp.path / "run" / "meta.json"));
  CHECK(meta["results"]["valid_points"] == 5);
}

TEST_CASE("selfsim from the stationary profile keeps E at 4/3") {
  TempDir tmp("selfsim");
  const Json doc = Json::parse(R"({"p": 3, "selfsim": {"m": 256, "s_end": 1, "stride": 32, "initial": {"type": "kappa"}}})");
  const Outcome o = run_cli("selfsim", write_config(tmp.path, doc), tmp.path / "run");
  REQUIRE(o.code == 0);
  const Json meta = Json::parse(slurp(tmp.path / "run" / "meta.json"));
  CHECK(std::abs(meta["results"]["energy_start"].get<double>() - 4.0 / 3.0) <= 2e-3);
  CHECK(std::abs(meta["results"]["energy_end"].get<double>() - meta["results"]["energy_start"].get<double>()) <= 1e-12);
  CHECK(slurp(tmp.path / "run" / "fits.csv").find("\ns,d,theta,residual,converged\n") != std::string::npos);
  CHECK(slurp(tmp.path / "run" / "energy.csv").find("\ns,E,D,residual\n") != std::string::npos);
}

TEST_CASE("selfsim with an unstable step exits with 4") {
  TempDir tmp("unstable");
  const Json doc = Json::parse(
      R"({"p": 3, "selfsim": {"m": 128, "ds": 0.5, "s_end": 20, "initial": {"type": "perturbed_kappa", "d": 0.0}}})");
  const Outcome o = run_cli("selfsim", write_config(tmp.path, doc), tmp.path / "run");
  CHECK(o.code == 4);
}

TEST_CASE("liouville writes reports and verdicts") {
  TempDir tmp("liouville");
  const Json doc = Json::parse(R"({"p": 3, "selfsim": {"m": 64}, "liouville": {"s_end": 4, "battery": [
      {"type": "zero"}, {"type": "scaled_kappa0", "scale": 5, "label": "five"}]}})");
  const Outcome o = run_cli("liouville", write_config(tmp.path, doc), tmp.path / "run");
  REQUIRE(o.code == 0);
  const Json reps = Json::parse(slurp(tmp.path / "run" / "reports.json"));
  REQUIRE(reps["reports"].size() == 2);
  CHECK(reps["reports"][0]["verdict"] == "decayed_to_zero");
  CHECK(reps["reports"][1]["verdict"] == "escaped");
  CHECK(reps["reports"][1]["am_flag_raised"] == true);
  CHECK(slurp(tmp.path / "run" / "verdicts.csv").find("five,escaped") != std::string::npos);
}

TEST_CASE("profile-eval samples the family") {
  TempDir tmp("profile");
  const Json doc = Json::parse(R"({"p": 3, "selfsim": {"m": 128, "initial": {"d": 0.5, "theta": 1.0}}})");
  const Outcome o = run_cli("profile-eval", write_config(tmp.path, doc), tmp.path / "run");
  REQUIRE(o.code == 0);
  const std::string csv = slurp(tmp.path / "run" / "profile.csv");
  CHECK(csv.find("\ny,re,im,abs,kappa_dd\n") != std::string::npos);
  const Json meta = Json::parse(slurp(tmp.path / "run" / "meta.json"));
  CHECK(meta["results"]["kappa0"].get<double>() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("output directory can come from the environment") {
  TempDir tmp("env");
  const fs::path cfg = write_config(tmp.path, Json::parse(R"({"p": 3, "selfsim": {"m": 64}})"));
  ::setenv("BLOWUP_OUTPUT_DIR", (tmp.path / "from_env").string().c_str(), 1);
  std::ostringstream out, err;
  const int code = cli::run({"profile-eval", cfg.string(), {"output.svg=false"}}, out, err);
  ::unsetenv("BLOWUP_OUTPUT_DIR");
  CHECK(code == 0);
  CHECK(fs::exists(tmp.path / "from_env" / "profile.csv"));
}

TEST_CASE("tampered kappa0 fails the stationary criterion") {
  const CriterionResult good = criterion_stationary(
      [](const CylinderGrid& g, double d, double theta) { return kappa_field(g, d, theta); }, true);
  CHECK(good.pass);
  const CriterionResult bad = criterion_stationary(
      [](const CylinderGrid& g, double d, double theta) { return kappa_field(g, d, theta).scaled(1.001); }, true);
  CHECK_FALSE(bad.pass);
  CHECK(format_result(bad).find("FAIL") != std::string::npos);
}
