#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBinary = MFVOL_BINARY;

int run(const std::string& args, const std::string& env = "", const fs::path& cwd = {}) {
  const std::string dir = cwd.empty() ? "" : "cd '" + cwd.string() + "' && ";
  const std::string cmd = dir + env + " " + kBinary + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

fs::path fresh(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mfvol_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// simulate -> decompose -> analyze (all four) inside `dir`, relative paths.
void pipeline(const fs::path& dir, const std::string& env) {
  REQUIRE(run("simulate --model mrw -n 3000 --horizon 300 --seed 5 --out r.csv", env, dir) == 0);
  REQUIRE(run("decompose --returns r.csv --population 40 --generations 30 --seed 2 --out d.csv"
              " --report d.json",
              env, dir) == 0);
  for (const char* what : {"deviation", "mf", "acf", "leverage"}) {
    REQUIRE(run(std::string("analyze ") + what + " --decomposition d.csv --report " + what +
                    ".json --plots plots",
                env, dir) == 0);
  }
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("analyze") == 2);
  CHECK(run("analyze mf") == 2);
  CHECK(run("simulate --bogus 1 --out x") == 2);
  const auto dir = fresh("usage");
  CHECK(run("simulate --noise cauchy --out " + (dir / "r.csv").string()) == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("missing upstream files exit with 3 and name the producer") {
  const auto dir = fresh("missing");
  const std::string cmd = kBinary + " analyze mf --decomposition " + (dir / "none.csv").string() +
                          " --report " + (dir / "x.json").string() + " 2>" + (dir / "err.txt").string();
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
  CHECK(slurp(dir / "err.txt").find("mfvol decompose") != std::string::npos);
  CHECK(run("decompose --returns " + (dir / "none.csv").string() + " --out a --report b") == 3);
  {
    std::ofstream(dir / "bad.csv") << "date,open\n2012-01-01,1\n2012-01-01,2\n";
  }
  CHECK(run("decompose --prices " + (dir / "bad.csv").string() + " --out " + (dir / "d.csv").string() +
            " --report " + (dir / "d.json").string()) == 3);
}

TEST_CASE("full pipeline is byte-identical across runs and worker counts") {
  const auto a = fresh("pipe_a"), b = fresh("pipe_b"), c = fresh("pipe_c");
  pipeline(a, "MFVOL_THREADS=1");
  pipeline(b, "MFVOL_THREADS=1");
  pipeline(c, "MFVOL_THREADS=3");
  for (const char* f : {"r.csv", "d.csv", "d.json", "deviation.json", "mf.json", "acf.json",
                        "leverage.json", "plots/mf_sigma_fq.txt", "plots/acf_dw.txt"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
  // Manifests differ only in timings and worker count; output hashes match.
  CHECK(load(a / "d.json.manifest.json")["outputs"] == load(c / "d.json.manifest.json")["outputs"]);

  const auto manifest = load(a / "d.json.manifest.json");
  CHECK(manifest["ga_config"]["population"] == 40);
  CHECK(manifest["seeds"]["ga"] == 2);
  bool hashed = false;
  for (const auto& o : manifest["outputs"]) hashed |= o["path"].get<std::string>().ends_with("d.csv");
  CHECK(hashed);
  CHECK(manifest["timings"]["wall_seconds"].is_number());
  CHECK_FALSE(load(a / "d.json").contains("timings"));
  CHECK(fs::exists(a / "plots" / "pdf_dw.txt"));
  CHECK(fs::exists(a / "plots" / "mf_sigma_fq.txt"));
  CHECK(fs::exists(a / "plots" / "acf_sigma.txt"));
  CHECK(fs::exists(a / "plots" / "leverage_dlns_to_dln_sigma_none.txt"));

  const auto dev = load(a / "deviation.json");
  CHECK(dev["schema_version"] == 1);
  const double dw = dev["results"]["delta_w"];
  CHECK(dw >= 0.0);
  CHECK(dw <= 1.0);
}

TEST_CASE("analyze mf on a stored Brownian decomposition") {
  const auto dir = fresh("brownian");
  const std::string d = dir.string() + "/";
  REQUIRE(run("simulate --model iid -n 65536 --seed 3 --out " + d + "r.csv --truth " + d + "t.csv") == 0);
  REQUIRE(run("analyze mf --decomposition " + d + "t.csv --report " + d + "mf.json") == 0);
  const auto res = load(d + "mf.json")["results"];
  CHECK(res["classification"] == "monofractal");
  CHECK(res["primary_series"] == "dw");
  const double h = res["hurst_dw"];
  CHECK(std::abs(h - 0.5) <= 0.03);
}

TEST_CASE("analyze mf on ground-truth MRW uses a concave sigma spectrum") {
  const auto dir = fresh("mrw_truth");
  const std::string d = dir.string() + "/";
  REQUIRE(run("simulate --model mrw --lambda2 0.05 -n 65536 --seed 4 --out " + d + "r.csv --truth " + d +
              "t.csv") == 0);
  REQUIRE(run("analyze mf --decomposition " + d + "t.csv --report " + d + "mf.json") == 0);
  const auto res = load(d + "mf.json")["results"];
  CHECK(res["primary_series"] == "sigma");
  CHECK(res["spectra"]["sigma"]["concave_within_error"] == true);
  CHECK(res["primary_concave_within_error"] == true);
  CHECK(res["spectra"]["dlns"]["classification"] == "multifractal");
}

TEST_CASE("decompose from a price CSV and tabulate") {
  const auto dir = fresh("prices");
  const std::string d = dir.string() + "/";
  REQUIRE(run("simulate -n 1200 --seed 9 --horizon 100 --out " + d + "r.csv --prices " + d + "p.csv") == 0);
  REQUIRE(run("decompose --prices " + d + "p.csv --date-format index --population 20 --generations 5 --out " +
              d + "d.csv --report " + d + "d.json") == 0);
  const auto rep = load(d + "d.json");
  CHECK(rep["parameters"]["input"]["rows"] == 1201);
  CHECK(rep["results"]["n"] == 1200);
  REQUIRE(run("report --inputs " + d + "d.json --labels synthetic --out " + d + "t.json") == 0);
  CHECK(load(d + "t.json")["results"][0]["label"] == "synthetic");
}
