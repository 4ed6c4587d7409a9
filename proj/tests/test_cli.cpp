#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fouk/cli.hpp"
#include "fouk/grid.hpp"
#include "fouk/report_io.hpp"

using namespace fouk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream out(p);
  out << contents;
}

}  // namespace

TEST_CASE("analyze the kolmogorov preset") {
  TempDir dir("fouk_cli_analyze");
  const fs::path op = dir.path / "kolmogorov.json";
  write_file(op, operator_to_json(kolmogorov_operator(1.0)));

  CHECK(run({"analyze", "--op", op.string(), "--out", dir.str()}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(dir.path / "structure.json"));
  CHECK(j["dim_S"] == 0);
  CHECK(j["r"] == 1);
  CHECK(j["kalman"] == true);
}

TEST_CASE("analyze a zero-diffusion operator") {
  TempDir dir("fouk_cli_qzero");
  const fs::path op = dir.path / "q_zero.json";
  write_file(op,
             "{\"n\":2,\"B\":[[0,1],[0,0]],\"Q\":[[0,0],[0,0]],\"s\":1.0}");
  CHECK(run({"analyze", "--op", op.string(), "--out", dir.str()}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(dir.path / "structure.json"));
  CHECK(j["dim_S"] == 2);
  CHECK(j["kalman"] == false);
  CHECK(j["r"] == 0);
}

TEST_CASE("input errors exit with code 1") {
  TempDir dir("fouk_cli_errors");
  CHECK(run({"analyze", "--op", "missing_file.json"}) == 1);

  const fs::path bad = dir.path / "bad.json";
  write_file(bad, "{\"n\":2,\"B\":[[0,1],[0,0]],\"s\":1.0}");
  CHECK(run({"analyze", "--op", bad.string()}) == 1);

  CHECK(run({"analyze", "--preset", "unknown-preset"}) == 1);
  CHECK(run({"verify", "nonsense", "--preset", "kolmogorov"}) == 1);
  CHECK(run({"bogus-command"}) == 1);
}

TEST_CASE("verify kolmogorov exits 0 with passing slopes") {
  TempDir dir("fouk_cli_kol");
  CHECK(run({"verify", "kolmogorov", "--s", "1.0", "--out", dir.str(),
             "--no-timestamp"}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(dir.path / "kolmogorov.json"));
  CHECK(j["pass"] == true);
  CHECK(std::abs(j["fitted"]["x_small_slope"].get<double>() + 1.5) < 0.05);
  CHECK(std::abs(j["fitted"]["v_small_slope"].get<double>() + 0.5) < 0.05);
}

TEST_CASE("verify smoothing with an explicit direction and csv output") {
  TempDir dir("fouk_cli_smooth");
  CHECK(run({"verify", "smoothing", "--preset", "fractional-heat:n=1,s=1.0",
             "--dir", "1", "--format", "csv", "--out", dir.str()}) == 0);
  const std::string csv = slurp(dir.path / "smoothing.csv");
  VerificationReport back = report_from_csv(csv);
  CHECK(back.experiment == "smoothing");
  CHECK(back.pass);
  CHECK(back.fitted.at("slope") == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("verify witness fails nothing but flags unbounded direction sets") {
  TempDir dir("fouk_cli_witness");
  const fs::path op = dir.path / "deg.json";
  write_file(op, "{\"n\":2,\"B\":[[0,0],[0,0]],\"Q\":[[1,0],[0,0]],\"s\":1.0}");
  CHECK(run({"verify", "witness", "--op", op.string(), "--xi", "0,1", "--t",
             "1.0", "--out", dir.str(), "--no-timestamp"}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(dir.path / "witness.json"));
  CHECK(j["pass"] == true);
  CHECK(j["fitted"]["slope"].get<double>() > 0.0);

  // A direction inside S^perp is not a witness: input error.
  CHECK(run({"verify", "witness", "--op", op.string(), "--xi", "1,0", "--t",
             "1.0"}) == 1);
}

TEST_CASE("verification failure exits with code 2 and still writes the report") {
  TempDir dir("fouk_cli_fail");
  // The exact gevrey ratio sequence rises ~15% towards its limit, so a
  // trend threshold of 1.0001 cannot be met.
  CHECK(run({"verify", "gevrey", "--preset", "fractional-heat:n=1,s=1.0",
             "--dir", "1", "--trend-tol", "1.0001", "--out", dir.str(),
             "--no-timestamp"}) == 2);
  nlohmann::json j = nlohmann::json::parse(slurp(dir.path / "gevrey.json"));
  CHECK(j["pass"] == false);
  CHECK(j["fitted"]["trend_ratio"].get<double>() > 1.0001);
}

TEST_CASE("reports reproduce byte-identically under --no-timestamp") {
  TempDir a("fouk_cli_repro_a");
  TempDir b("fouk_cli_repro_b");
  const std::vector<std::string> common = {
      "verify", "subelliptic", "--preset",   "kolmogorov:s=1.0",
      "--seed", "77",          "--samples",  "50",
      "--no-timestamp"};
  std::vector<std::string> run_a = common;
  run_a.push_back("--out");
  run_a.push_back(a.str());
  std::vector<std::string> run_b = common;
  run_b.push_back("--out");
  run_b.push_back(b.str());
  CHECK(run(run_a) == 0);
  CHECK(run(run_b) == 0);
  CHECK(slurp(a.path / "subelliptic.json") == slurp(b.path / "subelliptic.json"));
}

TEST_CASE("thread budget does not change results") {
  TempDir a("fouk_cli_threads_a");
  TempDir b("fouk_cli_threads_b");
  setenv("FOUK_THREADS", "1", 1);
  CHECK(run({"verify", "appendix", "--preset", "kolmogorov:s=0.5", "--t-min",
             "0.01", "--t-max", "0.5", "--t-points", "8", "--out", a.str(),
             "--no-timestamp"}) == 0);
  setenv("FOUK_THREADS", "4", 1);
  CHECK(run({"verify", "appendix", "--preset", "kolmogorov:s=0.5", "--t-min",
             "0.01", "--t-max", "0.5", "--t-points", "8", "--out", b.str(),
             "--no-timestamp"}) == 0);
  unsetenv("FOUK_THREADS");
  CHECK(slurp(a.path / "appendix.json") == slurp(b.path / "appendix.json"));
}

TEST_CASE("symbol subcommand emits parseable csv rows") {
  TempDir dir("fouk_cli_symbol");
  CHECK(run({"symbol", "--preset", "kolmogorov:s=1.0", "--xi", "1,0.5",
             "--t-min", "0.01", "--t-max", "1.0", "--t-points", "5", "--out",
             dir.str()}) == 0);
  const std::string csv = slurp(dir.path / "symbol.csv");
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,xi,a_t,A,Gamma,M_t");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("evolve a gaussian state end to end") {
  TempDir dir("fouk_cli_evolve");
  const fs::path op = dir.path / "op.json";
  write_file(op, operator_to_json(kolmogorov_operator(1.0)));
  const fs::path state = dir.path / "state.json";
  write_file(state, gaussian_to_json(GaussianState::standard(2)));

  CHECK(run({"evolve", "--op", op.string(), "--state", state.string(), "--t",
             "0.5", "--N", "64", "--L", "10", "--out", dir.str()}) == 0);
  CHECK(fs::exists(dir.path / "evolved.c64"));
  CHECK(fs::exists(dir.path / "evolved.json"));
  nlohmann::json norms = nlohmann::json::parse(slurp(dir.path / "norms.json"));
  CHECK(norms["norm_out"].get<double>() <=
        norms["similitude_bound"].get<double>() * (1.0 + 1e-9));

  // The written grid reloads and matches shape; feed it back through evolve.
  GridState reloaded = read_grid((dir.path / "evolved.json").string());
  CHECK(reloaded.N == 64);
  CHECK(reloaded.dim == 2);
  CHECK(run({"evolve", "--op", op.string(), "--state",
             (dir.path / "evolved.json").string(), "--t", "0.25", "--out",
             dir.str()}) == 0);
}
