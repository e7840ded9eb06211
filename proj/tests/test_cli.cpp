#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "jostlab/cli.hpp"

using namespace jostlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("jostlab_test_" + name);
  fs::remove_all(p);
  return p;
}

RunResult run_json(const char* text, const fs::path& out, int threads = 0) {
  RunRequest r;
  r.config = Json::parse(text);
  r.out = out;
  r.threads = threads;
  r.config_dir = out;
  return run(r);
}

const char* kFreeBump = R"({
  "task": "evolve",
  "potential": {"kind": "zero"},
  "evolve": {"method": "spectral", "mode": "full", "allow_resonant": true,
             "data": {"kind": "gaussian", "x0": 0.5, "width": 1.0, "f": 1.0, "g": 0.5},
             "observer": 1.5, "times": {"from": 1.0, "to": 6.0, "step": 1.0}}
})";

}  // namespace

TEST(Io, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
    EXPECT_EQ(std::stod(num(v)), v);
  EvolutionResult r;
  r.method = Method::fdtd;
  r.times = {0.1, 0.2, 0.30000000000000004};
  r.psi = {1.0 / 3.0, -1e-17, 2.0};
  auto back = read_series_csv(series_csv(r, {{"note", "x"}}));
  EXPECT_EQ(back.times, r.times);
  EXPECT_EQ(back.psi, r.psi);
  EXPECT_EQ(back.method, Method::fdtd);
  EXPECT_EQ(series_hash(back), series_hash(r));
}

TEST(Io, ModelHashSeparatesModels) {
  EXPECT_EQ(model_hash(make_inverse_power(3.0, 1.0, 1.0)), model_hash(make_inverse_power(3.0, 1.0, 1.0)));
  EXPECT_NE(model_hash(make_inverse_power(3.0, 1.0, 1.0)), model_hash(make_inverse_power(3.0, 1.0, 2.0)));
  EXPECT_NE(model_hash(make_regge_wheeler({1.0, 1.0})), model_hash(make_regge_wheeler({1.0, -3.0})));
}

TEST(Io, JostCsvHasNoRepeatedNodes) {
  auto jd = solve_m(make_inverse_power(3.0, 1.0, 1.0), 1, 0.5, {{0.0}});
  auto csv = jost_csv(jd);
  EXPECT_NE(csv.find("# lambda = 0.5\n"), std::string::npos);
  EXPECT_NE(csv.find("x,re_m,im_m,re_dm,im_dm\n"), std::string::npos);
  std::istringstream is(csv);
  std::string line, prev;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    auto x = line.substr(0, line.find(','));
    EXPECT_NE(x, prev);
    prev = x;
  }
}

TEST(Cli, FreeEvolutionMatchesDalembert) {
  auto out = scratch("free");
  auto res = run_json(kFreeBump, out);
  ASSERT_EQ(res.exit_status, 0) << res.manifest.dump();
  EXPECT_EQ(res.manifest["method"], "spectral");
  EXPECT_EQ(res.manifest["status"], "ok");
  auto s = read_series_csv(read_file((out / "series.csv").string()));
  auto d = gaussian_data(0.5, 1.0, 1.0, 0.5);
  ASSERT_EQ(s.times.size(), 6u);
  for (std::size_t i = 0; i < s.times.size(); ++i)
    EXPECT_NEAR(s.psi[i] / dalembert(d, 1.5, s.times[i]), 1.0, 1e-6);
  auto m = Json::parse(read_file((out / "manifest.json").string()));
  EXPECT_EQ(m["config"]["task"], "evolve");
  EXPECT_EQ(m["artifacts"][0]["file"], "series.csv");
  EXPECT_TRUE(m.contains("wall_time_s"));
  EXPECT_TRUE(m["tolerances"].contains("lambda_min"));
}

TEST(Cli, ByteIdenticalAcrossThreads) {
  auto a = scratch("t1"), b = scratch("t3");
  ASSERT_EQ(run_json(kFreeBump, a, 1).exit_status, 0);
  ASSERT_EQ(run_json(kFreeBump, b, 3).exit_status, 0);
  EXPECT_EQ(read_file((a / "series.csv").string()), read_file((b / "series.csv").string()));
  const char* spec = R"({"task": "spectral", "potential": {"kind": "inverse_power", "alpha": 3.5},
                         "spectral": {"lambdas": [0.001, 0.03, 0.2, 1.0], "pairs": [[0, 2]]}})";
  ASSERT_EQ(run_json(spec, a, 1).exit_status, 0);
  ASSERT_EQ(run_json(spec, b, 3).exit_status, 0);
  EXPECT_EQ(read_file((a / "spectral.csv").string()), read_file((b / "spectral.csv").string()));
}

TEST(Cli, ErrorsMapToExitCodes) {
  auto out = scratch("err");
  auto r = run_json(R"({"task": "jost", "potential": {"kind": "inverse_power", "alpha": 5},
                        "jost": {"lambdas": [0.1]}})", out);
  EXPECT_EQ(r.exit_status, 2);
  EXPECT_EQ(r.manifest["error"]["code"], "HYPOTHESIS_RANGE");
  EXPECT_EQ(Json::parse(read_file((out / "manifest.json").string()))["status"], "error");

  r = run_json(R"({"task": "jost", "potential": {"kind": "zero"}, "jost": {"lambdas": [0.1], "extra": 1}})", out);
  EXPECT_EQ(r.exit_status, 2);
  EXPECT_EQ(r.manifest["error"]["code"], "CONFIG_INVALID");

  r = run_json(R"({"task": "evolve", "potential": {"kind": "poschl_teller", "n": 2},
                   "evolve": {"data": {"g": 1}, "times": [1]}})", out);
  EXPECT_EQ(r.exit_status, 3);

  r = run_json(R"({"task": "verify", "verify": {"suite": "nonsense"}})", out);
  EXPECT_EQ(r.exit_status, 2);

  r = run_json(R"({"task": "fly"})", out);
  EXPECT_EQ(r.exit_status, 2);
}

TEST(Cli, FitTaskReadsSeries) {
  auto out = scratch("fit");
  fs::create_directories(out);
  EvolutionResult s;
  s.method = Method::fdtd;
  for (double t = 10.0; t <= 1000.0; t += 1.0) {
    s.times.push_back(t);
    s.psi.push_back(-7.0 * std::pow(t, -3.0));
  }
  write_file((out / "tail.csv").string(), series_csv(s));
  auto r = run_json(R"({"task": "fit", "fit": {"series": "tail.csv", "window": [100, 1000]}})", out);
  ASSERT_EQ(r.exit_status, 0) << r.manifest.dump();
  auto f = Json::parse(read_file((out / "fit.json").string()));
  EXPECT_NEAR(f["fixed"]["exponent"].get<double>(), 3.0, 1e-9);
  EXPECT_TRUE(f["auto"]["auto_window"].get<bool>());
  EXPECT_EQ(f["fixed"]["series_provenance"].size(), 2u);

  // an oscillating series has no tail
  for (std::size_t i = 0; i < s.psi.size(); ++i) s.psi[i] = std::cos(s.times[i]);
  write_file((out / "tail.csv").string(), series_csv(s));
  r = run_json(R"({"task": "fit", "fit": {"series": "tail.csv", "window": [100, 1000]}})", out);
  EXPECT_EQ(r.exit_status, 4);
  EXPECT_EQ(r.manifest["error"]["code"], "NON_CONVERGENCE");
}

TEST(Cli, VerifyFreeSuitePasses) {
  auto out = scratch("verify");
  auto r = run_json(R"({"task": "verify", "verify": {"suite": "free"}})", out);
  ASSERT_EQ(r.exit_status, 0);
  EXPECT_TRUE(r.manifest["all_pass"].get<bool>());
  auto v = Json::parse(read_file((out / "verify.json").string()));
  EXPECT_EQ(v["criteria"][0]["id"], 1);
  EXPECT_TRUE(v["criteria"][0]["pass"].get<bool>());
}

TEST(Cli, ThreadsEnvironment) {
  ::setenv(kThreadsEnv, "3", 1);
  EXPECT_EQ(default_threads(), 3);
  auto out = scratch("env");
  auto r = run_json(R"({"task": "lowenergy", "potential": {"kind": "inverse_power", "alpha": 3},
                        "lowenergy": {"sign": 1, "lambdas": [0.001]}})", out);
  EXPECT_EQ(r.manifest["threads"], 3);
  ::unsetenv(kThreadsEnv);
  EXPECT_EQ(r.exit_status, 0);
  EXPECT_TRUE(fs::exists(out / "zero_energy_plus.csv"));
  EXPECT_TRUE(fs::exists(out / "turning_plus.csv"));
}
