#pragma once

// Config-driven runs: a single JSON document selects a potential and a task,
// the task writes CSV/JSON artifacts plus manifest.json into the output dir.

#include <chrono>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "jostlab/io.hpp"
#include "jostlab/parallel.hpp"

namespace jostlab {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Exit status for each error class: 2 config, 3 hypothesis, 4 numerics.
inline int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::hypothesis_violation:
    case ErrorCode::singular_kernel:
      return 3;
    case ErrorCode::non_convergence:
      return 4;
    default:
      return 2;
  }
}

namespace config {

inline void allow(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  require(j.is_object(), ErrorCode::config_invalid, where + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    require(ok.count(it.key()) > 0, ErrorCode::config_invalid, where + ": unknown key '" + it.key() + "'");
}

inline double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_number(), ErrorCode::config_invalid, std::string(key) + ": expected a number");
  return j[key].get<double>();
}

inline double number(const Json& j, const char* key) {
  require(j.contains(key), ErrorCode::config_invalid, std::string("missing '") + key + "'");
  return number(j, key, 0.0);
}

inline std::string text(const Json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_string(), ErrorCode::config_invalid, std::string(key) + ": expected a string");
  return j[key].get<std::string>();
}

inline std::vector<double> numbers(const Json& j, const char* key) {
  require(j.contains(key) && j[key].is_array() && !j[key].empty(), ErrorCode::config_invalid,
          std::string(key) + ": expected a non-empty array of numbers");
  std::vector<double> v;
  for (const auto& e : j[key]) {
    require(e.is_number(), ErrorCode::config_invalid, std::string(key) + ": expected numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

// Either an explicit list or {"from", "to", "step"}.
inline std::vector<double> times(const Json& j, const char* key) {
  require(j.contains(key), ErrorCode::config_invalid, std::string("missing '") + key + "'");
  if (j[key].is_array()) return numbers(j, key);
  const Json& r = j[key];
  allow(r, key, {"from", "to", "step"});
  double a = number(r, "from"), b = number(r, "to"), h = number(r, "step");
  require(h > 0.0 && b >= a && (b - a) / h < 1e7, ErrorCode::config_invalid, std::string(key) + ": bad range");
  std::vector<double> v;
  for (long k = 0; a + k * h <= b + 1e-9 * h; ++k) v.push_back(a + k * h);
  return v;
}

inline std::vector<int> signs(const Json& j) {
  if (!j.contains("sign")) return {-1, 1};
  int s = static_cast<int>(number(j, "sign"));
  require(s == 1 || s == -1, ErrorCode::config_invalid, "sign must be +1 or -1");
  return {s};
}

inline PotentialModel potential(const Json& j) {
  allow(j, "potential", {"kind", "alpha", "c_plus", "c_minus", "mass", "sigma", "n"});
  std::string kind = text(j, "kind", "");
  if (kind == "inverse_power") {
    allow(j, "potential", {"kind", "alpha", "c_plus", "c_minus"});
    return make_inverse_power(number(j, "alpha"), number(j, "c_plus", 1.0), number(j, "c_minus", 1.0));
  }
  if (kind == "regge_wheeler") {
    allow(j, "potential", {"kind", "mass", "sigma"});
    return make_regge_wheeler({number(j, "mass", 1.0), number(j, "sigma", 1.0)});
  }
  if (kind == "poschl_teller") {
    allow(j, "potential", {"kind", "n"});
    double n = number(j, "n");
    require(n == std::floor(n) && n >= 1 && n <= 50, ErrorCode::config_invalid, "poschl_teller: n integer in [1, 50]");
    return make_poschl_teller(static_cast<int>(n));
  }
  if (kind == "zero") {
    allow(j, "potential", {"kind"});
    return make_zero_potential();
  }
  throw Error(ErrorCode::config_invalid, "potential.kind must be inverse_power, regge_wheeler, poschl_teller or zero");
}

inline CauchyData data(const Json& j) {
  allow(j, "data", {"kind", "x0", "width", "a", "b", "f", "g"});
  std::string kind = text(j, "kind", "gaussian");
  double f = number(j, "f", 0.0), g = number(j, "g", 0.0);
  require(f != 0.0 || g != 0.0, ErrorCode::config_invalid, "data: f and g are both zero");
  if (kind == "gaussian") {
    allow(j, "data", {"kind", "x0", "width", "f", "g"});
    return gaussian_data(number(j, "x0", 0.0), number(j, "width", 1.0), f, g);
  }
  if (kind == "indicator") {
    allow(j, "data", {"kind", "a", "b", "f", "g"});
    return indicator_data(number(j, "a"), number(j, "b"), f, g);
  }
  throw Error(ErrorCode::config_invalid, "data.kind must be gaussian or indicator");
}

}  // namespace config

struct RunResult {
  int exit_status = 0;
  Json manifest;
};

namespace detail {

struct RunContext {
  std::filesystem::path out;
  Json artifacts = Json::array();
  Json tolerances = Json::object();
  int threads = 1;

  void emit(const std::string& name, const std::string& body) {
    write_file((out / name).string(), body);
    artifacts.push_back({{"file", name}, {"fnv1a64", file_hash(body)}, {"bytes", body.size()}});
  }
};

inline void task_jost(const Json& c, const PotentialModel& v, RunContext& rc) {
  config::allow(c, "jost", {"lambdas", "sign", "points", "tol", "xmax"});
  auto lams = config::numbers(c, "lambdas");
  JostOptions o;
  o.tol = config::number(c, "tol", o.tol);
  o.xmax = config::number(c, "xmax", 0.0);
  std::vector<double> pts = c.contains("points") ? config::numbers(c, "points") : std::vector<double>{0.0};
  rc.tolerances["jost_tol"] = o.tol;
  std::vector<std::pair<int, double>> jobs;
  for (int s : config::signs(c))
    for (double l : lams) jobs.push_back({s, l});
  std::vector<std::string> out(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        out[i] = jost_csv(solve_m(v, jobs[i].first, jobs[i].second, {pts}, o),
                          {{"model", model_descriptor(v)}, {"model_hash", model_hash(v)}});
      },
      rc.threads);
  for (std::size_t i = 0; i < jobs.size(); ++i)
    rc.emit("jost_" + std::string(jobs[i].first > 0 ? "plus" : "minus") + "_" + std::to_string(i) + ".csv",
            out[i]);
}

inline void task_lowenergy(const Json& c, const PotentialModel& v, RunContext& rc) {
  config::allow(c, "lowenergy", {"sign", "lambdas", "tol"});
  LowEnergyOptions o;
  o.tol = config::number(c, "tol", o.tol);
  rc.tolerances["lowenergy_tol"] = o.tol;
  Metadata meta{{"model", model_descriptor(v)}, {"model_hash", model_hash(v)}};
  for (int s : config::signs(c)) {
    auto zs = solve_zero_energy(v, s, o);
    std::string side = s > 0 ? "plus" : "minus";
    rc.emit("zero_energy_" + side + ".csv", zero_energy_csv(zs, meta));
    if (!c.contains("lambdas")) continue;
    std::ostringstream os;
    detail::write_header(os, meta);
    os << "lambda,mu,u0,du0,u1,du1,res_u0,res_du0,res_u1,res_du1\n";
    for (double l : config::numbers(c, "lambdas")) {
      auto r = lowenergy_turning_residual(zs, l, o);
      os << num(l) << ',' << num(r.mu);
      for (double x : r.value) os << ',' << num(x);
      for (double x : r.residual) os << ',' << num(x);
      os << '\n';
    }
    rc.emit("turning_" + side + ".csv", os.str());
  }
}

inline void task_spectral(const Json& c, const PotentialModel& v, RunContext& rc) {
  config::allow(c, "spectral", {"lambdas", "pairs", "delta", "allow_resonant"});
  SpectralOptions o;
  o.delta = config::number(c, "delta", o.delta);
  if (c.contains("allow_resonant")) o.allow_resonant = c["allow_resonant"].get<bool>();
  std::vector<std::pair<double, double>> pairs;
  double reach = 1.0;
  if (c.contains("pairs")) {
    require(c["pairs"].is_array(), ErrorCode::config_invalid, "pairs: expected [[x, x'], ...]");
    for (const auto& p : c["pairs"]) {
      require(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(), ErrorCode::config_invalid,
              "pairs: expected [[x, x'], ...]");
      pairs.push_back({p[0].get<double>(), p[1].get<double>()});
      reach = std::max({reach, std::abs(pairs.back().first) + 1.0, std::abs(pairs.back().second) + 1.0});
    }
  }
  rc.tolerances["delta"] = o.delta;
  rc.tolerances["resonance_floor"] = o.resonance_floor;
  SpectralContext ctx(v, o, reach);
  auto lams = config::numbers(c, "lambdas");
  std::vector<SpectralRow> rows(lams.size());
  parallel_for(
      lams.size(),
      [&](std::size_t i) {
        rows[i].cd = connection_coefficients(ctx, lams[i]);
        for (auto [x, xp] : pairs) rows[i].im_green.push_back(greens_kernel(ctx, x, xp, lams[i]).im_green);
      },
      rc.threads);
  rc.emit("spectral.csv", spectral_csv(rows, pairs,
                                       {{"model", model_descriptor(v)},
                                        {"model_hash", model_hash(v)},
                                        {"delta", num(o.delta)},
                                        {"b00", num(ctx.b(0, 0))},
                                        {"b01", num(ctx.b(0, 1))},
                                        {"b10", num(ctx.b(1, 0))},
                                        {"b11", num(ctx.b(1, 1))}}));
}

inline void task_evolve(const Json& c, const PotentialModel& v, RunContext& rc, bool fdtd_only) {
  if (fdtd_only)
    config::allow(c, "fdtd", {"data", "observer", "t_max", "dx", "times"});
  else
    config::allow(c, "evolve", {"data", "observer", "times", "mode", "method", "lambda_min", "lambda_max",
                                "panel_width", "fourier_tol", "rolloff", "allow_resonant", "t_max", "dx"});
  require(c.contains("data"), ErrorCode::config_invalid, "missing 'data'");
  auto d = config::data(c["data"]);
  double x = config::number(c, "observer", 0.0);
  std::string method = fdtd_only ? "fdtd" : config::text(c, "method", "spectral");
  Metadata meta{{"model", model_descriptor(v)}, {"model_hash", model_hash(v)}, {"data", d.label}};
  EvolutionResult r;
  if (method == "fdtd") {
    double tmax = c.contains("t_max") ? config::number(c, "t_max") : config::times(c, "times").back();
    double dx = config::number(c, "dx", 0.05);
    rc.tolerances["dx"] = dx;
    r = evolve_fdtd(v, d, x, tmax, dx);
  } else if (method == "spectral") {
    std::string mode = config::text(c, "mode", "full");
    EvolutionMode m = mode == "sine"     ? EvolutionMode::sine
                      : mode == "cosine" ? EvolutionMode::cosine
                      : mode == "full"   ? EvolutionMode::full
                                         : throw Error(ErrorCode::config_invalid, "mode: sine, cosine or full");
    SpectralEvolutionOptions o;
    o.lambda_min = config::number(c, "lambda_min", o.lambda_min);
    o.lambda_max = config::number(c, "lambda_max", o.lambda_max);
    o.panel_width = config::number(c, "panel_width", o.panel_width);
    o.fourier_tol = config::number(c, "fourier_tol", o.fourier_tol);
    o.rolloff = config::number(c, "rolloff", o.rolloff);
    if (c.contains("allow_resonant")) o.spectral.allow_resonant = c["allow_resonant"].get<bool>();
    o.threads = rc.threads;
    rc.tolerances["lambda_min"] = o.lambda_min;
    rc.tolerances["fourier_tol"] = o.fourier_tol;
    rc.tolerances["delta"] = o.spectral.delta;
    meta.push_back({"mode", mode});
    r = evolve_spectral(v, d, x, config::times(c, "times"), m, o);
  } else if (method == "dalembert") {
    require(v.kind == PotentialKind::zero, ErrorCode::config_invalid, "dalembert needs potential.kind = zero");
    r = evolve_dalembert(d, x, config::times(c, "times"));
  } else {
    throw Error(ErrorCode::config_invalid, "method: spectral, fdtd or dalembert");
  }
  rc.emit("series.csv", series_csv(r, meta));
}

inline void task_fit(const Json& c, RunContext& rc, const std::filesystem::path& base) {
  config::allow(c, "fit", {"series", "window", "auto_range", "spread"});
  std::string path = config::text(c, "series", "");
  require(!path.empty(), ErrorCode::config_invalid, "fit: missing 'series'");
  std::filesystem::path p(path);
  if (p.is_relative()) p = base / p;
  std::string body = read_file(p.string());
  auto s = read_series_csv(body);
  Json out;
  std::vector<std::string> prov{"file:" + file_hash(body), "series:" + series_hash(s)};
  if (c.contains("window")) {
    auto w = config::numbers(c, "window");
    require(w.size() == 2, ErrorCode::config_invalid, "window: [t0, t1]");
    out["fixed"] = fit_json(fit_tail_exponent(s, w[0], w[1]), prov);
  }
  // The auto window is always reported next to a fixed one.
  std::vector<double> range{s.times.front(), s.times.back()};
  if (c.contains("auto_range")) range = config::numbers(c, "auto_range");
  require(range.size() == 2, ErrorCode::config_invalid, "auto_range: [lo, hi]");
  out["auto"] = fit_json(fit_tail_exponent_auto(s, range[0], range[1], config::number(c, "spread", 0.1)), prov);
  rc.emit("fit.json", out.dump(2) + "\n");
}

inline void task_verify(const std::string& suite, RunContext& rc, Json& manifest) {
  VerifyOptions o;
  o.threads = rc.threads;
  auto rep = verify(suite, o);
  rc.emit("verify.json", verify_json(rep).dump(2) + "\n");
  manifest["all_pass"] = rep.all_pass();
  auto& lines = manifest["criteria"] = Json::array();
  for (const auto& c : rep.criteria) lines.push_back(format_line(c));
}

}  // namespace detail

struct RunRequest {
  Json config;
  std::filesystem::path out;         // overrides config "output_dir" when non-empty
  int threads = 0;                   // overrides config "threads" when > 0
  std::string suite;                 // overrides config "verify.suite"
  std::filesystem::path config_dir;  // base for relative paths inside the config
};

// Never throws for config or numerical errors; they land in the manifest.
inline RunResult run(const RunRequest& req) {
  auto start = std::chrono::steady_clock::now();
  RunResult res;
  Json& m = res.manifest;
  m["tool"] = "jostlab";
  m["version"] = kVersion;
  m["config"] = req.config;
  detail::RunContext rc;
  try {
    const Json& c = req.config;
    config::allow(c, "config", {"task", "potential", "output_dir", "threads", "deterministic", "jost",
                                "lowenergy", "spectral", "evolve", "fdtd", "fit", "verify"});
    std::string task = config::text(c, "task", "");
    m["task"] = task;
    rc.out = !req.out.empty() ? req.out : std::filesystem::path(config::text(c, "output_dir", "out"));
    rc.threads = req.threads > 0 ? req.threads
                 : c.contains("threads") ? static_cast<int>(config::number(c, "threads"))
                                         : default_threads();
    require(rc.threads >= 1, ErrorCode::config_invalid, "threads must be >= 1");
    m["threads"] = rc.threads;
    std::filesystem::create_directories(rc.out);
    auto block = [&](const char* k) -> Json {
      require(c.contains(k), ErrorCode::config_invalid, std::string("task ") + k + " needs a '" + k + "' block");
      return c[k];
    };
    auto model = [&] {
      require(c.contains("potential"), ErrorCode::config_invalid, "missing 'potential'");
      auto v = config::potential(c["potential"]);
      m["model_hash"] = model_hash(v);
      return v;
    };
    if (task == "jost") {
      auto v = model();
      detail::task_jost(block("jost"), v, rc);
    } else if (task == "lowenergy") {
      auto v = model();
      detail::task_lowenergy(block("lowenergy"), v, rc);
    } else if (task == "spectral") {
      auto v = model();
      detail::task_spectral(block("spectral"), v, rc);
    } else if (task == "evolve" || task == "fdtd") {
      auto v = model();
      detail::task_evolve(block(task.c_str()), v, rc, task == "fdtd");
      m["method"] = task == "fdtd" ? "fdtd" : config::text(c["evolve"], "method", "spectral");
    } else if (task == "fit") {
      detail::task_fit(block("fit"), rc, req.config_dir);
    } else if (task == "verify") {
      std::string suite = req.suite;
      if (suite.empty() && c.contains("verify")) {
        config::allow(c["verify"], "verify", {"suite"});
        suite = config::text(c["verify"], "suite", "");
      }
      require(!suite.empty(), ErrorCode::config_invalid, "verify: no suite given");
      m["suite"] = suite;
      detail::task_verify(suite, rc, m);
    } else {
      throw Error(ErrorCode::config_invalid,
                  "task must be one of jost, lowenergy, spectral, evolve, fdtd, fit, verify");
    }
    m["status"] = "ok";
  } catch (const Error& e) {
    m["status"] = "error";
    m["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    res.exit_status = exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    m["status"] = "error";
    m["error"] = {{"code", to_string(ErrorCode::config_invalid)}, {"message", e.what()}};
    res.exit_status = 2;
  } catch (const std::filesystem::filesystem_error& e) {
    m["status"] = "error";
    m["error"] = {{"code", to_string(ErrorCode::config_invalid)}, {"message", e.what()}};
    res.exit_status = 2;
  }
  m["artifacts"] = rc.artifacts;
  m["tolerances"] = rc.tolerances;
  m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!rc.out.empty() && std::filesystem::is_directory(rc.out))
    write_file((rc.out / "manifest.json").string(), m.dump(2) + "\n");
  return res;
}

}  // namespace jostlab
