#pragma once

// CSV and JSON artifacts. Numbers are written with %.17g in the C locale so a
// file read back reproduces every double bit for bit.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jostlab/analysis.hpp"
#include "jostlab/evolution.hpp"
#include "jostlab/jost.hpp"
#include "jostlab/lowenergy.hpp"
#include "jostlab/spectral.hpp"
#include "jostlab/verify.hpp"

namespace jostlab {

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
  auto p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Everything that determines V. A custom evaluator is opaque and only tagged.
inline std::string model_descriptor(const PotentialModel& m) {
  std::string s = std::string("kind=") + to_string(m.kind);
  switch (m.kind) {
    case PotentialKind::regge_wheeler:
      s += ";mass=" + num(m.schwarzschild.mass) + ";sigma=" + num(m.schwarzschild.sigma);
      break;
    case PotentialKind::poschl_teller:
      s += ";n=" + std::to_string(m.pt_n);
      break;
    case PotentialKind::zero:
      break;
    default:
      s += ";alpha=" + num(m.alpha) + ";c_plus=" + num(m.c_plus) + ";c_minus=" + num(m.c_minus);
  }
  return s;
}

inline std::string model_hash(const PotentialModel& m) {
  auto d = model_descriptor(m);
  return hex(fnv1a(d.data(), d.size()));
}

inline std::string series_hash(const EvolutionResult& r) {
  std::uint64_t h = fnv1a(r.times.data(), r.times.size() * sizeof(double));
  return hex(fnv1a(r.psi.data(), r.psi.size() * sizeof(double), h));
}

inline std::string file_hash(const std::string& text) { return hex(fnv1a(text.data(), text.size())); }

namespace detail {

inline void write_header(std::ostringstream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << "\n";
}

// Panel grids repeat shared endpoints.
inline bool repeated(const std::vector<double>& xs, std::size_t i) { return i > 0 && xs[i] == xs[i - 1]; }

}  // namespace detail

inline std::string series_csv(const EvolutionResult& r, Metadata meta = {}) {
  meta.insert(meta.begin(), {{"method", to_string(r.method)}, {"observer_x", num(r.observer_x)}});
  if (r.method == Method::spectral) {
    meta.push_back({"lambda_min", num(r.lambda_min)});
    meta.push_back({"lambda_max", num(r.lambda_max)});
    meta.push_back({"rolloff_start", num(r.rolloff_start)});
    meta.push_back({"lambda_nodes", std::to_string(r.lambda_nodes)});
    meta.push_back({"regime_mismatch", num(r.regime_mismatch)});
  }
  if (r.method == Method::fdtd) {
    meta.push_back({"dx", num(r.dx)});
    meta.push_back({"dt", num(r.dt)});
    meta.push_back({"half_width", num(r.half_width)});
    meta.push_back({"energy_drift", num(r.energy_drift)});
  }
  std::ostringstream os;
  detail::write_header(os, meta);
  os << "t,psi,method,truncation_estimate\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    double tr = i < r.quadrature_report.size() ? r.quadrature_report[i].truncation_estimate : 0.0;
    os << num(r.times[i]) << ',' << num(r.psi[i]) << ',' << to_string(r.method) << ',' << num(tr) << '\n';
  }
  return os.str();
}

inline std::string jost_csv(const JostData& jd, Metadata meta = {}) {
  meta.insert(meta.begin(), {{"lambda", num(jd.lambda)},
                             {"sign", std::to_string(jd.sign)},
                             {"alpha", num(jd.alpha)},
                             {"tol", num(jd.tol)},
                             {"residual_norm", num(jd.residual_norm)},
                             {"iterations", std::to_string(jd.iteration_count)},
                             {"truncation_point", num(jd.truncation_point)},
                             {"interpolation", jd.interpolation}});
  std::ostringstream os;
  detail::write_header(os, meta);
  os << "x,re_m,im_m,re_dm,im_dm\n";
  const auto& xs = jd.grid.nodes();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (detail::repeated(xs, i)) continue;
    os << num(xs[i]) << ',' << num(jd.m_values[i].real()) << ',' << num(jd.m_values[i].imag()) << ','
       << num(jd.m_deriv[i].real()) << ',' << num(jd.m_deriv[i].imag()) << '\n';
  }
  return os.str();
}

inline std::string zero_energy_csv(const ZeroEnergySystem& zs, Metadata meta = {}) {
  meta.insert(meta.begin(), {{"sign", std::to_string(zs.sign)},
                             {"alpha", num(zs.alpha)},
                             {"c", num(zs.c)},
                             {"x1", num(zs.x1)},
                             {"alpha_const", num(zs.alpha_const)}});
  std::ostringstream os;
  detail::write_header(os, meta);
  os << "x,u0,du0,u1,du1\n";
  const auto& xs = zs.grid.nodes();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (detail::repeated(xs, i)) continue;
    os << num(xs[i]) << ',' << num(zs.u0_values[i]) << ',' << num(zs.u0_deriv[i]) << ','
       << num(zs.u1_values[i]) << ',' << num(zs.u1_deriv[i]) << '\n';
  }
  return os.str();
}

struct SpectralRow {
  ConnectionData cd;
  std::vector<double> im_green;  // one per requested (x, x') pair
};

inline std::string spectral_csv(const std::vector<SpectralRow>& rows,
                                const std::vector<std::pair<double, double>>& pairs, Metadata meta = {}) {
  std::ostringstream os;
  detail::write_header(os, meta);
  os << "lambda,re_W,im_W,re_a0m,im_a0m,re_a1m,im_a1m,re_a0p,im_a0p,re_a1p,im_a1p";
  for (const auto& [x, xp] : pairs) os << ",im_G(" << num(x) << ";" << num(xp) << ")";
  os << '\n';
  for (const auto& r : rows) {
    os << num(r.cd.lambda) << ',' << num(r.cd.wronskian.real()) << ',' << num(r.cd.wronskian.imag());
    // a_j^+- exist only where the matched regime was evaluated
    for (int s = 0; s < 2; ++s)
      for (int j = 0; j < 2; ++j)
        if (r.cd.wronskian_matched)
          os << ',' << num(r.cd.a[s][j].real()) << ',' << num(r.cd.a[s][j].imag());
        else
          os << ",nan,nan";
    for (double g : r.im_green) os << ',' << num(g);
    os << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json fit_json(const FitReport& f, const std::vector<std::string>& provenance) {
  nlohmann::ordered_json j;
  j["exponent"] = f.exponent;
  j["exponent_stderr"] = f.exponent_stderr;
  j["window"] = {f.t0, f.t1};
  j["method"] = to_string(f.method);
  j["auto_window"] = f.auto_window;
  j["reliable"] = f.reliable;
  j["samples"] = f.samples;
  auto& li = j["local_index_series"] = nlohmann::ordered_json::array();
  for (const auto& [t, p] : f.local_index_series) li.push_back({t, p});
  j["series_provenance"] = provenance;
  return j;
}

inline nlohmann::ordered_json verify_json(const VerifyReport& rep) {
  nlohmann::ordered_json j;
  j["suite"] = rep.suite;
  j["all_pass"] = rep.all_pass();
  auto& cs = j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& c : rep.criteria)
    cs.push_back({{"id", c.id},
                  {"name", c.name},
                  {"pass", c.pass},
                  {"measured", c.measured},
                  {"target", c.target},
                  {"tolerance", c.tolerance},
                  {"detail", c.detail},
                  {"seconds", c.seconds}});
  return j;
}

// Parses the CSV written by series_csv; metadata lines are skipped.
inline EvolutionResult read_series_csv(const std::string& text) {
  EvolutionResult r;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      require(line.rfind("t,psi", 0) == 0, ErrorCode::config_invalid, "series csv: missing header");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string a, b, m;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, m, ',');
    try {
      r.times.push_back(std::stod(a));
      r.psi.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw Error(ErrorCode::config_invalid, "series csv: bad row '" + line + "'");
    }
    r.method = m == "fdtd" ? Method::fdtd : m == "dalembert" ? Method::dalembert : Method::spectral;
  }
  require(header, ErrorCode::config_invalid, "series csv: empty");
  return r;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::config_invalid, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::config_invalid, "cannot write '" + path + "'");
  out << text;
}

}  // namespace jostlab
