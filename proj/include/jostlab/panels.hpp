#pragma once

// Piecewise Chebyshev-Lobatto discretisation used by every Volterra solver:
// per-panel spectral interpolation and cumulative integration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "jostlab/error.hpp"

namespace jostlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule make_gauss_legendre(std::size_t n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.nodes[n - 1 - i] = z;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_legendre(std::size_t n) {
  static const std::array<GaussRule, 65> rules = [] {
    std::array<GaussRule, 65> a;
    for (std::size_t k = 1; k < a.size(); ++k) a[k] = make_gauss_legendre(k);
    return a;
  }();
  require(n >= 1 && n < rules.size(), ErrorCode::contract_violation,
          "gauss_legendre: unsupported order");
  return rules[n];
}

// Chebyshev-Lobatto rule of fixed degree P on [-1, 1].
template <std::size_t P>
struct ChebyshevRule {
  std::array<double, P + 1> t{};
  std::array<double, P + 1> bary{};
  // cumulative[i][j]: weight of f(t_j) in the integral from -1 to t_i.
  std::array<std::array<double, P + 1>, P + 1> cumulative{};

  ChebyshevRule() {
    for (std::size_t i = 0; i <= P; ++i) {
      t[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(P));
      bary[i] = (i % 2 == 0 ? 1.0 : -1.0) * ((i == 0 || i == P) ? 0.5 : 1.0);
    }
    t[0] = -1.0;
    t[P] = 1.0;
    const GaussRule& g = gauss_legendre(P / 2 + 2);
    for (std::size_t i = 1; i <= P; ++i) {
      double lo = -1.0, hi = t[i];
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        double s = lo + 0.5 * (g.nodes[q] + 1.0) * (hi - lo);
        double w = 0.5 * (hi - lo) * g.weights[q];
        auto l = basis(s);
        for (std::size_t j = 0; j <= P; ++j) cumulative[i][j] += w * l[j];
      }
    }
  }

  // Lagrange basis values at s.
  std::array<double, P + 1> basis(double s) const {
    std::array<double, P + 1> l{};
    for (std::size_t j = 0; j <= P; ++j) {
      if (s == t[j]) {
        l[j] = 1.0;
        return l;
      }
    }
    double den = 0.0;
    for (std::size_t j = 0; j <= P; ++j) {
      l[j] = bary[j] / (s - t[j]);
      den += l[j];
    }
    for (auto& v : l) v /= den;
    return l;
  }

  static const ChebyshevRule& get() {
    static const ChebyshevRule r;
    return r;
  }
};

inline constexpr std::size_t kPanelDegree = 16;
inline constexpr std::size_t kPanelNodes = kPanelDegree + 1;
using PanelRule = ChebyshevRule<kPanelDegree>;

// Panels [breaks[p], breaks[p+1]] each carrying kPanelNodes Lobatto nodes.
// Panel endpoints are duplicated between neighbours.
class PanelGrid {
 public:
  PanelGrid() = default;
  explicit PanelGrid(std::vector<double> breaks) : breaks_(std::move(breaks)) {
    require(breaks_.size() >= 2, ErrorCode::contract_violation, "PanelGrid: need >= 2 breaks");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      require(breaks_[i] > breaks_[i - 1], ErrorCode::contract_violation,
              "PanelGrid: breaks must increase");
    const auto& r = PanelRule::get();
    nodes_.reserve(panels() * kPanelNodes);
    for (std::size_t p = 0; p < panels(); ++p) {
      double a = breaks_[p], b = breaks_[p + 1];
      for (std::size_t i = 0; i < kPanelNodes; ++i)
        nodes_.push_back(i == 0 ? a : i == kPanelDegree ? b : a + 0.5 * (r.t[i] + 1.0) * (b - a));
    }
  }

  std::size_t panels() const { return breaks_.size() - 1; }
  std::size_t size() const { return nodes_.size(); }
  double lo() const { return breaks_.front(); }
  double hi() const { return breaks_.back(); }
  double x(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& breaks() const { return breaks_; }
  double width(std::size_t p) const { return breaks_[p + 1] - breaks_[p]; }
  static std::size_t index(std::size_t panel, std::size_t local) {
    return panel * kPanelNodes + local;
  }

  bool contains(double x) const { return x >= lo() && x <= hi(); }

  std::size_t panel_of(double x) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t p = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return std::min(p, panels() - 1);
  }

  // Node index holding exactly x, if x is a panel break.
  std::ptrdiff_t break_node(double x) const {
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
    if (it == breaks_.end() || *it != x) return -1;
    std::size_t b = static_cast<std::size_t>(it - breaks_.begin());
    return b == 0 ? 0 : static_cast<std::ptrdiff_t>(index(b - 1, kPanelDegree));
  }

  // Spectral interpolation of nodal values at x.
  template <class T>
  T interpolate(std::span<const T> values, double x) const {
    require(contains(x), ErrorCode::out_of_range, "PanelGrid: interpolation point outside grid");
    std::size_t p = panel_of(x);
    double a = breaks_[p], b = breaks_[p + 1];
    auto l = PanelRule::get().basis(2.0 * (x - a) / (b - a) - 1.0);
    T s{};
    for (std::size_t i = 0; i < kPanelNodes; ++i) s += l[i] * values[index(p, i)];
    return s;
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> nodes_;
};

// Builds panel breaks on [lo, hi] containing every point of `required` that
// lies inside, with panel widths bounded by max_width(x) evaluated at the
// panel end nearest the origin.
inline std::vector<double> build_breaks(double lo, double hi, std::vector<double> required,
                                        const std::function<double(double)>& max_width) {
  required.push_back(lo);
  required.push_back(hi);
  if (lo < 0.0 && hi > 0.0) required.push_back(0.0);
  std::erase_if(required, [&](double v) { return v < lo || v > hi; });
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());

  std::vector<double> out{required.front()};
  for (std::size_t k = 1; k < required.size(); ++k) {
    double a = required[k - 1], b = required[k];
    std::vector<double> seg;
    if (a >= 0.0) {
      double x = a;
      while (true) {
        double w = max_width(x);
        if (x + 1.05 * w >= b) break;
        x += w;
        seg.push_back(x);
      }
    } else {
      double x = b;
      while (true) {
        double w = max_width(x);
        if (x - 1.05 * w <= a) break;
        x -= w;
        seg.push_back(x);
      }
      std::reverse(seg.begin(), seg.end());
    }
    out.insert(out.end(), seg.begin(), seg.end());
    out.push_back(b);
  }
  return out;
}

}  // namespace jostlab
