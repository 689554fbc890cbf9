// Independent reference computations used by the tests. None of these call
// into the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "bragg/core.hpp"

namespace oracles {

/// Gaps of the Fibonacci word (a -> ab, b -> a) laid out from 0 with a = tau,
/// b = 1, keeping gaps whose right end is at most `length`.
inline std::vector<double> fibonacci_gaps(double length) {
  std::string w = "a";
  while (static_cast<double>(w.size()) < length + 2) {
    std::string next;
    for (char c : w) next += c == 'a' ? "ab" : "a";
    w = next;
  }
  const double tau = std::numbers::phi;
  std::vector<double> gaps;
  double x = 0;
  for (char c : w) {
    const double g = c == 'a' ? tau : 1.0;
    if (x + g > length + 1e-9) break;
    gaps.push_back(g);
    x += g;
  }
  return gaps;
}

inline double brute_min_gap(const std::vector<bragg::Point>& pts) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) m = std::min(m, bragg::distance(pts[i], pts[j]));
  return m;
}

inline double brute_min_positive_difference(const std::vector<bragg::Point>& pts) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pts)
    for (const auto& q : pts)
      if (p[0] - q[0] > 1e-9) m = std::min(m, p[0] - q[0]);
  return m;
}

/// max over t of #{x : t <= x <= t + len}, anchored at every point.
inline std::size_t brute_window_count(const std::vector<bragg::Point>& pts, double len) {
  std::size_t best = 0;
  for (const auto& a : pts) {
    std::size_t c = 0;
    for (const auto& p : pts)
      if (p[0] >= a[0] - 1e-12 && p[0] <= a[0] + len + 1e-12) ++c;
    best = std::max(best, c);
  }
  return best;
}

inline std::size_t brute_box_count_2d(const std::vector<bragg::Point>& pts, double side) {
  std::size_t best = 0;
  for (const auto& ax : pts)
    for (const auto& ay : pts) {
      std::size_t c = 0;
      for (const auto& p : pts)
        if (p[0] >= ax[0] - 1e-12 && p[0] <= ax[0] + side + 1e-12 && p[1] >= ay[1] - 1e-12 &&
            p[1] <= ay[1] + side + 1e-12)
          ++c;
      best = std::max(best, c);
    }
  return best;
}

/// Max count in a closed unit interval of I - I, I = (Z u pi Z) in [-pi N, pi N],
/// with the differences enumerated as m + pi n.
inline std::size_t zpz_difference_count(int n_range) {
  const double pi = std::numbers::pi;
  const long M = static_cast<long>(std::floor(pi * n_range + 1e-9));
  std::vector<double> v;
  for (long m = -2 * M; m <= 2 * M; ++m) v.push_back(static_cast<double>(m));
  for (long k = -2 * n_range; k <= 2 * n_range; ++k) v.push_back(pi * static_cast<double>(k));
  for (long m = -M; m <= M; ++m)
    for (long k = -n_range; k <= n_range; ++k) {
      v.push_back(static_cast<double>(m) - pi * static_cast<double>(k));
      v.push_back(pi * static_cast<double>(k) - static_cast<double>(m));
    }
  std::sort(v.begin(), v.end());
  std::vector<double> u;
  for (double x : v)
    if (u.empty() || x - u.back() > 1e-9) u.push_back(x);
  std::size_t best = 0, j = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    while (u[i] - u[j] > 1.0 + 1e-12) ++j;
    best = std::max(best, i - j + 1);
  }
  return best;
}

/// Gauss-Legendre nodes and weights on [a, b].
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * z;
    w[i] = (b - a) / ((1 - z * z) * dp * dp);
  }
}

/// |boundary_R [-s, s]^d| / (2s)^d with the outer shell integrated slice by
/// slice (u = R sin(theta) on the rounded caps).
inline double van_hove_ratio_quadrature(int d, double s, double R) {
  const double side = 2 * s, vol = std::pow(side, d);
  auto slice = [&](double rho) {  // (d-1)-dimensional parallel volume of the square/segment
    if (d == 2) return side + 2 * rho;
    return side * side + 4 * side * rho + std::numbers::pi * rho * rho;
  };
  double outer;
  if (d == 1) {
    outer = 2 * R;
  } else {
    std::vector<double> th, wt;
    gauss_legendre(40, 0.0, std::numbers::pi / 2, th, wt);
    double cap = 0;
    for (std::size_t i = 0; i < th.size(); ++i) cap += wt[i] * slice(R * std::cos(th[i])) * R * std::cos(th[i]);
    outer = side * slice(R) + 2 * cap - vol;
  }
  const double inner = vol - std::pow(std::max(0.0, side - 2 * R), d);
  return (outer + inner) / vol;
}

}  // namespace oracles
