#pragma once

#include <algorithm>
#include <cmath>

#include "jumpldp/errors.hpp"
#include "jumpldp/types.hpp"

namespace jumpldp {

/// Per-jump entropy cost of dilating a unit-mean exponential: x log x - x + 1.
/// Convex, minimum 0 at x = 1, and ell(0) = 1 by the 0 log 0 = 0 convention.
inline double ell(double x) {
  if (x < 0.0) throw DomainError("ell: argument must be nonnegative");
  if (x == 0.0) return 1.0;
  return x * std::log(x) - x + 1.0;
}

/// Minimal relative-entropy cost among mean-b distortions of a unit-mean
/// exponential: -log b + b - 1. Satisfies g(x) = x * ell(1/x) for x > 0.
inline double g(double b) {
  if (b <= 0.0) throw DomainError("g: argument must be positive");
  return -std::log(b) + b - 1.0;
}

/// Relative entropy of one distribution row against another, with the
/// 0 log 0 = 0 convention. Infinite when p charges a null state of q.
template <typename VecA, typename VecB>
ExtReal rel_entropy(const VecA& p, const VecB& q) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    if (q[i] <= 0.0) return ExtReal::infinity();
    acc += pi * std::log(pi / q[i]);
  }
  return ExtReal::finite(acc);
}

struct GridSpec {
  double upper = 40.0;  // grid covers [0, upper]
  int cells = 4000;
};

struct MeanEntropyResult {
  double analytic;      // g(b)
  double brute;         // grid-restricted minimum
  double grid_bound;    // reported discretization scale (cell width squared)
};

namespace detail {

// Cell masses of an exponential with mean m, truncated to [0, upper] and
// renormalized. Also returns the grid mean taken at cell midpoints.
inline void exp_cells(double m, const GridSpec& grid, std::vector<double>& mass,
                      double& grid_mean) {
  const double h = grid.upper / grid.cells;
  mass.assign(static_cast<std::size_t>(grid.cells), 0.0);
  double total = 0.0;
  for (int i = 0; i < grid.cells; ++i) {
    const double a = i * h;
    const double b = (i + 1) * h;
    const double w = std::exp(-a / m) - std::exp(-b / m);
    mass[static_cast<std::size_t>(i)] = w;
    total += w;
  }
  grid_mean = 0.0;
  for (int i = 0; i < grid.cells; ++i) {
    mass[static_cast<std::size_t>(i)] /= total;
    grid_mean += mass[static_cast<std::size_t>(i)] * (i + 0.5) * h;
  }
}

}  // namespace detail

/// Checks the closed form g(b) for inf{ R(gamma || Exp(1)) : mean(gamma) = b }
/// against a brute-force evaluation on a discretized half-line. The minimizer
/// family is exponential, so the brute side scans grid-restricted exponentials
/// whose grid mean is tuned to b by bisection.
inline MeanEntropyResult min_entropy_given_mean(double b, const GridSpec& grid = {}) {
  if (b <= 0.0) throw DomainError("min_entropy_given_mean: b must be positive");
  if (grid.cells < 8) throw GridError("min_entropy_given_mean: grid too coarse");
  if (grid.upper < 20.0 * std::max(b, 1.0))
    throw GridError("min_entropy_given_mean: grid upper end must cover 20*max(b,1)");

  const double h = grid.upper / grid.cells;
  std::vector<double> ref, cand;
  double ref_mean = 0.0;
  detail::exp_cells(1.0, grid, ref, ref_mean);

  // Bisection on the (monotone) grid mean of the truncated exponential family.
  double lo = h / 16.0, hi = grid.upper;
  double mean_lo, mean_hi;
  detail::exp_cells(lo, grid, cand, mean_lo);
  detail::exp_cells(hi, grid, cand, mean_hi);
  if (b <= mean_lo || b >= mean_hi)
    throw GridError("min_entropy_given_mean: mean not representable on grid");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double mean_mid;
    detail::exp_cells(mid, grid, cand, mean_mid);
    (mean_mid < b ? lo : hi) = mid;
    if (hi - lo < 1e-14 * hi) break;
  }
  double mean_fin;
  detail::exp_cells(0.5 * (lo + hi), grid, cand, mean_fin);

  double brute = 0.0;
  for (int i = 0; i < grid.cells; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (cand[k] > 0.0) brute += cand[k] * std::log(cand[k] / ref[k]);
  }
  return {g(b), brute, h * h};
}

}  // namespace jumpldp
