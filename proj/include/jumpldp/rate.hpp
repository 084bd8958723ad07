#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "jumpldp/entropy.hpp"
#include "jumpldp/errors.hpp"
#include "jumpldp/measure.hpp"
#include "jumpldp/process_model.hpp"

namespace jumpldp {

/// Value and terms of the empirical-measure rate function
///   I(eta) = sum_x q(x) eta(x)
///          - sum_{x,y} sqrt(theta(x)) sqrt(theta(y)) q(x) alpha(x,y) pi(x),
/// where theta = d(eta)/d(pi). Zero-density states contribute literal zero
/// factors to the second term.
struct RateResult {
  double value;
  double first_term;
  double second_term;
  Vec theta;
};

inline RateResult rate_explicit(const ProcessSpec& spec, const ProbMeasure& eta) {
  if (eta.n() != spec.n()) throw DimensionError("rate_explicit: state count mismatch");
  const Vec theta = eta.theta ? *eta.theta : eta.w.cwiseQuotient(spec.pi);
  const Vec s = theta.cwiseSqrt();
  const Mat flux = spec.detailed_balance_flux();
  const double second = s.dot(flux * s);
  const double first = spec.q.dot(eta.w);
  return {first - second, first, second, theta};
}

struct OracleResult {
  double value;
  int iterations;
  double residual;  // sup-norm of the gradient at the returned point
};

/// Solves the variational form sup_{u > 0} -∫ (Lu/u) d(eta) in log
/// coordinates v = log u with v(0) pinned, by BFGS ascent with backtracking.
/// The objective is smooth and concave in v; pinning removes the shift
/// direction. Restricted to interior measures (min theta >= 1e-6).
inline OracleResult rate_variational_oracle(const ProcessSpec& spec, const ProbMeasure& eta,
                                            double tol = 1e-9, int max_iterations = 500) {
  if (eta.n() != spec.n()) throw DimensionError("rate_variational_oracle: state count mismatch");
  if (tol <= 0.0) throw DomainError("rate_variational_oracle: tol must be positive");
  const Vec theta = eta.theta ? *eta.theta : eta.w.cwiseQuotient(spec.pi);
  if (theta.minCoeff() < 1e-6)
    throw DomainError("rate_variational_oracle: theta has (near-)zeros; interior measures only");

  const int n = spec.n();
  const int m = n - 1;
  const Vec c = eta.w.cwiseProduct(spec.q);
  const double c_total = c.sum();

  // Objective in full coordinates: G(v) = sum_x c(x) (1 - sum_y alpha(x,y) e^{v(y)-v(x)}).
  auto eval = [&](const Vec& z, Vec* grad) {
    Vec v(n);
    v[0] = 0.0;
    for (int i = 0; i < m; ++i) v[i + 1] = z[i];
    double pairing = 0.0;
    Vec row_sum = Vec::Zero(n), col_sum = Vec::Zero(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const double a = spec.alpha(x, y);
        if (a == 0.0) continue;
        const double e = c[x] * a * std::exp(v[y] - v[x]);
        pairing += e;
        row_sum[x] += e;
        col_sum[y] += e;
      }
    if (grad) {
      for (int i = 0; i < m; ++i) (*grad)[i] = row_sum[i + 1] - col_sum[i + 1];
    }
    return c_total - pairing;
  };

  if (m == 0) return {0.0, 0, 0.0};

  // Minimize phi = -G by BFGS with Armijo backtracking.
  Vec z = Vec::Zero(m), grad_g(m);
  double value = eval(z, &grad_g);
  Vec g = -grad_g;  // gradient of phi
  Mat h_inv = Mat::Identity(m, m);

  int it = 0;
  for (; it < max_iterations; ++it) {
    const double resid = g.cwiseAbs().maxCoeff();
    if (resid <= tol) return {value, it, resid};

    Vec d = -(h_inv * g);
    if (d.dot(g) >= 0.0) {
      h_inv.setIdentity();
      d = -g;
    }
    double t = 1.0;
    const double slope = g.dot(d);
    Vec z_new;
    double value_new = 0.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      z_new = z + t * d;
      Vec grad_new_g(m);
      value_new = eval(z_new, &grad_new_g);
      // Near the optimum the predicted decrease drops below one ulp of the
      // objective; accept such steps on the gradient's authority.
      const bool below_noise = std::abs(t * slope) <= 64.0 * 1e-16 * (1.0 + std::abs(value));
      if (std::isfinite(value_new) &&
          (below_noise || -value_new <= -value + 1e-4 * t * slope)) {
        const Vec g_new = -grad_new_g;
        const Vec step = z_new - z;
        const Vec dg = g_new - g;
        const double sy = step.dot(dg);
        if (sy > 1e-12 * step.norm() * dg.norm()) {
          const double rho = 1.0 / sy;
          const Mat left = Mat::Identity(m, m) - rho * step * dg.transpose();
          h_inv = left * h_inv * left.transpose() + rho * step * step.transpose();
        } else {
          h_inv.setIdentity();
        }
        z = z_new;
        g = g_new;
        value = value_new;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      const double resid_now = g.cwiseAbs().maxCoeff();
      if (resid_now <= 10.0 * tol) return {value, it, resid_now};
      break;
    }
  }
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) best[static_cast<std::size_t>(i + 1)] = z[i];
  throw NonConvergenceError("rate_variational_oracle: stationarity not reached", std::move(best),
                            g.cwiseAbs().maxCoeff());
}

/// The hot-cell target on the k-cell uniform model: density k-1 on one cell
/// and 1/(k-1) on the rest. As k grows these concentrate on the hot cell
/// while their rate values increase toward 1.
inline ProbMeasure dirac_cell_target(const ProcessSpec& cell_model, int hot_cell = 0) {
  const int k = cell_model.n();
  if (k < 2) throw DomainError("dirac_cell_target: need at least two cells");
  if (hot_cell < 0 || hot_cell >= k) throw DimensionError("dirac_cell_target: bad hot cell");
  Vec theta = Vec::Constant(k, 1.0 / (k - 1));
  theta[hot_cell] = static_cast<double>(k - 1);
  return measure_from_density(cell_model, theta);
}

/// The approximating family for a point mass: pairs (eta^k, I(eta^k)) on the
/// k-cell uniform model for k = 2..n. Values increase toward 1 and match
/// 1 - 4(k-1)/k^2.
inline std::vector<std::pair<ProbMeasure, double>> rate_lsc_extension_demo(int n) {
  if (n < 2) throw DomainError("rate_lsc_extension_demo: need n >= 2");
  std::vector<std::pair<ProbMeasure, double>> out;
  out.reserve(static_cast<std::size_t>(n - 1));
  for (int k = 2; k <= n; ++k) {
    const ProcessSpec model = uniform_cell_model(k);
    ProbMeasure eta = dirac_cell_target(model);
    const double value = rate_explicit(model, eta).value;
    out.emplace_back(std::move(eta), value);
  }
  return out;
}

}  // namespace jumpldp
