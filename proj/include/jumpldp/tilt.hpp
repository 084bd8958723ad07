#pragma once

#include <cmath>
#include <limits>

#include "jumpldp/entropy.hpp"
#include "jumpldp/errors.hpp"
#include "jumpldp/rate.hpp"

namespace jumpldp {

/// The optimal change of measure driving the empirical measure to a target
/// eta. The tilted process jumps from x with unit-scale clock rate
/// tau_rate(x) = A kappa(x) (so the time sojourn in x is exponential with
/// rate A kappa(x) q(x)) and lands according to the tilted kernel row p(x, .).
///
/// mu is the symmetric pair measure whose conditional rows give p; its
/// marginal mu1 is stationary for p. kappa is the dilation field
/// d[mu]_1 / d(q theta pi) on the support of eta. States with zero target
/// density keep the original kernel row and clock (they are unreachable under
/// the tilt and carry no target mass); there xi_atom = 0.
struct TiltedDynamics {
  Mat p;
  double rate_scalar = 0.0;  // A: long-run jumps per unit time
  Vec kappa;                 // dilation field; 0 marks off-support states
  Vec tau_rate;              // A*kappa on support, 1 off support
  Vec xi_atom;               // b(x): A*kappa on support, 0 off support
  Vec xi_mass;               // q(x) eta(x)
  Mat mu;
  Vec mu1;

  int n() const { return static_cast<int>(tau_rate.size()); }

  /// Mean of the tilted unit-scale clock in x; +inf under the frozen branch.
  double sojourn_mean(int x) const {
    const double r = tau_rate[x];
    return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
  }
};

/// Accumulated relative-entropy costs of a tilt, in nats per unit time.
/// For synthesized tilts total reproduces the rate function value.
struct CostLedger {
  double chain_cost = 0.0;  // A * R(mu || mu1 x alpha)
  double time_cost = 0.0;   // sum ell(b(x)) q(x) eta(x)
  double total = 0.0;
};

struct ConstraintReport {
  double marginal_gap = 0.0;   // max |[mu]_1 - [mu]_2|
  double intensity_gap = 0.0;  // max |q eta - xi mass|
  double mean_gap = 0.0;       // max |b q eta - A [mu]_1|

  double worst() const { return std::max({marginal_gap, intensity_gap, mean_gap}); }
};

inline ExtReal kernel_relative_entropy(const Vec& p_row, const Vec& alpha_row) {
  if (p_row.size() != alpha_row.size())
    throw DimensionError("kernel_relative_entropy: row length mismatch");
  return rel_entropy(p_row, alpha_row);
}

/// Builds the optimal tilt for (spec, eta). When the Dirichlet pairing
/// sum sqrt(theta(x)) sqrt(theta(y)) q(x) alpha(x,y) pi(x) vanishes, the
/// degenerate branch freezes the clock (A = 0, xi atoms at 0).
inline TiltedDynamics synthesize_tilt(const ProcessSpec& spec, const ProbMeasure& eta) {
  const int n = spec.n();
  if (eta.n() != n) throw DimensionError("synthesize_tilt: state count mismatch");
  const Vec theta = eta.theta ? *eta.theta : eta.w.cwiseQuotient(spec.pi);
  for (int x = 0; x < n; ++x)
    if (eta.w[x] > 0.0 && !(spec.pi[x] > 0.0))
      throw DegenerateSupportError("synthesize_tilt: target charges a null state");

  const Vec s = theta.cwiseSqrt();
  const Mat flux = spec.detailed_balance_flux();
  Mat pair = s.asDiagonal() * flux * s.asDiagonal();  // symmetric, >= 0
  const double pairing = pair.sum();

  TiltedDynamics tilt;
  tilt.xi_mass = spec.q.cwiseProduct(eta.w);

  if (pairing <= 0.0) {
    tilt.rate_scalar = 0.0;
    tilt.mu = spec.pi_tilde.asDiagonal() * spec.alpha;
    tilt.mu1 = spec.pi_tilde;
    tilt.p = spec.alpha;
    tilt.kappa = Vec::Zero(n);
    tilt.xi_atom = Vec::Zero(n);
    tilt.tau_rate = Vec::Ones(n);
    for (int x = 0; x < n; ++x)
      if (eta.w[x] > 0.0) tilt.tau_rate[x] = 0.0;
    return tilt;
  }

  tilt.rate_scalar = pairing;  // A equals the Dirichlet pairing
  tilt.mu = pair / pairing;
  tilt.mu1 = tilt.mu.rowwise().sum();
  tilt.p = Mat(n, n);
  tilt.kappa = Vec::Zero(n);
  tilt.xi_atom = Vec::Zero(n);
  tilt.tau_rate = Vec::Ones(n);
  for (int x = 0; x < n; ++x) {
    if (tilt.mu1[x] > 0.0) tilt.p.row(x) = tilt.mu.row(x) / tilt.mu1[x];
    else tilt.p.row(x) = spec.alpha.row(x);
    if (eta.w[x] > 0.0) {
      tilt.kappa[x] = tilt.mu1[x] / (spec.q[x] * eta.w[x]);
      tilt.xi_atom[x] = tilt.rate_scalar * tilt.kappa[x];
      tilt.tau_rate[x] = tilt.xi_atom[x];
    }
  }

  // eta is stationary for the tilted generator by construction; verify.
  Vec balance = Vec::Zero(n);
  for (int y = 0; y < n; ++y) {
    double acc = 0.0;
    for (int x = 0; x < n; ++x) {
      const double out_rate = tilt.tau_rate[x] * spec.q[x] * eta.w[x];
      acc += out_rate * (tilt.p(x, y) - (x == y ? 1.0 : 0.0));
    }
    balance[y] = acc;
  }
  if (balance.cwiseAbs().maxCoeff() > 1e-10)
    throw MismatchError("synthesize_tilt: target is not stationary for the tilted generator");

  return tilt;
}

/// Verifies the by-construction identities linking mu, xi and the target.
inline ConstraintReport check_constraints(const ProcessSpec& spec, const ProbMeasure& eta,
                                          const TiltedDynamics& tilt) {
  if (eta.n() != spec.n() || tilt.n() != spec.n())
    throw DimensionError("check_constraints: state count mismatch");
  ConstraintReport rep;
  const Vec mu2 = tilt.mu.colwise().sum();
  rep.marginal_gap = (tilt.mu1 - mu2).cwiseAbs().maxCoeff();
  rep.intensity_gap = (spec.q.cwiseProduct(eta.w) - tilt.xi_mass).cwiseAbs().maxCoeff();
  rep.mean_gap = (tilt.xi_atom.cwiseProduct(tilt.xi_mass) - tilt.rate_scalar * tilt.mu1)
                     .cwiseAbs()
                     .maxCoeff();
  return rep;
}

/// Splits the entropy cost of a synthesized tilt into its chain and sojourn
/// parts; the total reproduces rate_explicit(spec, eta).
inline CostLedger entropy_decomposition(const ProcessSpec& spec, const ProbMeasure& eta,
                                        const TiltedDynamics& tilt) {
  const ConstraintReport rep = check_constraints(spec, eta, tilt);
  if (rep.worst() > 1e-9)
    throw MismatchError("entropy_decomposition: tilt does not match this target (violation " +
                        std::to_string(rep.worst()) + ")");
  const int n = spec.n();
  CostLedger ledger;
  if (tilt.rate_scalar > 0.0) {
    double re = 0.0;
    for (int x = 0; x < n; ++x) {
      if (tilt.mu1[x] <= 0.0) continue;
      const ExtReal row = rel_entropy(tilt.p.row(x), spec.alpha.row(x));
      if (!row.is_finite())
        throw MismatchError("entropy_decomposition: tilted kernel charges a null transition");
      re += tilt.mu1[x] * row.value;
    }
    ledger.chain_cost = tilt.rate_scalar * re;
  }
  for (int x = 0; x < n; ++x) {
    if (eta.w[x] <= 0.0) continue;
    ledger.time_cost += ell(tilt.xi_atom[x]) * spec.q[x] * eta.w[x];
  }
  ledger.total = ledger.chain_cost + ledger.time_cost;
  return ledger;
}

}  // namespace jumpldp
