#pragma once

// Shared test scaffolding: randomized reversible models, interior targets,
// and perturbed feasible triples for the lower-bound property.

#include <utility>
#include <vector>

#include "jumpldp/process_model.hpp"
#include "jumpldp/rng.hpp"
#include "jumpldp/tilt.hpp"

namespace jumpldp::testkit {

using jumpldp::rng::Stream;

// Random reversible model: draw q and a stationary law, then balance a random
// symmetric positive matrix to the flux row sums q(x) pi(x) by symmetric
// Sinkhorn scaling. Detailed balance holds to rounding by construction.
inline ProcessSpec random_reversible_spec(int n, Stream& stream, double q_lo = 0.5,
                                          double q_hi = 3.0) {
  Vec q(n), pi(n);
  for (int i = 0; i < n; ++i) q[i] = q_lo + (q_hi - q_lo) * stream.next_unit();
  for (int i = 0; i < n; ++i) pi[i] = 0.2 + stream.next_unit();
  pi /= pi.sum();
  const Vec row_target = q.cwiseProduct(pi);

  Mat m(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) m(x, y) = 0.2 + stream.next_unit();
  m = 0.5 * (m + m.transpose()).eval();

  Vec d = Vec::Ones(n);
  for (int it = 0; it < 500; ++it) {
    Vec rows = Vec::Zero(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) rows[x] += d[x] * m(x, y) * d[y];
    double worst = 0.0;
    for (int x = 0; x < n; ++x) worst = std::max(worst, std::abs(rows[x] - row_target[x]));
    if (worst < 1e-14) break;
    for (int x = 0; x < n; ++x) d[x] *= std::sqrt(row_target[x] / rows[x]);
  }
  Mat flux = d.asDiagonal() * m * d.asDiagonal();
  Mat alpha(n, n);
  for (int x = 0; x < n; ++x) alpha.row(x) = flux.row(x) / flux.row(x).sum();
  return validate_spec({}, q, alpha, 1e-8);
}

// Interior target with density bounded well away from zero.
inline ProbMeasure random_interior_target(const ProcessSpec& spec, Stream& stream) {
  Vec w(spec.n());
  for (int i = 0; i < spec.n(); ++i) w[i] = spec.pi[i] * (0.25 + stream.next_unit());
  w /= w.sum();
  ProbMeasure eta{w, std::nullopt};
  return attach_density(spec, eta);
}

// Arbitrary target; occasionally zeroes a coordinate to exercise the
// zero-density branches.
inline ProbMeasure random_target(const ProcessSpec& spec, Stream& stream) {
  Vec w(spec.n());
  for (int i = 0; i < spec.n(); ++i) {
    const double u = stream.next_unit();
    w[i] = (u < 0.15 && spec.n() > 1) ? 0.0 : u * u;
  }
  if (w.sum() == 0.0) w[0] = 1.0;
  w /= w.sum();
  return attach_density(spec, ProbMeasure{w, std::nullopt});
}

// A randomized feasible triple (A', mu', xi') for the same target: perturb the
// synthesized tilt, restore equal marginals by symmetrization, and rescale the
// xi atoms to keep the mean constraint. Returns the triple's objective value.
inline double perturbed_feasible_objective(const ProcessSpec& spec, const ProbMeasure& eta,
                                           const TiltedDynamics& tilt, Stream& stream) {
  const int n = spec.n();
  Mat mu = tilt.mu;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) mu(x, y) *= 1.0 + 0.5 * (stream.next_unit() - 0.5);
  mu = 0.5 * (mu + mu.transpose()).eval();
  mu /= mu.sum();
  const Vec mu1 = mu.rowwise().sum();

  const double a_rate = tilt.rate_scalar * (0.7 + 0.6 * stream.next_unit());

  double chain = 0.0;
  for (int x = 0; x < n; ++x) {
    if (mu1[x] <= 0.0) continue;
    const Vec row = (mu.row(x) / mu1[x]).transpose();
    const ExtReal re = rel_entropy(row, spec.alpha.row(x));
    if (!re.is_finite()) return std::numeric_limits<double>::infinity();
    chain += mu1[x] * re.value;
  }

  double time_part = 0.0;
  for (int x = 0; x < n; ++x) {
    const double mass = spec.q[x] * eta.w[x];
    if (mass <= 0.0) continue;
    const double atom = a_rate * mu1[x] / mass;  // restores the mean constraint
    time_part += ell(atom) * mass;
  }
  return a_rate * chain + time_part;
}

}  // namespace jumpldp::testkit
