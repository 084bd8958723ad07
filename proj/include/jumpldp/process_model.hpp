#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "jumpldp/errors.hpp"
#include "jumpldp/measure.hpp"
#include "jumpldp/types.hpp"

namespace jumpldp {

/// A validated finite-state reversible jump-process model. Jumps out of state
/// x occur at rate q(x); the landing state is drawn from the embedded kernel
/// row alpha(x, .). Derived fields: pi_tilde is the stationary law of the
/// embedded chain, pi the stationary law of the continuous-time process
/// (pi proportional to pi_tilde / q), mean_intensity their coupling constant
/// sum_x q(x) pi(x), and [q_min, q_max] the intensity range.
///
/// Instances are immutable after validate_spec and safe to share across
/// threads.
struct ProcessSpec {
  std::vector<std::string> labels;
  Vec q;
  Mat alpha;
  Vec pi_tilde;
  Vec pi;
  double mean_intensity = 0.0;  // sum q(x) pi(x)
  double q_min = 0.0;
  double q_max = 0.0;

  int n() const { return static_cast<int>(q.size()); }

  /// Symmetric edge weights q(x) alpha(x,y) pi(x), averaged with their
  /// transpose so downstream constructions see exactly equal marginals even
  /// when detailed balance only holds to the validation tolerance.
  Mat detailed_balance_flux() const {
    Mat c = q.asDiagonal() * alpha;
    c = pi.asDiagonal() * c;
    return 0.5 * (c + c.transpose());
  }
};

namespace detail {

// Strong connectivity of the directed graph {(x,y) : alpha(x,y) > 0}.
inline bool strongly_connected(const Mat& alpha) {
  const int n = static_cast<int>(alpha.rows());
  auto reach = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y) {
        const double a = forward ? alpha(x, y) : alpha(y, x);
        if (a > 0.0 && !seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          stack.push_back(y);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };
  return reach(true) && reach(false);
}

// Stationary row vector of a stochastic kernel via the stacked least-squares
// system (alpha^T - I; 1^T) x = (0; 1).
inline Vec stationary_vector(const Mat& alpha) {
  const int n = static_cast<int>(alpha.rows());
  Mat sys(n + 1, n);
  sys.topRows(n) = alpha.transpose() - Mat::Identity(n, n);
  sys.row(n).setOnes();
  Vec rhs = Vec::Zero(n + 1);
  rhs[n] = 1.0;
  Eigen::ColPivHouseholderQR<Mat> qr(sys);
  if (qr.rank() < n)
    throw ReducibleError("stationary vector is not unique (rank-deficient balance system)");
  Vec x = qr.solve(rhs);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < 0.0) x[i] = std::max(x[i], -1e-13);  // clip least-squares dust
  x = x.cwiseMax(0.0);
  x /= x.sum();
  return x;
}

}  // namespace detail

/// Builds a ProcessSpec from raw inputs, checking every model condition:
/// positive intensities, row-stochastic kernel (rows are not silently
/// renormalized), irreducibility of the embedded chain, and detailed balance
/// of the derived stationary law.
inline ProcessSpec validate_spec(std::vector<std::string> labels, Vec q, Mat alpha,
                                 double tol = kDefaultTol) {
  const int n = static_cast<int>(q.size());
  if (n < 1) throw DimensionError("validate_spec: need at least one state");
  if (tol <= 0.0) throw DomainError("validate_spec: tolerance must be positive");
  if (alpha.rows() != n || alpha.cols() != n)
    throw DimensionError("validate_spec: alpha must be n x n");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw DimensionError("validate_spec: label count does not match state count");
  if (labels.empty()) {
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  }

  for (int x = 0; x < n; ++x) {
    if (!(q[x] > 0.0)) throw IntensityError("validate_spec: q(" + labels[static_cast<std::size_t>(x)] + ") <= 0");
    double row = 0.0;
    for (int y = 0; y < n; ++y) {
      if (alpha(x, y) < 0.0)
        throw RowSumError("validate_spec: negative kernel entry at row " + std::to_string(x));
      row += alpha(x, y);
    }
    if (std::abs(row - 1.0) > tol)
      throw RowSumError("validate_spec: row " + std::to_string(x) + " sums to " +
                        std::to_string(row));
  }

  if (!detail::strongly_connected(alpha))
    throw ReducibleError("validate_spec: embedded chain is not irreducible");

  ProcessSpec spec;
  spec.labels = std::move(labels);
  spec.q = std::move(q);
  spec.alpha = std::move(alpha);
  spec.pi_tilde = detail::stationary_vector(spec.alpha);
  spec.pi = spec.pi_tilde.cwiseQuotient(spec.q);
  spec.pi /= spec.pi.sum();
  spec.q_min = spec.q.minCoeff();
  spec.q_max = spec.q.maxCoeff();
  spec.mean_intensity = spec.q.dot(spec.pi);

  for (int x = 0; x < n; ++x)
    if (!(spec.pi[x] > 0.0))
      throw ReducibleError("validate_spec: stationary law does not charge state " +
                           std::to_string(x));

  // Detailed balance of the fluxes q(x) alpha(x,y) pi(x).
  double worst = 0.0;
  int wx = 0, wy = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const double fwd = spec.q[x] * spec.alpha(x, y) * spec.pi[x];
      const double bwd = spec.q[y] * spec.alpha(y, x) * spec.pi[y];
      const double gap = std::abs(fwd - bwd);
      if (gap > worst) {
        worst = gap;
        wx = x;
        wy = y;
      }
    }
  if (worst > tol)
    throw NotReversibleError("validate_spec: detailed balance violated by " +
                             std::to_string(worst) + " between states " + std::to_string(wx) +
                             " and " + std::to_string(wy));

  return spec;
}

/// Stationary laws of the embedded chain and of the jump process.
inline std::pair<ProbMeasure, ProbMeasure> invariant_measures(const ProcessSpec& spec) {
  return {ProbMeasure{spec.pi_tilde, std::nullopt}, ProbMeasure{spec.pi, std::nullopt}};
}

struct MinorizationWindow {
  int steps;     // smallest N with alpha^(N) positive wherever pi_tilde is
  double bound;  // minimal c with alpha^(N)(x,y) <= c pi_tilde(y)
};

/// Searches for the smallest N <= n_max at which the N-step kernel admits a
/// two-sided comparison with pi_tilde, i.e. alpha^(N) is entrywise positive,
/// and reports the majorization constant max alpha^(N)(x,y) / pi_tilde(y).
/// Periodic chains admit no such N; the error carries the zero pattern of
/// alpha^(n_max).
inline MinorizationWindow check_minorization(const ProcessSpec& spec, int n_max) {
  if (n_max < 1) throw DomainError("check_minorization: n_max must be >= 1");
  const int n = spec.n();
  Mat power = spec.alpha;
  for (int steps = 1; steps <= n_max; ++steps) {
    bool positive = true;
    double c = 0.0;
    for (int x = 0; x < n && positive; ++x)
      for (int y = 0; y < n; ++y) {
        if (power(x, y) <= 0.0) {
          positive = false;
          break;
        }
        c = std::max(c, power(x, y) / spec.pi_tilde[y]);
      }
    if (positive) return {steps, c};
    if (steps < n_max) power = power * spec.alpha;
    else {
      std::vector<std::pair<int, int>> zeros;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (power(x, y) <= 0.0) zeros.emplace_back(x, y);
      throw NoMinorizationError(
          "check_minorization: no uniform comparison with pi_tilde up to N = " +
              std::to_string(n_max) + " (periodic chain)",
          std::move(zeros));
    }
  }
  return {0, 0.0};  // unreachable
}

/// Applies the generator: (Lf)(x) = q(x) sum_y alpha(x,y) (f(y) - f(x)).
inline Vec generator_apply(const ProcessSpec& spec, const Vec& f) {
  if (f.size() != spec.q.size()) throw DimensionError("generator_apply: bad f length");
  return spec.q.cwiseProduct(spec.alpha * f - f);
}

/// Attaches the density of eta relative to the model's stationary law.
inline ProbMeasure attach_density(const ProcessSpec& spec, const ProbMeasure& eta) {
  if (eta.n() != spec.n()) throw DimensionError("attach_density: state count mismatch");
  ProbMeasure out = eta;
  out.theta = eta.w.cwiseQuotient(spec.pi);
  return out;
}

/// Builds the measure with density theta relative to pi (normalized).
inline ProbMeasure measure_from_density(const ProcessSpec& spec, const Vec& theta) {
  if (theta.size() != spec.q.size()) throw DimensionError("measure_from_density: bad length");
  Vec w = theta.cwiseProduct(spec.pi);
  const double s = w.sum();
  if (!(s > 0.0)) throw DomainError("measure_from_density: zero total mass");
  w /= s;
  ProbMeasure out{std::move(w), std::nullopt};
  out.theta = out.w.cwiseQuotient(spec.pi);
  return out;
}

/// The k-cell caricature of the unit-interval model: q identically one and
/// every kernel row uniform. Both stationary laws are uniform.
inline ProcessSpec uniform_cell_model(int cells) {
  if (cells < 1) throw DimensionError("uniform_cell_model: need at least one cell");
  Vec q = Vec::Ones(cells);
  Mat alpha = Mat::Constant(cells, cells, 1.0 / cells);
  return validate_spec({}, std::move(q), std::move(alpha));
}

}  // namespace jumpldp
