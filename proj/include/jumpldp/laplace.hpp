#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "jumpldp/rate.hpp"
#include "jumpldp/simulate.hpp"
#include "jumpldp/tilt.hpp"

namespace jumpldp {

// -- functionals on the simplex ----------------------------------------------

struct LinearFunctional {
  Vec f;
};

// Smoothed penalty for leaving a total-variation ball around a target:
// weight * max(0, TV(eta, target) - radius)^2.
struct TvBallPenalty {
  Vec target;
  double radius = 0.0;
  double weight = 1.0;
};

using Functional = std::variant<LinearFunctional, TvBallPenalty>;

inline double tv_distance(const Vec& a, const Vec& b) {
  return 0.5 * (a - b).cwiseAbs().sum();
}

inline double functional_value(const Functional& F, const Vec& w) {
  if (const auto* lin = std::get_if<LinearFunctional>(&F)) return lin->f.dot(w);
  const auto& ball = std::get<TvBallPenalty>(F);
  const double excess = std::max(0.0, tv_distance(w, ball.target) - ball.radius);
  return ball.weight * excess * excess;
}

inline Vec functional_grad(const Functional& F, const Vec& w) {
  if (const auto* lin = std::get_if<LinearFunctional>(&F)) return lin->f;
  const auto& ball = std::get<TvBallPenalty>(F);
  const double excess = std::max(0.0, tv_distance(w, ball.target) - ball.radius);
  if (excess == 0.0) return Vec::Zero(w.size());
  Vec grad(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    grad[i] = ball.weight * excess * ((w[i] > ball.target[i]) ? 1.0 : -1.0);
  return grad;
}

// -- variational solve --------------------------------------------------------

struct LaplaceSolution {
  ProbMeasure eta_star;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

// Precomputed pieces of I and its gradient on the open simplex.
struct RateGeometry {
  Vec q;
  Mat b;  // flux / (sqrt(pi) sqrt(pi)^T)

  explicit RateGeometry(const ProcessSpec& spec) : q(spec.q) {
    const Vec sp = spec.pi.cwiseSqrt();
    b = spec.detailed_balance_flux();
    for (Eigen::Index x = 0; x < b.rows(); ++x)
      for (Eigen::Index y = 0; y < b.cols(); ++y) b(x, y) /= sp[x] * sp[y];
  }

  double value(const Vec& w) const {
    const Vec r = w.cwiseSqrt();
    return q.dot(w) - r.dot(b * r);
  }

  Vec grad(const Vec& w) const {
    const Vec r = w.cwiseSqrt();
    const Vec br = b * r;
    Vec g(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) g[i] = q[i] - br[i] / r[i];
    return g;
  }
};

// Entropic mirror descent over the simplex for a composite smooth objective.
// The sqrt terms of I blow up at the boundary, so iterates never leave the
// relative interior; updates are clamped for overflow safety.
template <typename ValueFn, typename GradFn>
LaplaceSolution mirror_descent(const Vec& start, ValueFn&& value_fn, GradFn&& grad_fn, double tol,
                               int max_iterations) {
  Vec w = start;
  double value = value_fn(w);
  double step = 1.0;
  int it = 0;
  double resid = 0.0;
  for (; it < max_iterations; ++it) {
    const Vec grad = grad_fn(w);
    const double anchor = grad.dot(w);
    resid = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      resid = std::max(resid, std::abs(grad[i] - anchor));
    if (resid <= tol) break;

    bool accepted = false;
    for (int back = 0; back < 70; ++back) {
      Vec trial(w.size());
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double arg = std::clamp(-step * (grad[i] - anchor), -40.0, 40.0);
        trial[i] = w[i] * std::exp(arg);
      }
      trial /= trial.sum();
      const double trial_value = value_fn(trial);
      if (!std::isfinite(trial_value)) {
        step *= 0.5;
        continue;
      }
      if (trial_value < value) {
        w = trial;
        value = trial_value;
        step *= 1.6;
        accepted = true;
        break;
      }
      // Once objective differences sit at rounding scale, keep following the
      // gradient: the entropic update stays a contraction for small steps.
      if (trial_value <= value + 1e-14 * (1.0 + std::abs(value)) && step * resid * resid <= 1e-13) {
        w = trial;
        value = std::min(value, trial_value);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled below rounding scale; report the residual we reached
  }
  LaplaceSolution sol;
  sol.eta_star = ProbMeasure{w, std::nullopt};
  sol.value = value;
  sol.residual = resid;
  sol.iterations = it;
  return sol;
}

}  // namespace detail

/// Minimizes F(eta) + I(eta) over the probability simplex by entropic mirror
/// descent started at pi, to first-order stationarity tol.
inline LaplaceSolution solve_laplace_inf(const ProcessSpec& spec, const Functional& F,
                                         double tol = 1e-8, int max_iterations = 200000) {
  const detail::RateGeometry geom(spec);
  auto value_fn = [&](const Vec& w) { return functional_value(F, w) + geom.value(w); };
  auto grad_fn = [&](const Vec& w) { return (functional_grad(F, w) + geom.grad(w)).eval(); };
  LaplaceSolution sol = detail::mirror_descent(spec.pi, value_fn, grad_fn, tol, max_iterations);
  if (sol.residual > tol) {
    std::vector<double> best(sol.eta_star.w.data(), sol.eta_star.w.data() + sol.eta_star.w.size());
    throw NonConvergenceError("solve_laplace_inf: stationarity not reached", std::move(best),
                              sol.residual);
  }
  sol.eta_star = attach_density(spec, sol.eta_star);
  return sol;
}

// -- eigenvalue oracle --------------------------------------------------------

struct EigenOracle {
  double exact_finite_t;  // -(1/T) log < pi, exp(T (L - diag f)) 1 >
  double limit;           // -lambda_max(L - diag f)
};

/// Independent spectral route to the Laplace limit for linear functionals.
/// Reversibility makes diag(sqrt(pi)) (L - diag f) diag(1/sqrt(pi)) symmetric,
/// so the principal eigenvalue is real and the solve is stable.
inline EigenOracle eigenvalue_oracle(const ProcessSpec& spec, const Vec& f, double horizon) {
  const int n = spec.n();
  if (f.size() != n) throw DimensionError("eigenvalue_oracle: bad f length");
  if (!(horizon > 0.0)) throw DomainError("eigenvalue_oracle: horizon must be positive");

  Mat gen = spec.q.asDiagonal() * (spec.alpha - Mat::Identity(n, n));
  Mat m = gen;
  m.diagonal() -= f;

  const Vec sp = spec.pi.cwiseSqrt();
  Mat sym(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) sym(x, y) = sp[x] * m(x, y) / sp[y];
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw EigenFailure("eigenvalue_oracle: eigensolve failed");
  const double limit = -es.eigenvalues().maxCoeff();

  const Mat propagated = (horizon * m).exp();
  const double mass = spec.pi.dot(propagated * Vec::Ones(n));
  if (!(mass > 0.0)) throw EigenFailure("eigenvalue_oracle: nonpositive propagated mass");
  return {-std::log(mass) / horizon, limit};
}

// -- Monte Carlo estimators ---------------------------------------------------

struct DecayEstimate {
  double horizon = 0.0;
  std::string method;
  double estimate = 0.0;
  double std_error = 0.0;
  double variational = 0.0;
};

struct LaplaceProblem {
  Functional F;
  std::vector<double> horizons;
  int budget = 1000;  // samples per horizon
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Estimates -(1/T) log E[exp(-T F(eta_T))] per horizon, naively or by
/// importance sampling under a tilt (samples reweighted through the exact
/// path likelihood ratio). Standard errors by the delta method.
inline std::vector<DecayEstimate> estimate_laplace(const ProcessSpec& spec,
                                                   const LaplaceProblem& problem,
                                                   const TiltedDynamics* tilt = nullptr) {
  if (problem.budget < 1) throw DomainError("estimate_laplace: budget must be >= 1");
  rng::check_seed(problem.seed);
  const double variational = solve_laplace_inf(spec, problem.F).value;

  double shift = 0.0;  // internal shift making the exponent nonnegative
  if (const auto* lin = std::get_if<LinearFunctional>(&problem.F)) shift = lin->f.minCoeff();

  std::vector<DecayEstimate> out;
  out.reserve(problem.horizons.size());
  for (std::size_t hi = 0; hi < problem.horizons.size(); ++hi) {
    const double horizon = problem.horizons[hi];
    const std::uint64_t batch_seed = rng::derive_sample_seed(problem.seed, 0xb41c0000ULL + hi);
    const auto samples =
        batch_simulate(spec, tilt, horizon, problem.budget, batch_seed, problem.workers);

    std::vector<double> z(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double fv = functional_value(problem.F, samples[i].eta.w);
      double log_z = -horizon * (fv - shift);
      if (tilt) log_z += samples[i].cost.log_likelihood_ratio;
      z[i] = std::exp(log_z);
    }
    if (tilt) {
      double wmax = -std::numeric_limits<double>::infinity();
      for (const auto& s : samples) wmax = std::max(wmax, s.cost.log_likelihood_ratio);
      double sum = 0.0, sum_sq = 0.0;
      for (const auto& s : samples) {
        const double v = std::exp(s.cost.log_likelihood_ratio - wmax);
        sum += v;
        sum_sq += v * v;
      }
      const double ess = sum * sum / sum_sq;
      if (ess < 10.0)
        throw DegenerateWeightError("estimate_laplace: effective sample size " +
                                    std::to_string(ess) + " < 10");
    }

    const double count = static_cast<double>(z.size());
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= std::max(1.0, count - 1.0);

    DecayEstimate est;
    est.horizon = horizon;
    est.method = tilt ? "is" : "naive";
    est.estimate = shift - std::log(mean) / horizon;
    est.std_error = std::sqrt(var / count) / (mean * horizon);
    est.variational = variational;
    out.push_back(est);
  }
  return out;
}

// -- rare events --------------------------------------------------------------

struct HalfSpaceEvent {
  Vec f;
  double threshold = 0.0;  // event: <f, eta> >= threshold
};

struct TvBallEvent {
  Vec target;
  double radius = 0.0;  // event: TV(eta, target) <= radius
};

using Event = std::variant<HalfSpaceEvent, TvBallEvent>;

inline bool event_contains(const Event& event, const Vec& w) {
  if (const auto* hs = std::get_if<HalfSpaceEvent>(&event)) return hs->f.dot(w) >= hs->threshold;
  const auto& ball = std::get<TvBallEvent>(event);
  return tv_distance(w, ball.target) <= ball.radius;
}

inline double event_violation(const Event& event, const Vec& w) {
  if (const auto* hs = std::get_if<HalfSpaceEvent>(&event))
    return std::max(0.0, hs->threshold - hs->f.dot(w));
  const auto& ball = std::get<TvBallEvent>(event);
  return std::max(0.0, tv_distance(w, ball.target) - ball.radius);
}

inline Vec event_violation_grad(const Event& event, const Vec& w) {
  if (const auto* hs = std::get_if<HalfSpaceEvent>(&event)) {
    if (hs->f.dot(w) >= hs->threshold) return Vec::Zero(w.size());
    return (-hs->f).eval();
  }
  const auto& ball = std::get<TvBallEvent>(event);
  if (tv_distance(w, ball.target) <= ball.radius) return Vec::Zero(w.size());
  Vec grad(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) grad[i] = (w[i] > ball.target[i]) ? 0.5 : -0.5;
  return grad;
}

struct ConstrainedRateMin {
  ProbMeasure eta_star;
  double value = 0.0;         // I at the minimizer
  double kkt_residual = 0.0;  // max of final stationarity residual and violation
};

/// Minimizes I over the event's closure by exterior quadratic penalty with
/// continuation (three rounds, penalty x10 each).
inline ConstrainedRateMin constrained_rate_min(const ProcessSpec& spec, const Event& event,
                                               double tol = 1e-8) {
  const detail::RateGeometry geom(spec);
  Vec w = spec.pi;
  double resid = 0.0;
  double penalty = 1e3;
  for (int round = 0; round < 3; ++round, penalty *= 10.0) {
    auto value_fn = [&](const Vec& x) {
      const double viol = event_violation(event, x);
      return geom.value(x) + penalty * viol * viol;
    };
    auto grad_fn = [&](const Vec& x) {
      const double viol = event_violation(event, x);
      Vec grad = geom.grad(x);
      if (viol > 0.0) grad += 2.0 * penalty * viol * event_violation_grad(event, x);
      return grad;
    };
    const LaplaceSolution sol = detail::mirror_descent(w, value_fn, grad_fn, tol, 200000);
    w = sol.eta_star.w;
    resid = sol.residual;
  }
  ConstrainedRateMin out;
  out.eta_star = attach_density(spec, ProbMeasure{w, std::nullopt});
  out.value = geom.value(w);
  out.kkt_residual = std::max(resid, event_violation(event, w));
  return out;
}

struct EventDecayResult {
  std::vector<DecayEstimate> estimates;
  ProbMeasure minimizer;
  double min_rate = 0.0;
  double kkt_residual = 0.0;
};

/// Estimates -(1/T) log P(eta_T in event) per horizon: a naive hit-frequency
/// estimate and an importance-sampled one under the tilt synthesized for the
/// constrained rate minimizer (softened toward pi so every model transition
/// stays simulable and the weights stay unbiased). A horizon with zero naive
/// hits yields the one-sided bound -(1/T) log(3/N) tagged
/// "naive-zerohits-bound".
inline EventDecayResult estimate_event_decay(const ProcessSpec& spec, const Event& event,
                                             const std::vector<double>& horizons, int budget,
                                             std::uint64_t seed, int workers = 1) {
  if (budget < 1) throw DomainError("estimate_event_decay: budget must be >= 1");
  rng::check_seed(seed);

  EventDecayResult result;
  const ConstrainedRateMin cmin = constrained_rate_min(spec, event);
  result.minimizer = cmin.eta_star;
  result.min_rate = cmin.value;
  result.kkt_residual = cmin.kkt_residual;

  const double soften = 1e-3;
  ProbMeasure tilt_target =
      make_measure(((1.0 - soften) * cmin.eta_star.w + soften * spec.pi).eval(), 1e-6);
  tilt_target = attach_density(spec, tilt_target);
  const TiltedDynamics tilt = synthesize_tilt(spec, tilt_target);

  for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
    const double horizon = horizons[hi];
    const double count = static_cast<double>(budget);

    {  // naive
      const std::uint64_t batch_seed = rng::derive_sample_seed(seed, 0xdecaf000ULL + hi);
      const auto samples = batch_simulate(spec, nullptr, horizon, budget, batch_seed, workers);
      std::int64_t hits = 0;
      for (const auto& s : samples) hits += event_contains(event, s.eta.w) ? 1 : 0;
      DecayEstimate est;
      est.horizon = horizon;
      est.variational = cmin.value;
      if (hits == 0) {
        est.method = "naive-zerohits-bound";
        est.estimate = -std::log(3.0 / count) / horizon;
        est.std_error = std::numeric_limits<double>::quiet_NaN();
      } else {
        const double p = static_cast<double>(hits) / count;
        est.method = "naive";
        est.estimate = -std::log(p) / horizon;
        est.std_error = std::sqrt((1.0 - p) / (p * count)) / horizon;
      }
      result.estimates.push_back(est);
    }

    {  // importance sampled
      const std::uint64_t batch_seed = rng::derive_sample_seed(seed, 0x15aa0000ULL + hi);
      const auto samples = batch_simulate(spec, &tilt, horizon, budget, batch_seed, workers);
      double mean = 0.0;
      std::vector<double> z(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        z[i] = event_contains(event, samples[i].eta.w)
                   ? std::exp(samples[i].cost.log_likelihood_ratio)
                   : 0.0;
        mean += z[i];
      }
      mean /= count;
      double var = 0.0;
      for (double v : z) var += (v - mean) * (v - mean);
      var /= std::max(1.0, count - 1.0);
      DecayEstimate est;
      est.horizon = horizon;
      est.method = "is";
      est.variational = cmin.value;
      est.estimate = -std::log(mean) / horizon;
      est.std_error = std::sqrt(var / count) / (mean * horizon);
      result.estimates.push_back(est);
    }
  }
  return result;
}

}  // namespace jumpldp
