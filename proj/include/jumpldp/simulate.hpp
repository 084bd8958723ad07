#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "jumpldp/entropy.hpp"
#include "jumpldp/errors.hpp"
#include "jumpldp/rng.hpp"
#include "jumpldp/tilt.hpp"

namespace jumpldp {

/// One sampled path, truncated at the horizon. states holds X_0 .. X_{R_T-1};
/// sojourns and taus hold the R_T - 1 completed holding times (s_i = tau_i /
/// q(X_{i-1})); the censored final sojourn contributes only the residual
/// T - sum s_i, which belongs to the last state.
struct Trajectory {
  std::vector<int> states;
  std::vector<double> sojourns;
  std::vector<double> taus;
  double residual = 0.0;
  double horizon = 0.0;
  std::int64_t jump_count = 0;  // R_T = states.size()
};

/// Path-accumulated distortion costs and the exact log dP/dP_bar of the path
/// under the original versus tilted law (start states share the law pi, so no
/// initial term appears).
struct PathCost {
  double chain_entropy = 0.0;
  double time_entropy = 0.0;
  double log_likelihood_ratio = 0.0;
};

struct SimOptions {
  std::int64_t jump_budget = 10'000'000;
};

namespace detail {

struct DynamicsView {
  const Mat* kernel;
  Vec tau_rate;          // unit-clock rate per state (1 for original dynamics)
  bool tilted;
  Vec visit_chain_cost;  // R(p(x,.) || alpha(x,.)) per visit
  Vec visit_time_cost;   // g(1/tau_rate(x)) per visit
};

inline DynamicsView original_view(const ProcessSpec& spec) {
  DynamicsView v;
  v.kernel = &spec.alpha;
  v.tau_rate = Vec::Ones(spec.n());
  v.tilted = false;
  return v;
}

inline DynamicsView tilted_view(const ProcessSpec& spec, const TiltedDynamics& tilt) {
  if (tilt.n() != spec.n()) throw DimensionError("simulate: tilt does not match model");
  DynamicsView v;
  v.kernel = &tilt.p;
  v.tau_rate = tilt.tau_rate;
  v.tilted = true;
  const int n = spec.n();
  v.visit_chain_cost = Vec::Zero(n);
  v.visit_time_cost = Vec::Zero(n);
  for (int x = 0; x < n; ++x) {
    const ExtReal re = rel_entropy(tilt.p.row(x), spec.alpha.row(x));
    v.visit_chain_cost[x] = re.is_finite() ? re.value : std::numeric_limits<double>::infinity();
    v.visit_time_cost[x] = tilt.tau_rate[x] > 0.0
                               ? g(1.0 / tilt.tau_rate[x])
                               : std::numeric_limits<double>::infinity();
  }
  return v;
}

inline std::pair<Trajectory, PathCost> run_path(const ProcessSpec& spec, const DynamicsView& dyn,
                                                double horizon, std::uint64_t seed,
                                                const SimOptions& opts) {
  if (!(horizon > 0.0)) throw DomainError("simulate: horizon must be positive");
  rng::check_seed(seed);
  rng::Stream stream = rng::stream_from_seed(seed);

  Trajectory traj;
  traj.horizon = horizon;
  PathCost cost;

  int x = stream.categorical(spec.pi);
  double elapsed = 0.0;
  for (;;) {
    traj.states.push_back(x);
    if (static_cast<std::int64_t>(traj.states.size()) > opts.jump_budget)
      throw JumpBudgetError("simulate: jump budget exceeded");
    if (dyn.tilted) {
      cost.chain_entropy += dyn.visit_chain_cost[x];
      cost.time_entropy += dyn.visit_time_cost[x];
    }
    const double rate = dyn.tau_rate[x];
    const double tau = stream.exponential(rate);
    const double sojourn = tau / spec.q[x];
    if (elapsed + sojourn > horizon) {
      traj.residual = horizon - elapsed;
      break;
    }
    traj.taus.push_back(tau);
    traj.sojourns.push_back(sojourn);
    elapsed += sojourn;
    if (dyn.tilted) {
      // Completed sojourn s in x: log q e^{-qs} - log(rate q e^{-rate q s}).
      cost.log_likelihood_ratio += (rate - 1.0) * spec.q[x] * sojourn - std::log(rate);
    }
    const int y = stream.categorical(dyn.kernel->row(x));
    if (dyn.tilted) {
      const double p_xy = (*dyn.kernel)(x, y);
      const double a_xy = spec.alpha(x, y);
      if (a_xy <= 0.0)
        throw UnreachableError("simulate: tilted kernel used a transition the model forbids");
      cost.log_likelihood_ratio += std::log(a_xy) - std::log(p_xy);
    }
    x = y;
  }
  if (dyn.tilted) {
    // Censored residual r in the final state: -q r + rate q r.
    const double rate = dyn.tau_rate[x];
    cost.log_likelihood_ratio += (rate - 1.0) * spec.q[x] * traj.residual;
  }
  traj.jump_count = static_cast<std::int64_t>(traj.states.size());
  return {std::move(traj), cost};
}

}  // namespace detail

inline std::pair<Trajectory, PathCost> simulate(const ProcessSpec& spec, double horizon,
                                                std::uint64_t seed, const SimOptions& opts = {}) {
  return detail::run_path(spec, detail::original_view(spec), horizon, seed, opts);
}

inline std::pair<Trajectory, PathCost> simulate(const ProcessSpec& spec,
                                                const TiltedDynamics& tilt, double horizon,
                                                std::uint64_t seed, const SimOptions& opts = {}) {
  return detail::run_path(spec, detail::tilted_view(spec, tilt), horizon, seed, opts);
}

/// Fraction of [0, horizon] the path spends in each state; the censored
/// residual is credited to the last state, so the weights sum to one.
inline ProbMeasure empirical_measure(const Trajectory& traj) {
  int n_states = 0;
  for (int s : traj.states) n_states = std::max(n_states, s + 1);
  Vec time_in = Vec::Zero(n_states);
  for (std::size_t i = 0; i < traj.sojourns.size(); ++i)
    time_in[traj.states[i]] += traj.sojourns[i];
  time_in[traj.states.back()] += traj.residual;
  const double total = time_in.sum();
  Vec w = time_in / total;
  w[traj.states.back()] += 1.0 - w.sum();  // pin the exact-sum invariant
  return ProbMeasure{std::move(w), std::nullopt};
}

// empirical_measure sized to the model's state count.
inline ProbMeasure empirical_measure(const ProcessSpec& spec, const Trajectory& traj) {
  ProbMeasure m = empirical_measure(traj);
  if (m.n() < spec.n()) {
    Vec w = Vec::Zero(spec.n());
    w.head(m.n()) = m.w;
    m.w = std::move(w);
  }
  return m;
}

struct BatchSample {
  ProbMeasure eta;
  PathCost cost;
  std::int64_t jump_count = 0;
};

/// Runs count independent paths with per-sample seeds derived from
/// (master_seed, index). Output is index-ordered and bit-identical for a
/// fixed master seed regardless of the worker count.
inline std::vector<BatchSample> batch_simulate(const ProcessSpec& spec,
                                               const TiltedDynamics* tilt, double horizon,
                                               int count, std::uint64_t master_seed, int workers,
                                               const SimOptions& opts = {}) {
  if (count < 1) throw DomainError("batch_simulate: count must be >= 1");
  if (workers < 1) throw DomainError("batch_simulate: workers must be >= 1");
  rng::check_seed(master_seed);

  const detail::DynamicsView dyn =
      tilt ? detail::tilted_view(spec, *tilt) : detail::original_view(spec);
  std::vector<BatchSample> out(static_cast<std::size_t>(count));

  std::atomic<int> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= count) return;
      try {
        const std::uint64_t seed = rng::derive_sample_seed(master_seed, static_cast<std::uint64_t>(i));
        auto [traj, cost] = detail::run_path(spec, dyn, horizon, seed, opts);
        out[static_cast<std::size_t>(i)] =
            BatchSample{empirical_measure(spec, traj), cost, traj.jump_count};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        cursor.store(count);
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

/// Per-unit-time distortion costs of one path.
inline std::pair<double, double> running_cost_rate(const PathCost& cost, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("running_cost_rate: horizon must be positive");
  return {cost.chain_entropy / horizon, cost.time_entropy / horizon};
}

}  // namespace jumpldp
