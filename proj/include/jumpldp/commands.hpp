#pragma once

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "jumpldp/csv.hpp"
#include "jumpldp/laplace.hpp"
#include "jumpldp/log.hpp"
#include "jumpldp/model_io.hpp"
#include "jumpldp/rate.hpp"
#include "jumpldp/simulate.hpp"
#include "jumpldp/tilt.hpp"

namespace jumpldp::cli {

// Exit codes: 0 success, 1 validation/domain error, 2 numerical
// non-convergence, 3 I/O.
template <typename Body>
int run_guarded(Body&& body) {
  try {
    body();
    return 0;
  } catch (const IoError& e) {
    logx::error(e.what());
    return 3;
  } catch (const ConvergenceError& e) {
    logx::error(e.what());
    return 2;
  } catch (const EigenFailure& e) {
    logx::error(e.what());
    return 2;
  } catch (const JumpBudgetError& e) {
    logx::error(e.what());
    return 2;
  } catch (const std::exception& e) {
    logx::error(e.what());
    return 1;
  }
}

namespace detail {

inline std::string stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  const std::size_t start = (slash == std::string::npos) ? 0 : slash + 1;
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || dot <= start) return path.substr(start);
  return path.substr(start, dot - start);
}

inline void write_manifest(const std::string& command,
                           const std::vector<std::string>& input_paths, bool has_seed,
                           std::uint64_t seed, const std::string& csv_path,
                           const io::WallClock& clock) {
  io::RunManifest manifest;
  manifest.command = command;
  for (const auto& p : input_paths) manifest.inputs.push_back({p, io::file_digest(p)});
  manifest.has_seed = has_seed;
  manifest.seed = seed;
  manifest.outputs = {csv_path};
  manifest.wall_clock_ms = clock.elapsed_ms();
  manifest.write(csv_path + ".manifest.json");
}

}  // namespace detail

/// Prints a per-condition report for a model file. Throws on the first
/// violated condition (after printing what passed).
inline void do_validate(const std::string& model_path, std::ostream& out) {
  const ProcessSpec spec = io::load_model(model_path);
  out << "states: " << spec.n() << "\n";
  out << "kernel rows stochastic: pass\n";
  out << "intensities in (0, inf): pass (K1=" << spec.q_min << ", K2=" << spec.q_max << ")\n";
  out << "feller property: pass (automatic on a finite state set)\n";
  out << "compact state space: pass (automatic on a finite state set)\n";
  out << "embedded chain irreducible: pass\n";

  double balance = 0.0;
  for (int k = 0; k < spec.n(); ++k) {
    Vec basis = Vec::Zero(spec.n());
    basis[k] = 1.0;
    balance = std::max(balance, std::abs(spec.pi.dot(generator_apply(spec, basis))));
  }
  out << "stationary laws derived: pass (generator balance " << io::format_double(balance)
      << ")\n";
  out << "stationary support full: pass\n";
  out << "detailed balance: pass\n";
  try {
    const MinorizationWindow window = check_minorization(spec, 64);
    out << "minorization window: pass (N=" << window.steps
        << ", c=" << io::format_double(window.bound) << ")\n";
  } catch (const NoMinorizationError&) {
    out << "minorization window: fail (no N <= 64; periodic chain)\n";
    throw;
  }
}

inline void do_rate(const std::string& model_path, const std::string& target_path,
                    bool with_oracle, double tol, const std::string& csv_path) {
  const io::WallClock clock;
  const ProcessSpec spec = io::load_model(model_path);
  const ProbMeasure eta = io::load_target(target_path, spec);
  const RateResult r = rate_explicit(spec, eta);

  io::CsvWriter csv;
  csv.raw("measure").raw("value").raw("first_term").raw("second_term");
  if (with_oracle) csv.raw("oracle_value").raw("oracle_gap");
  csv.end_row();
  csv.raw(detail::stem(target_path)).num(r.value).num(r.first_term).num(r.second_term);
  if (with_oracle) {
    const OracleResult oracle = rate_variational_oracle(spec, eta, tol);
    csv.num(oracle.value).num(std::abs(oracle.value - r.value));
  }
  csv.end_row();
  csv.write(csv_path);
  detail::write_manifest("rate", {model_path, target_path}, false, 0, csv_path, clock);
}

inline void do_oracle(const std::string& model_path, const std::string& target_path, double tol,
                      const std::string& csv_path) {
  const io::WallClock clock;
  const ProcessSpec spec = io::load_model(model_path);
  const ProbMeasure eta = io::load_target(target_path, spec);
  const OracleResult oracle = rate_variational_oracle(spec, eta, tol);

  io::CsvWriter csv;
  csv.raw("measure").raw("value").raw("iterations").raw("residual").end_row();
  csv.raw(detail::stem(target_path))
      .num(oracle.value)
      .integer(oracle.iterations)
      .num(oracle.residual)
      .end_row();
  csv.write(csv_path);
  detail::write_manifest("oracle", {model_path, target_path}, false, 0, csv_path, clock);
}

/// Long-format rows: quantity,row,col,value. Scalars leave row/col empty;
/// per-state fields fill row; kernel entries fill both.
inline void do_tilt(const std::string& model_path, const std::string& target_path,
                    const std::string& csv_path) {
  const io::WallClock clock;
  const ProcessSpec spec = io::load_model(model_path);
  const ProbMeasure eta = io::load_target(target_path, spec);
  const TiltedDynamics tilt = synthesize_tilt(spec, eta);
  const CostLedger ledger = entropy_decomposition(spec, eta, tilt);
  const double rate = rate_explicit(spec, eta).value;

  io::CsvWriter csv;
  csv.raw("quantity").raw("row").raw("col").raw("value").end_row();
  csv.raw("A").raw("").raw("").num(tilt.rate_scalar).end_row();
  for (int x = 0; x < spec.n(); ++x)
    csv.raw("kappa").integer(x).raw("").num(tilt.kappa[x]).end_row();
  for (int x = 0; x < spec.n(); ++x)
    csv.raw("sojourn_mean").integer(x).raw("").num(tilt.sojourn_mean(x)).end_row();
  for (int x = 0; x < spec.n(); ++x)
    for (int y = 0; y < spec.n(); ++y)
      csv.raw("p").integer(x).integer(y).num(tilt.p(x, y)).end_row();
  csv.raw("chain_cost").raw("").raw("").num(ledger.chain_cost).end_row();
  csv.raw("time_cost").raw("").raw("").num(ledger.time_cost).end_row();
  csv.raw("total").raw("").raw("").num(ledger.total).end_row();
  csv.raw("rate_explicit").raw("").raw("").num(rate).end_row();
  csv.write(csv_path);
  detail::write_manifest("tilt", {model_path, target_path}, false, 0, csv_path, clock);
}

struct SimulateOptions {
  std::string model_path;
  std::string target_path;  // empty: original dynamics
  double horizon = 100.0;
  int count = 100;
  std::uint64_t seed = 0;
  int workers = 1;
  std::int64_t jump_budget = 10'000'000;
  std::string csv_path = "simulate.csv";
};

inline void do_simulate(const SimulateOptions& opts) {
  const io::WallClock clock;
  const ProcessSpec spec = io::load_model(opts.model_path);
  std::vector<std::string> inputs{opts.model_path};

  TiltedDynamics tilt;
  const TiltedDynamics* tilt_ptr = nullptr;
  if (!opts.target_path.empty()) {
    const ProbMeasure eta = io::load_target(opts.target_path, spec);
    tilt = synthesize_tilt(spec, eta);
    tilt_ptr = &tilt;
    inputs.push_back(opts.target_path);
  }

  SimOptions sim;
  sim.jump_budget = opts.jump_budget;
  logx::info("simulate: " + std::to_string(opts.count) + " paths, horizon " +
             io::format_double(opts.horizon) + (tilt_ptr ? " (tilted)" : " (original)"));
  const auto samples =
      batch_simulate(spec, tilt_ptr, opts.horizon, opts.count, opts.seed, opts.workers, sim);

  io::CsvWriter csv;
  csv.raw("sample").raw("jumps");
  for (int x = 0; x < spec.n(); ++x) csv.raw("w_" + std::to_string(x));
  csv.raw("chain_rate").raw("time_rate").raw("log_likelihood_ratio").end_row();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto [chain_rate, time_rate] = running_cost_rate(s.cost, opts.horizon);
    csv.integer(static_cast<std::int64_t>(i)).integer(s.jump_count);
    for (int x = 0; x < spec.n(); ++x) csv.num(s.eta.w[x]);
    csv.num(chain_rate).num(time_rate).num(s.cost.log_likelihood_ratio).end_row();
  }
  csv.write(opts.csv_path);
  detail::write_manifest("simulate", inputs, true, opts.seed, opts.csv_path, clock);
}

struct EstimateOptions {
  std::string model_path;
  std::string descriptor_path;
  std::vector<double> horizons;
  int budget = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  bool importance = false;  // laplace only: sample under the optimal tilt
  std::string csv_path;
};

namespace detail {

inline void write_estimates(const std::vector<DecayEstimate>& estimates,
                            const std::string& csv_path) {
  io::CsvWriter csv;
  csv.raw("horizon").raw("method").raw("estimate").raw("std_error").raw("variational").end_row();
  for (const auto& e : estimates) {
    csv.num(e.horizon).raw(e.method).num(e.estimate).num(e.std_error).num(e.variational).end_row();
  }
  csv.write(csv_path);
}

}  // namespace detail

inline void do_laplace(const EstimateOptions& opts) {
  const io::WallClock clock;
  const ProcessSpec spec = io::load_model(opts.model_path);
  const io::Descriptor desc = io::load_descriptor(opts.descriptor_path, spec);

  Functional functional;
  if (const auto* lin = std::get_if<LinearFunctional>(&desc)) functional = *lin;
  else if (const auto* ball = std::get_if<TvBallEvent>(&desc))
    functional = TvBallPenalty{ball->target, ball->radius, 1.0};
  else
    throw IoError("laplace: descriptor must be a functional (f vector or target/radius)");

  LaplaceProblem problem;
  problem.F = functional;
  problem.horizons = opts.horizons;
  problem.budget = opts.budget;
  problem.seed = opts.seed;
  problem.workers = opts.workers;

  TiltedDynamics tilt;
  const TiltedDynamics* tilt_ptr = nullptr;
  if (opts.importance) {
    const LaplaceSolution sol = solve_laplace_inf(spec, functional);
    logx::debug("laplace: variational value " + io::format_double(sol.value) + " after " +
                std::to_string(sol.iterations) + " iterations");
    const double soften = 1e-3;
    const ProbMeasure target = attach_density(
        spec, make_measure(((1.0 - soften) * sol.eta_star.w + soften * spec.pi).eval(), 1e-6));
    tilt = synthesize_tilt(spec, target);
    tilt_ptr = &tilt;
  }
  const auto estimates = estimate_laplace(spec, problem, tilt_ptr);
  detail::write_estimates(estimates, opts.csv_path);
  detail::write_manifest("laplace", {opts.model_path, opts.descriptor_path}, true, opts.seed,
                         opts.csv_path, clock);
}

inline void do_decay(const EstimateOptions& opts) {
  const io::WallClock clock;
  const ProcessSpec spec = io::load_model(opts.model_path);
  const io::Descriptor desc = io::load_descriptor(opts.descriptor_path, spec);

  Event event;
  if (const auto* hs = std::get_if<HalfSpaceEvent>(&desc)) event = *hs;
  else if (const auto* ball = std::get_if<TvBallEvent>(&desc)) event = *ball;
  else
    throw IoError("decay: descriptor must be an event ({f, c} or {target, radius})");

  const EventDecayResult result =
      estimate_event_decay(spec, event, opts.horizons, opts.budget, opts.seed, opts.workers);
  logx::info("decay: constrained minimum " + io::format_double(result.min_rate) +
             " (KKT residual " + io::format_double(result.kkt_residual) + ")");
  detail::write_estimates(result.estimates, opts.csv_path);
  detail::write_manifest("decay", {opts.model_path, opts.descriptor_path}, true, opts.seed,
                         opts.csv_path, clock);
}

inline void do_dirac_example(int cells, const std::string& csv_path) {
  const io::WallClock clock;
  if (cells < 2) throw DomainError("dirac-example: need n >= 2");
  io::CsvWriter csv;
  csv.raw("k").raw("I").raw("A").raw("chain_cost").raw("time_cost").raw("total_minus_I").end_row();
  for (int k = 2; k <= cells; ++k) {
    const ProcessSpec model = uniform_cell_model(k);
    const ProbMeasure eta = dirac_cell_target(model);
    const double rate = rate_explicit(model, eta).value;
    const TiltedDynamics tilt = synthesize_tilt(model, eta);
    const CostLedger ledger = entropy_decomposition(model, eta, tilt);
    csv.integer(k)
        .num(rate)
        .num(tilt.rate_scalar)
        .num(ledger.chain_cost)
        .num(ledger.time_cost)
        .num(ledger.total - rate)
        .end_row();
  }
  csv.write(csv_path);
  detail::write_manifest("dirac-example", {}, false, 0, csv_path, clock);
}

}  // namespace jumpldp::cli
