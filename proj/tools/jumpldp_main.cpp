// Command-line front end: validate models, evaluate the rate function and its
// variational oracle, synthesize tilts, simulate paths, and run the Laplace /
// rare-event estimators. All stochastic commands require --seed and write
// byte-reproducible CSVs plus a manifest.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumpldp/acceptance.hpp"
#include "jumpldp/commands.hpp"
#include "jumpldp/version.hpp"

namespace {

using namespace jumpldp;

int run(int argc, char** argv) {
  CLI::App app{"finite-state reversible jump processes: empirical-measure rate function, "
               "optimal tilts, and rare-event estimation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // validate
  std::string model_path;
  auto* validate = app.add_subcommand("validate", "check a model file against all conditions");
  validate->add_option("model", model_path, "model file")->required();

  // rate
  std::string rate_model, rate_target, rate_csv = "rate.csv";
  bool rate_oracle = false;
  double rate_tol = 1e-9;
  auto* rate = app.add_subcommand("rate", "evaluate the rate function at a target measure");
  rate->add_option("model", rate_model, "model file")->required();
  rate->add_option("target", rate_target, "target measure file")->required();
  rate->add_flag("--oracle", rate_oracle, "also solve the variational oracle and report the gap");
  rate->add_option("--tol", rate_tol, "oracle stationarity tolerance");
  rate->add_option("-o,--out", rate_csv, "output CSV path");

  // oracle
  std::string oracle_model, oracle_target, oracle_csv = "oracle.csv";
  double oracle_tol = 1e-9;
  auto* oracle = app.add_subcommand("oracle", "solve the variational form of the rate function");
  oracle->add_option("model", oracle_model, "model file")->required();
  oracle->add_option("target", oracle_target, "target measure file")->required();
  oracle->add_option("--tol", oracle_tol, "stationarity tolerance");
  oracle->add_option("-o,--out", oracle_csv, "output CSV path");

  // tilt
  std::string tilt_model, tilt_target, tilt_csv = "tilt.csv";
  auto* tilt = app.add_subcommand("tilt", "synthesize the optimal tilted dynamics for a target");
  tilt->add_option("model", tilt_model, "model file")->required();
  tilt->add_option("target", tilt_target, "target measure file")->required();
  tilt->add_option("-o,--out", tilt_csv, "output CSV path");

  // simulate
  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "sample paths and emit per-sample statistics");
  simulate->add_option("model", sim.model_path, "model file")->required();
  simulate->add_option("--target", sim.target_path,
                       "target measure file; simulates the tilted dynamics for it");
  simulate->add_option("--T", sim.horizon, "time horizon")->required();
  simulate->add_option("--count", sim.count, "number of sample paths")->required();
  simulate->add_option("--seed", sim.seed, "master seed")->required();
  simulate->add_option("--workers", sim.workers, "worker threads (output-invariant)");
  simulate->add_option("--jump-budget", sim.jump_budget, "per-path jump cap");
  simulate->add_option("-o,--out", sim.csv_path, "output CSV path");

  // laplace
  cli::EstimateOptions lap;
  lap.csv_path = "laplace.csv";
  std::vector<double> lap_horizons;
  auto* laplace = app.add_subcommand("laplace", "estimate Laplace functionals against the "
                                                "variational prediction");
  laplace->add_option("model", lap.model_path, "model file")->required();
  laplace->add_option("--functional", lap.descriptor_path,
                      "functional file (f vector or {target, radius})")
      ->required();
  laplace->add_option("--horizons", lap_horizons, "time horizons")->required();
  laplace->add_option("--budget", lap.budget, "samples per horizon")->required();
  laplace->add_option("--seed", lap.seed, "master seed")->required();
  laplace->add_option("--workers", lap.workers, "worker threads (output-invariant)");
  laplace->add_flag("--is", lap.importance, "sample under the optimal tilt");
  laplace->add_option("-o,--out", lap.csv_path, "output CSV path");

  // decay
  cli::EstimateOptions dec;
  dec.csv_path = "decay.csv";
  std::vector<double> dec_horizons;
  auto* decay = app.add_subcommand("decay", "estimate rare-event decay rates (naive and "
                                            "importance-sampled)");
  decay->add_option("model", dec.model_path, "model file")->required();
  decay->add_option("--event", dec.descriptor_path, "event file ({f, c} or {target, radius})")
      ->required();
  decay->add_option("--horizons", dec_horizons, "time horizons")->required();
  decay->add_option("--budget", dec.budget, "samples per horizon")->required();
  decay->add_option("--seed", dec.seed, "master seed")->required();
  decay->add_option("--workers", dec.workers, "worker threads (output-invariant)");
  decay->add_option("-o,--out", dec.csv_path, "output CSV path");

  // dirac-example
  int dirac_n = 0;
  std::string dirac_csv = "dirac.csv";
  auto* dirac = app.add_subcommand("dirac-example", "closed-form table for the hot-cell family");
  dirac->add_option("--n", dirac_n, "largest cell count")->required();
  dirac->add_option("-o,--out", dirac_csv, "output CSV path");

  // selftest
  accept::Config self_cfg;
  self_cfg.scale = 0.25;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria at reduced budgets");
  selftest->add_option("--models-dir", self_cfg.models_dir, "fixture directory");
  selftest->add_option("--scale", self_cfg.scale, "budget scale factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/message; usage errors map to 1
    return code == 0 ? 0 : 1;
  }

  if (validate->parsed())
    return cli::run_guarded([&] { cli::do_validate(model_path, std::cout); });
  if (rate->parsed())
    return cli::run_guarded([&] { cli::do_rate(rate_model, rate_target, rate_oracle, rate_tol, rate_csv); });
  if (oracle->parsed())
    return cli::run_guarded([&] { cli::do_oracle(oracle_model, oracle_target, oracle_tol, oracle_csv); });
  if (tilt->parsed())
    return cli::run_guarded([&] { cli::do_tilt(tilt_model, tilt_target, tilt_csv); });
  if (simulate->parsed()) return cli::run_guarded([&] { cli::do_simulate(sim); });
  if (laplace->parsed()) {
    lap.horizons = lap_horizons;
    return cli::run_guarded([&] { cli::do_laplace(lap); });
  }
  if (decay->parsed()) {
    dec.horizons = dec_horizons;
    return cli::run_guarded([&] { cli::do_decay(dec); });
  }
  if (dirac->parsed())
    return cli::run_guarded([&] { cli::do_dirac_example(dirac_n, dirac_csv); });
  if (selftest->parsed()) {
    self_cfg.out = &std::cout;
    return accept::run_and_report(self_cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
