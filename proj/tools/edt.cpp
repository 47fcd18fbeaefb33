// edt command line: validate | evaluate | optimize | fuzz over JSON problem
// specifications.
#include <CLI11.hpp>

#include "edt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"entropic error-disturbance tradeoff toolkit"};
  app.require_subcommand(1);

  edt::cli::CliOptions opts;
  bool nats = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0;
  bool tol_set = false;

  app.add_flag("--nats", nats, "report entropies in nats (default: bits)");
  app.add_flag("--bits", [](std::int64_t) {}, "report entropies in bits (default)");
  app.add_option("--seed", seed, "override the seed of the problem config")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  app.add_option("--tol", tol, "construction tolerance (derived checks run at 10x)")
      ->check(CLI::PositiveNumber)
      ->each([&tol_set](const std::string&) { tol_set = true; });
  app.add_option("--out", opts.out_dir, "directory for report files");

  std::string validate_path, evaluate_path, optimize_path, csv_path;
  auto* validate = app.add_subcommand("validate", "run every invariant of a problem spec");
  validate->add_option("spec", validate_path, "problem spec JSON")->required();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a concrete tradeoff");
  evaluate->add_option("spec", evaluate_path, "problem spec JSON")->required();
  evaluate->add_option("--csv", csv_path, "append the record to this CSV file");

  auto* optimize = app.add_subcommand("optimize", "run the mini-max estimation");
  optimize->add_option("spec", optimize_path, "problem spec JSON")->required();

  Eigen::Index fuzz_dim = 2;
  int fuzz_trials = 1000;
  std::uint64_t fuzz_seed = 1;
  auto* fuzz = app.add_subcommand("fuzz", "bound compliance over random instances");
  fuzz->add_option("--dim", fuzz_dim, "Hilbert-space dimension (2-4)")
      ->check(CLI::Range(2, 4));
  fuzz->add_option("--trials", fuzz_trials, "number of random instances")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--fuzz-seed", fuzz_seed, "seed of the instance stream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return edt::cli::kExitIoError;
  }

  if (nats) opts.base = edt::LogBase::nats;
  if (seed_set) opts.seed = seed;
  if (tol_set) edt::set_tolerance(tol);
  opts.csv_path = csv_path;

  if (validate->parsed())
    return edt::cli::cmd_validate(validate_path, opts, std::cout, std::cerr);
  if (evaluate->parsed())
    return edt::cli::cmd_evaluate(evaluate_path, opts, std::cout, std::cerr);
  if (optimize->parsed())
    return edt::cli::cmd_optimize(optimize_path, opts, std::cout, std::cerr);
  if (fuzz->parsed()) {
    if (seed_set) fuzz_seed = seed;
    return edt::cli::cmd_fuzz(fuzz_dim, fuzz_trials, fuzz_seed, opts, std::cout, std::cerr);
  }
  return edt::cli::kExitIoError;
}
