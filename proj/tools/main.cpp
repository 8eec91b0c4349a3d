#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, tl1pca::cli::SolverFlags& s) {
  cmd->add_option("--seed", s.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--theta0", s.theta0, "initial step angle in (0, pi/2]")->capture_default_str();
  cmd->add_option("--rel-tol", s.rel_tol, "relative objective-gain tolerance")->capture_default_str();
  cmd->add_option("--max-iter", s.max_iter, "iteration cap per component")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tl1pca::cli;

  CLI::App app{"Robust PCA with the transformed-l1 dispersion objective"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit m projection vectors to a CSV dataset");
  fit_cmd->add_option("--method", fit.method, "tl1 | l1 | lp | l2")->required();
  fit_cmd->add_option("--a", fit.a, "Tl1 shape parameter")->capture_default_str();
  fit_cmd->add_option("--p", fit.p, "lp exponent in (0,1]")->capture_default_str();
  fit_cmd->add_option("--m", fit.m, "number of projection vectors")->capture_default_str();
  fit_cmd->add_option("--input", fit.input, "dataset CSV")->required();
  fit_cmd->add_option("--out-dir", fit.out_dir, "output directory")->required();
  add_solver_flags(fit_cmd, fit.solver);

  ToyArgs toy;
  auto* toy_cmd = app.add_subcommand("toy", "2-D outlier experiment: angle of the first component to 45 degrees");
  toy_cmd->add_option("--method", toy.methods, "methods to run")->delimiter(',')->capture_default_str();
  toy_cmd->add_option("--a", toy.a, "Tl1 shape parameters")->delimiter(',')->capture_default_str();
  toy_cmd->add_option("--p", toy.p, "lp exponents")->delimiter(',')->capture_default_str();
  toy_cmd->add_option("--out-dir", toy.out_dir, "output directory")->required();
  add_solver_flags(toy_cmd, toy.solver);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "1-NN accuracy against reduced dimension over random splits");
  eval_cmd->add_option("--input", ev.input, "dataset CSV")->required();
  eval_cmd->add_option("--method", ev.methods, "methods to run")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--a", ev.a, "Tl1 shape parameter grid")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--p", ev.p, "lp exponent grid")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--dims", ev.dims, "dimensions, e.g. 1..60 or 1,2,5..20:5")->capture_default_str();
  eval_cmd->add_option("--block", ev.block, "block-noise size for training images (0 = none)")->capture_default_str();
  eval_cmd->add_option("--fill", ev.fill, "block fill: random | zero | max")->capture_default_str();
  eval_cmd->add_option("--repeats", ev.repeats, "number of random splits")->capture_default_str();
  eval_cmd->add_option("--train-fraction", ev.train_fraction, "per-class training fraction (default 0.7)");
  eval_cmd->add_option("--train-per-class", ev.train_per_class, "per-class training count");
  eval_cmd->add_flag("--refit-per-dim", ev.refit_per_dim, "fit W separately for every dimension");
  eval_cmd->add_option("--out-dir", ev.out_dir, "output directory")->required();
  add_solver_flags(eval_cmd, ev.solver);

  ConvergenceArgs conv;
  auto* conv_cmd = app.add_subcommand("convergence", "objective value per iteration for the first component");
  conv_cmd->add_option("--input", conv.input, "dataset CSV (default: toy data)");
  conv_cmd->add_option("--method", conv.method, "tl1 | l1 | lp")->capture_default_str();
  conv_cmd->add_option("--a", conv.a, "Tl1 shape parameter")->capture_default_str();
  conv_cmd->add_option("--p", conv.p, "lp exponent")->capture_default_str();
  conv_cmd->add_option("--out-dir", conv.out_dir, "output directory")->required();
  add_solver_flags(conv_cmd, conv.solver);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic labeled dataset");
  synth_cmd->add_option("--classes", synth.classes)->capture_default_str();
  synth_cmd->add_option("--per-class", synth.per_class)->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim)->capture_default_str();
  synth_cmd->add_option("--noise-fraction", synth.noise_fraction)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--output", synth.output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fit_cmd) cmd_fit(fit);
    if (*toy_cmd) cmd_toy(toy);
    if (*eval_cmd) cmd_eval(ev);
    if (*conv_cmd) cmd_convergence(conv);
    if (*synth_cmd) cmd_synth(synth);
  } catch (const tl1pca::Error& e) {
    std::cerr << "tl1pca: " << tl1pca::to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "tl1pca: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
