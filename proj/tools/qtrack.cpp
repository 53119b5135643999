// qtrack: learns a linear-quadratic tracking controller from input/state
// data and a moving-horizon reference preview, and checks it against the
// model-based solution.
#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <string>

#include "qtrack/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool stop_after_first_vi = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "experiment configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory (created if missing)")
      ->required();
  cmd->add_option("--seed", args.seed,
                  "override the RNG seed from the configuration")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_flag("--stop-after-first-vi", args.stop_after_first_vi,
                "freeze the weights after the first value-iteration round and "
                "run the remaining steps without exploration");
}

qtrack::RunContext make_context(const CommonArgs& args) {
  qtrack::RunContext ctx;
  ctx.config_path = args.config;
  ctx.out_dir = args.out;
  ctx.stop_after_first_vi = args.stop_after_first_vi;
  ctx.cfg = qtrack::load_config(ctx.config_path);
  if (args.seed_given) ctx.cfg.learner.seed = args.seed;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "model-free optimal tracking with moving-horizon reference preview"};
  app.require_subcommand(1);

  CommonArgs oracle_args, learn_args, compare_args, eval_args;
  std::string weights_path;

  CLI::App* oracle = app.add_subcommand(
      "oracle", "model-based value matrix, gain, and structure report");
  add_common(oracle, oracle_args);

  CLI::App* learn = app.add_subcommand(
      "learn", "online learning run with weight/trajectory/error logs");
  add_common(learn, learn_args);

  CLI::App* compare = app.add_subcommand(
      "compare", "learned controller vs the exo-system baseline, metrics CSV");
  add_common(compare, compare_args);

  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate previously learned weights over the reference suite");
  add_common(eval, eval_args);
  eval->add_option("--weights", weights_path,
                   "weights CSV (defaults to <out>/weights.csv)")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (oracle->parsed()) {
    return qtrack::run_guarded(
        [&] { return qtrack::cmd_oracle(make_context(oracle_args)); });
  }
  if (learn->parsed()) {
    return qtrack::run_guarded(
        [&] { return qtrack::cmd_learn(make_context(learn_args)); });
  }
  if (compare->parsed()) {
    return qtrack::run_guarded(
        [&] { return qtrack::cmd_compare(make_context(compare_args)); });
  }
  return qtrack::run_guarded([&] {
    return qtrack::cmd_eval(make_context(eval_args), weights_path);
  });
}
