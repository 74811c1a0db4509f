#include "quadlab/harness/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "quadlab/errors.hpp"
#include "quadlab/harness/checkpoint.hpp"
#include "quadlab/harness/config.hpp"
#include "quadlab/harness/evaluation.hpp"
#include "quadlab/harness/plot.hpp"
#include "quadlab/harness/training.hpp"

namespace quadlab::harness {

namespace {

struct TrainArgs {
  std::string algo;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

struct EvalArgs {
  std::string checkpoint;
  std::string terrain = "flat";
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  std::string fixed_terrain;
  std::string out;
};

struct TransferArgs {
  std::string checkpoint;
  std::uint64_t seed = 0;
  std::size_t trials = kDefaultTrials;
  std::string out;
};

struct PlotArgs {
  std::string metrics;
  std::string out;
};

int do_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  std::map<std::string, std::string> entries;
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    entries[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  apply_config_entries(cfg, entries);
  cfg.algorithm = algorithm_from_string(a.algo);
  if (a.seed) cfg.master_seed = *a.seed;
  cfg.output_dir = a.out;
  cfg.validate();

  const auto result = train(cfg);
  out << "algorithm " << to_string(cfg.algorithm) << ", seed " << cfg.master_seed << ": " << result.rows
      << " rows, best return " << format_real(result.final_checkpoint.progress.best_return) << "\n";
  out << "metrics: " << result.metrics_path.string() << "\n";
  out << "checkpoints: " << result.final_path.string() << ", " << result.best_path.string() << "\n";
  if (result.aborted) {
    out << "run aborted: " << result.abort_reason << "\n";
    return 2;
  }
  return 0;
}

int do_eval(const EvalArgs& a, std::ostream& out) {
  const auto checkpoint = load_checkpoint(a.checkpoint);
  std::shared_ptr<const env::Terrain> fixed;
  if (!a.fixed_terrain.empty()) fixed = std::make_shared<env::Terrain>(env::load_terrain(a.fixed_terrain));
  const auto report =
      evaluate(checkpoint, env::terrain_kind_from_string(a.terrain), a.trials, a.seed, fixed);
  const std::vector<EvalReport> reports{report};
  if (!a.out.empty()) write_report_csv(reports, a.out);
  out << report_table(reports);
  return 0;
}

int do_transfer(const TransferArgs& a, std::ostream& out) {
  const auto checkpoint = load_checkpoint(a.checkpoint);
  const auto result = transfer_experiment(checkpoint, a.seed, a.trials);
  const std::filesystem::path dir =
      a.out.empty() ? std::filesystem::path(a.checkpoint).parent_path() : std::filesystem::path(a.out);
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::vector<EvalReport> reports{result.flat, result.rough};
  write_report_csv(reports, dir / "transfer_report.csv");
  const std::string table = report_table(reports);
  {
    std::ofstream md(dir / "transfer_table.md", std::ios::binary);
    md << table << "\nDegradation (flat mean - rough mean): " << format_real(result.degradation) << "\n";
  }
  out << table << "degradation " << format_real(result.degradation) << "\n";
  out << "report: " << (dir / "transfer_report.csv").string() << "\n";
  return 0;
}

int do_plot(const PlotArgs& a, std::ostream& out) {
  plot_metrics(a.metrics, a.out);
  out << "wrote " << a.out << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"quadlab: evolutionary and actor-critic RL on a simulated quadruped", "quadlab"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an agent on flat terrain");
  train_cmd->add_option("--algo", train_args.algo, "ddpg | td3 | cem-ddpg | cem-td3")
      ->required()
      ->check(CLI::IsMember({"ddpg", "td3", "cem-ddpg", "cem-td3", "cem_ddpg", "cem_td3"}));
  train_cmd->add_option("--config", train_args.config, "Key-value config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_args.seed, "Master seed (overrides the config)");
  train_cmd->add_option("--out", train_args.out, "Output directory")->required();
  train_cmd->add_option("--set", train_args.overrides, "Config override key=value (repeatable)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint with noise-free rollouts");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint JSON")->required();
  eval_cmd->add_option("--terrain", eval_args.terrain, "flat | rough")
      ->check(CLI::IsMember({"flat", "rough"}))
      ->capture_default_str();
  eval_cmd->add_option("--trials", eval_args.trials, "Number of rollouts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed, "Evaluation seed; trial i uses seed + i")
      ->capture_default_str();
  eval_cmd->add_option("--fixed-terrain", eval_args.fixed_terrain, "Terrain file used for every trial")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_args.out, "Report CSV path");

  TransferArgs transfer_args;
  auto* transfer_cmd = app.add_subcommand("transfer", "Evaluate on flat then rough terrain");
  transfer_cmd->add_option("--checkpoint", transfer_args.checkpoint, "Checkpoint JSON")->required();
  transfer_cmd->add_option("--seed", transfer_args.seed, "Evaluation seed")->capture_default_str();
  transfer_cmd->add_option("--trials", transfer_args.trials, "Rollouts per terrain")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  transfer_cmd->add_option("--out", transfer_args.out,
                           "Directory for transfer_report.csv (default: next to the checkpoint)");

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "Render a metrics CSV as an SVG reward curve");
  plot_cmd->add_option("--metrics", plot_args.metrics, "metrics.csv from a training run")
      ->required()
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_args.out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return do_train(train_args, out);
    if (*eval_cmd) return do_eval(eval_args, out);
    if (*transfer_cmd) return do_transfer(transfer_args, out);
    if (*plot_cmd) return do_plot(plot_args, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace quadlab::harness
