#include "quadlab/harness/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "quadlab/errors.hpp"
#include "quadlab/rollout.hpp"

namespace quadlab::harness {

EvalReport make_report(env::TerrainKind terrain, std::vector<double> returns) {
  EvalReport r;
  r.terrain = terrain;
  r.stats = summarize(returns);
  r.returns = std::move(returns);
  return r;
}

TrialRunner checkpoint_runner(const Checkpoint& checkpoint,
                              std::shared_ptr<const env::Terrain> fixed_terrain) {
  const RunConfig config = checkpoint.run_config();
  const net::ParamVector actor = checkpoint.actor;
  if (actor.spec.input_size() != env::kObservationSize || actor.spec.output_size() != env::kActionSize)
    throw LoadError("checkpoint: actor does not fit the quadruped observation/action sizes");
  return [config, actor, fixed_terrain](env::TerrainKind kind, std::uint64_t seed) {
    auto settings = terrain_settings(config, kind);
    settings.fixed = fixed_terrain;
    const auto make_env = env::quadruped_factory(config.robot, config.t_max, settings);
    auto environment = make_env(seed);
    return run_episode(*environment, deterministic_policy(actor), seed, false).total_return;
  };
}

EvalReport evaluate(const TrialRunner& runner, env::TerrainKind terrain, std::size_t trials,
                    std::uint64_t eval_seed) {
  if (trials == 0) throw InputError("evaluate: trials must be >= 1");
  std::vector<double> returns;
  returns.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) returns.push_back(runner(terrain, eval_seed + i));
  return make_report(terrain, std::move(returns));
}

EvalReport evaluate(const Checkpoint& checkpoint, env::TerrainKind terrain, std::size_t trials,
                    std::uint64_t eval_seed, std::shared_ptr<const env::Terrain> fixed_terrain) {
  return evaluate(checkpoint_runner(checkpoint, std::move(fixed_terrain)), terrain, trials, eval_seed);
}

TransferResult transfer_experiment(const TrialRunner& runner, std::uint64_t eval_seed,
                                   std::size_t trials) {
  TransferResult t;
  t.flat = evaluate(runner, env::TerrainKind::flat, trials, eval_seed);
  t.rough = evaluate(runner, env::TerrainKind::rough, trials, eval_seed);
  t.degradation = t.flat.stats.mean - t.rough.stats.mean;
  return t;
}

TransferResult transfer_experiment(const Checkpoint& checkpoint, std::uint64_t eval_seed,
                                   std::size_t trials) {
  return transfer_experiment(checkpoint_runner(checkpoint), eval_seed, trials);
}

std::string report_csv(std::span<const EvalReport> reports) {
  std::size_t width = 0;
  for (const auto& r : reports) width = std::max(width, r.returns.size());
  std::ostringstream out;
  out << "terrain,mean,std,median,best";
  for (std::size_t i = 1; i <= width; ++i) out << ",trial_" << i;
  out << "\n";
  for (const auto& r : reports) {
    out << env::to_string(r.terrain) << ',' << format_real(r.stats.mean) << ','
        << format_real(r.stats.std) << ',' << format_real(r.stats.median) << ','
        << format_real(r.stats.best);
    for (std::size_t i = 0; i < width; ++i)
      out << ',' << (i < r.returns.size() ? format_real(r.returns[i]) : std::string());
    out << "\n";
  }
  return out.str();
}

void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << report_csv(reports);
}

std::string report_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "| Terrain | Mean Reward | Std. Dev. | Median Reward | Best Reward |\n";
  out << "|---|---:|---:|---:|---:|\n";
  char line[256];
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "| %s | %.2f | %.2f | %.2f | %.2f |\n",
                  env::to_string(r.terrain).c_str(), r.stats.mean, r.stats.std, r.stats.median,
                  r.stats.best);
    out << line;
  }
  return out.str();
}

}  // namespace quadlab::harness
