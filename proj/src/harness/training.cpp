#include "quadlab/harness/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "quadlab/cem.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/harness/stats.hpp"
#include "quadlab/random.hpp"
#include "quadlab/replay.hpp"

namespace quadlab::harness {

namespace {

constexpr const char* kMetricsHeader = "step_or_generation,return,best_return,wall_ms";
constexpr const char* kCemColumns =
    ",mean_fitness,median_fitness,noise,buffer_size,rl_mean_fitness,es_mean_fitness,env_steps,"
    "grad_steps,diverged";

class Clock {
 public:
  explicit Clock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  std::string elapsed_ms() const {
    if (!enabled_) return "0";
    const auto d = std::chrono::steady_clock::now() - start_;
    return std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(d).count());
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

Checkpoint snapshot(const RunConfig& config, const rl::ActorCriticLearner& learner,
                    net::ParamVector actor, const TrainingProgress& progress) {
  Checkpoint c;
  c.algorithm = config.algorithm;
  c.actor = std::move(actor);
  c.critics = learner.critics();
  c.config = config_entries(config);
  c.progress = progress;
  return c;
}

struct Outputs {
  std::ofstream metrics;
  TrainResult result;
};

Outputs open_outputs(const RunConfig& config, bool cem_columns) {
  std::filesystem::create_directories(config.output_dir);
  Outputs out;
  out.result.metrics_path = config.output_dir / kMetricsFile;
  out.result.final_path = config.output_dir / kFinalCheckpointFile;
  out.result.best_path = config.output_dir / kBestCheckpointFile;
  std::filesystem::remove(config.output_dir / kAbortedFile);
  out.metrics.open(out.result.metrics_path, std::ios::binary | std::ios::trunc);
  if (!out.metrics) throw Error("cannot write " + out.result.metrics_path.string());
  out.metrics << kMetricsHeader << (cem_columns ? kCemColumns : "") << "\n";
  return out;
}

void finish(const RunConfig& config, Outputs& out) {
  out.metrics.flush();
  auto& r = out.result;
  r.final_checkpoint.progress.aborted = r.aborted;
  r.best_checkpoint.progress.aborted = r.aborted;
  save_checkpoint(r.final_checkpoint, r.final_path);
  save_checkpoint(r.best_checkpoint, r.best_path);
  if (r.aborted) {
    std::ofstream flag(config.output_dir / kAbortedFile, std::ios::binary);
    flag << r.abort_reason << "\n";
  }
}

bool step_cap_reached(const RunConfig& config, std::uint64_t env_steps) {
  return config.max_env_steps != 0 && env_steps >= config.max_env_steps;
}

TrainResult train_actor_critic(const RunConfig& config) {
  auto learner = make_learner(config, derive_seed(config.master_seed, {10}));
  const auto make_env = env::quadruped_factory(config.robot, config.t_max,
                                               terrain_settings(config, env::TerrainKind::flat));
  replay::ReplayBuffer buffer(config.buffer_capacity, env::kObservationSize, env::kActionSize);
  const double bound = config.robot.action_bound;

  Outputs out = open_outputs(config, false);
  auto& result = out.result;
  const Clock clock(config.record_wall_time);
  TrainingProgress progress;
  progress.best_return = -std::numeric_limits<double>::infinity();
  result.best_checkpoint = snapshot(config, *learner, learner->policy(), progress);

  std::uint64_t total_steps = 0;
  for (std::uint64_t episode = 0; episode < config.budget && !result.aborted && !step_cap_reached(config, total_steps);
       ++episode) {
    const std::uint64_t episode_seed = derive_seed(config.master_seed, {20, episode});
    auto environment = make_env(episode_seed);
    std::vector<double> obs = environment->reset(episode_seed);
    double episode_return = 0.0;
    try {
      for (std::uint64_t t = 0; t < config.t_max; ++t) {
        std::vector<double> action;
        if (total_steps < config.warmup_steps) {
          Rng rng(derive_seed(config.master_seed, {21, total_steps}));
          action.resize(env::kActionSize);
          for (double& a : action) a = rng.uniform(-bound, bound);
        } else {
          action = rl::exploration_action(learner->policy(), obs, config.rl.exploration_sigma, bound,
                                          derive_seed(config.master_seed, {22, total_steps}));
        }
        auto step = environment->step(action);
        episode_return += step.reward;
        buffer.push({obs, std::move(action), step.reward, step.observation, step.terminal});
        obs = std::move(step.observation);
        if (total_steps >= config.warmup_steps)
          learner->train_step(buffer, derive_seed(config.master_seed, {23, total_steps}));
        ++total_steps;
        if (step.done) break;
      }
    } catch (const SimulationDiverged& e) {
      result.aborted = true;
      result.abort_reason = std::string("simulation diverged in episode ") + std::to_string(episode) +
                            ": " + e.what();
    } catch (const TrainingError& e) {
      result.aborted = true;
      result.abort_reason = std::string("update failed in episode ") + std::to_string(episode) +
                            ": " + e.what();
    }

    progress.completed = episode + 1;
    progress.env_steps = total_steps;
    progress.actor_updates = learner->actor_updates();
    if (episode_return > progress.best_return) {
      progress.best_return = episode_return;
      result.best_checkpoint = snapshot(config, *learner, learner->policy(), progress);
    }
    out.metrics << episode << ',' << format_real(episode_return) << ','
                << format_real(progress.best_return) << ',' << clock.elapsed_ms() << "\n";
    ++result.rows;
  }
  result.final_checkpoint = snapshot(config, *learner, learner->policy(), progress);
  finish(config, out);
  return std::move(out.result);
}

TrainResult train_cem(const RunConfig& config) {
  auto learner = make_learner(config, derive_seed(config.master_seed, {10}));
  const auto make_env = env::quadruped_factory(config.robot, config.t_max,
                                               terrain_settings(config, env::TerrainKind::flat));
  replay::ReplayBuffer buffer(config.buffer_capacity, env::kObservationSize, env::kActionSize);
  const net::NetworkSpec spec = learner->policy().spec;
  cem::CemState state = cem::CemState::create(learner->policy().values, config.cem.initial_variance,
                                              config.cem.noise_initial, config.cem.population,
                                              config.cem.elites);
  const cem::NoiseSchedule schedule{config.cem.noise_decay, config.cem.noise_final};

  Outputs out = open_outputs(config, true);
  auto& result = out.result;
  const Clock clock(config.record_wall_time);
  TrainingProgress progress;
  progress.best_return = -std::numeric_limits<double>::infinity();
  result.best_checkpoint = snapshot(config, *learner, learner->policy(), progress);

  std::uint64_t previous_steps = 0;
  for (std::uint64_t g = 0; g < config.budget && !step_cap_reached(config, progress.env_steps); ++g) {
    const auto grad_steps =
        cem::grad_steps_for(previous_steps, config.cem.grad_steps_ratio, config.cem.max_grad_steps);
    cem::GenerationResult gen;
    try {
      gen = cem::cem_rl_generation(state, spec, learner.get(), make_env, buffer, grad_steps, schedule,
                                   derive_seed(config.master_seed, {30, g}));
    } catch (const TrainingError& e) {
      result.aborted = true;
      result.abort_reason =
          std::string("update failed in generation ") + std::to_string(g) + ": " + e.what();
      break;
    }
    state = std::move(gen.state);
    const auto& log = gen.log;
    previous_steps = log.env_steps;

    progress.completed = g + 1;
    progress.env_steps += log.env_steps;
    progress.actor_updates = learner->actor_updates();
    if (log.best_fitness > progress.best_return) {
      progress.best_return = log.best_fitness;
      result.best_checkpoint = snapshot(
          config, *learner, net::unflatten(spec, gen.population[log.best_index].params), progress);
    }
    out.metrics << g << ',' << format_real(log.best_fitness) << ','
                << format_real(progress.best_return) << ',' << clock.elapsed_ms() << ','
                << format_real(log.mean_fitness) << ',' << format_real(log.median_fitness) << ','
                << format_real(log.noise) << ',' << log.buffer_size << ','
                << format_real(log.rl_mean_fitness) << ',' << format_real(log.es_mean_fitness) << ','
                << log.env_steps << ',' << log.grad_steps << ',' << log.diverged << "\n";
    ++result.rows;
  }
  result.final_checkpoint = snapshot(config, *learner, net::unflatten(spec, state.mean), progress);
  finish(config, out);
  return std::move(out.result);
}

}  // namespace

std::unique_ptr<rl::ActorCriticLearner> make_learner(const RunConfig& config, std::uint64_t seed) {
  switch (config.algorithm) {
    case Algorithm::ddpg:
    case Algorithm::cem_ddpg:
      return std::make_unique<rl::DdpgLearner>(env::kObservationSize, env::kActionSize, config.hidden,
                                               config.rl, seed);
    case Algorithm::td3:
    case Algorithm::cem_td3:
      return std::make_unique<rl::Td3Learner>(env::kObservationSize, env::kActionSize, config.hidden,
                                              config.rl, seed);
  }
  throw ConfigError("unknown algorithm");
}

TrainResult train(const RunConfig& config) {
  config.validate();
  return is_evolutionary(config.algorithm) ? train_cem(config) : train_actor_critic(config);
}

}  // namespace quadlab::harness
