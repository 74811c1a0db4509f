#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quadlab/env/environment.hpp"
#include "quadlab/net.hpp"
#include "quadlab/replay.hpp"
#include "quadlab/rl.hpp"

namespace quadlab::cem {

// Diagonal Gaussian search distribution over flat actor parameters.
struct CemState {
  std::vector<double> mean;
  std::vector<double> variance;
  double noise = 1e-3;  // additive floor, epsilon_cem
  std::size_t population_size = 10;
  std::size_t elite_count = 5;
  std::uint64_t generation = 0;

  void validate() const;

  static CemState create(std::vector<double> mean, double initial_variance, double noise,
                         std::size_t population_size, std::size_t elite_count);
};

struct Individual {
  std::vector<double> params;
  double fitness = 0.0;
  bool rl_updated = false;
};

// z_j = mean + sqrt(variance + noise) * g_j, g_j ~ N(0, I).
std::vector<Individual> sample_population(const CemState& state, std::uint64_t seed);

// lambda_i proportional to log(1 + K) - log(i), i = 1..K, summing to 1.
std::vector<double> elite_weights(std::size_t elite_count);

// Ranks by fitness (descending, ties to the lower index), recombines the top
// K around the previous mean:
//   mean'     = sum lambda_i z_i
//   variance' = sum lambda_i (z_i - mean_old)^2 + noise
CemState cem_update(const CemState& state, std::span<const std::vector<double>> individuals,
                    std::span<const double> fitnesses);
CemState cem_update(const CemState& state, std::span<const Individual> individuals);

struct NoiseSchedule {
  double decay = 0.999;
  double floor = 1e-5;
};

// noise <- max(floor, noise * decay)
CemState decay_noise(const CemState& state, const NoiseSchedule& schedule);

struct GenerationLog {
  std::uint64_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double median_fitness = 0.0;
  double noise = 0.0;  // after decay
  std::size_t buffer_size = 0;
  double rl_mean_fitness = 0.0;  // NaN when no individual was rl_updated
  double es_mean_fitness = 0.0;
  std::uint64_t env_steps = 0;
  std::uint64_t grad_steps = 0;  // per rl_updated individual
  std::size_t diverged = 0;
  std::size_t best_index = 0;
};

struct GenerationResult {
  CemState state;
  std::vector<Individual> population;
  GenerationLog log;
};

// Gradient steps per rl_updated individual: min(cap, floor(ratio * steps)).
std::uint64_t grad_steps_for(std::uint64_t previous_env_steps, double ratio, std::uint64_t cap);

// One CEM-RL generation:
//  (a) sample N individuals;
//  (b) the first floor(N/2) are loaded into the shared learner's actor and
//      receive grad_steps train steps from the shared buffer, then written
//      back and marked rl_updated;
//  (c) each individual plays one noise-free episode on its own seeded
//      environment; fitness is the episode return; transitions are pushed to
//      the buffer in individual order;
//  (d) cem_update over all N; (e) decay_noise.
// learner may be null only when grad_steps == 0.
GenerationResult cem_rl_generation(const CemState& state, const net::NetworkSpec& actor_spec,
                                   rl::ActorCriticLearner* learner,
                                   const env::EnvFactory& make_env, replay::ReplayBuffer& buffer,
                                   std::uint64_t grad_steps, const NoiseSchedule& schedule,
                                   std::uint64_t seed);

struct ToyResult {
  CemState state;
  std::vector<double> best_params;
  double best_fitness = 0.0;
};

// Plain CEM (no RL coupling) maximising a deterministic objective.
ToyResult cem_solve_toy(const std::function<double(std::span<const double>)>& objective,
                        CemState state, std::size_t generations, const NoiseSchedule& schedule,
                        std::uint64_t seed);

}  // namespace quadlab::cem
