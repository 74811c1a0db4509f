#include "quadlab/cem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "quadlab/errors.hpp"
#include "quadlab/harness/stats.hpp"
#include "quadlab/random.hpp"
#include "quadlab/rollout.hpp"

namespace quadlab::cem {

void CemState::validate() const {
  if (mean.empty()) throw InputError("cem: empty mean");
  if (variance.size() != mean.size()) throw InputError("cem: variance/mean length mismatch");
  if (population_size < 2) throw InputError("cem: population size must be >= 2");
  if (elite_count < 1 || elite_count > population_size)
    throw InputError("cem: elite count must be in [1, N]");
  if (!(noise >= 0.0)) throw InputError("cem: noise must be non-negative");
  for (const double v : variance)
    if (!(v >= 0.0)) throw InputError("cem: variance must be non-negative");
}

CemState CemState::create(std::vector<double> mean, double initial_variance, double noise,
                          std::size_t population_size, std::size_t elite_count) {
  CemState s;
  s.variance.assign(mean.size(), initial_variance);
  s.mean = std::move(mean);
  s.noise = noise;
  s.population_size = population_size;
  s.elite_count = elite_count;
  s.validate();
  return s;
}

std::vector<Individual> sample_population(const CemState& state, std::uint64_t seed) {
  state.validate();
  const std::size_t dim = state.mean.size();
  std::vector<double> scale(dim);
  for (std::size_t k = 0; k < dim; ++k) scale[k] = std::sqrt(state.variance[k] + state.noise);

  Rng rng(seed);
  std::vector<Individual> population(state.population_size);
  for (auto& ind : population) {
    ind.params.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) ind.params[k] = state.mean[k] + scale[k] * rng.normal();
  }
  return population;
}

std::vector<double> elite_weights(std::size_t elite_count) {
  if (elite_count == 0) throw InputError("elite_weights: K must be >= 1");
  std::vector<double> w(elite_count);
  const double top = std::log(1.0 + static_cast<double>(elite_count));
  double total = 0.0;
  for (std::size_t i = 0; i < elite_count; ++i) {
    w[i] = top - std::log(static_cast<double>(i + 1));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

CemState cem_update(const CemState& state, std::span<const std::vector<double>> individuals,
                    std::span<const double> fitnesses) {
  state.validate();
  if (individuals.size() != state.population_size || fitnesses.size() != state.population_size)
    throw InputError("cem_update: expected one fitness per individual");
  for (const double f : fitnesses)
    if (!std::isfinite(f)) throw InputError("cem_update: non-finite fitness");
  for (const auto& z : individuals)
    if (z.size() != state.mean.size()) throw InputError("cem_update: individual length mismatch");

  std::vector<std::size_t> order(individuals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });

  const auto weights = elite_weights(state.elite_count);
  CemState next = state;
  const std::size_t dim = state.mean.size();
  std::fill(next.mean.begin(), next.mean.end(), 0.0);
  std::fill(next.variance.begin(), next.variance.end(), 0.0);
  for (std::size_t i = 0; i < state.elite_count; ++i) {
    const auto& z = individuals[order[i]];
    const double w = weights[i];
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = z[k] - state.mean[k];
      next.mean[k] += w * z[k];
      next.variance[k] += w * d * d;
    }
  }
  for (double& v : next.variance) v += state.noise;
  next.generation = state.generation + 1;
  return next;
}

CemState cem_update(const CemState& state, std::span<const Individual> individuals) {
  std::vector<std::vector<double>> params;
  std::vector<double> fitness;
  params.reserve(individuals.size());
  for (const auto& ind : individuals) {
    params.push_back(ind.params);
    fitness.push_back(ind.fitness);
  }
  return cem_update(state, params, fitness);
}

CemState decay_noise(const CemState& state, const NoiseSchedule& schedule) {
  CemState next = state;
  next.noise = std::max(schedule.floor, state.noise * schedule.decay);
  // never raise the noise through the floor
  next.noise = std::min(next.noise, std::max(state.noise, schedule.floor));
  return next;
}

std::uint64_t grad_steps_for(std::uint64_t previous_env_steps, double ratio, std::uint64_t cap) {
  if (!(ratio >= 0.0)) throw InputError("grad step ratio must be non-negative");
  const auto scaled =
      static_cast<std::uint64_t>(std::floor(ratio * static_cast<double>(previous_env_steps)));
  return std::min(cap, scaled);
}

GenerationResult cem_rl_generation(const CemState& state, const net::NetworkSpec& actor_spec,
                                   rl::ActorCriticLearner* learner,
                                   const env::EnvFactory& make_env, replay::ReplayBuffer& buffer,
                                   std::uint64_t grad_steps, const NoiseSchedule& schedule,
                                   std::uint64_t seed) {
  state.validate();
  if (actor_spec.parameter_count() != state.mean.size())
    throw InputError("cem_rl_generation: actor spec does not match the search dimension");
  if (grad_steps > 0 && learner == nullptr)
    throw InputError("cem_rl_generation: gradient steps requested without a learner");

  GenerationResult result;
  result.population = sample_population(state, derive_seed(seed, {0}));
  auto& population = result.population;

  const std::size_t n_grad = state.population_size / 2;
  const bool train = grad_steps > 0 && !buffer.empty();
  for (std::size_t j = 0; j < n_grad && train; ++j) {
    learner->load_actor(net::unflatten(actor_spec, population[j].params));
    for (std::uint64_t g = 0; g < grad_steps; ++g) learner->train_step(buffer, derive_seed(seed, {1, j, g}));
    population[j].params = learner->policy().values;
    population[j].rl_updated = true;
  }

  std::vector<EpisodeRecord> records;
  records.reserve(population.size());
  for (std::size_t j = 0; j < population.size(); ++j) {
    const std::uint64_t episode_seed = derive_seed(seed, {2, j});
    auto environment = make_env(episode_seed);
    records.push_back(run_episode(*environment,
                                  deterministic_policy(net::unflatten(actor_spec, population[j].params)),
                                  episode_seed, true));
    population[j].fitness = records.back().total_return;
  }

  // barrier: transitions enter the buffer in individual order
  auto& log = result.log;
  for (const auto& record : records) {
    for (const auto& t : record.transitions) buffer.push(t);
    log.env_steps += record.steps;
    if (record.diverged) ++log.diverged;
  }

  std::vector<double> fitness(population.size());
  double rl_total = 0.0, es_total = 0.0;
  std::size_t rl_count = 0;
  for (std::size_t j = 0; j < population.size(); ++j) {
    fitness[j] = population[j].fitness;
    if (population[j].rl_updated) {
      rl_total += fitness[j];
      ++rl_count;
    } else {
      es_total += fitness[j];
    }
  }
  const auto summary = harness::summarize(fitness);
  log.generation = state.generation;
  log.best_fitness = summary.best;
  log.mean_fitness = summary.mean;
  log.median_fitness = summary.median;
  log.best_index = static_cast<std::size_t>(
      std::distance(fitness.begin(), std::max_element(fitness.begin(), fitness.end())));
  log.rl_mean_fitness =
      rl_count > 0 ? rl_total / static_cast<double>(rl_count) : std::numeric_limits<double>::quiet_NaN();
  log.es_mean_fitness = es_total / static_cast<double>(population.size() - rl_count);
  log.grad_steps = train ? grad_steps : 0;
  log.buffer_size = buffer.size();

  result.state = decay_noise(cem_update(state, population), schedule);
  log.noise = result.state.noise;
  return result;
}

ToyResult cem_solve_toy(const std::function<double(std::span<const double>)>& objective,
                        CemState state, std::size_t generations, const NoiseSchedule& schedule,
                        std::uint64_t seed) {
  ToyResult out;
  out.best_fitness = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < generations; ++g) {
    auto population = sample_population(state, derive_seed(seed, {g}));
    for (auto& ind : population) {
      ind.fitness = objective(ind.params);
      if (ind.fitness > out.best_fitness) {
        out.best_fitness = ind.fitness;
        out.best_params = ind.params;
      }
    }
    state = decay_noise(cem_update(state, population), schedule);
  }
  out.state = std::move(state);
  return out;
}

}  // namespace quadlab::cem
