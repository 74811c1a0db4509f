#include "quadlab/rollout.hpp"

#include "quadlab/errors.hpp"

namespace quadlab {

Policy deterministic_policy(const net::ParamVector& actor) {
  return [actor](std::span<const double> obs, std::uint64_t) { return net::forward(actor, obs); };
}

EpisodeRecord run_episode(env::Environment& environment, const Policy& policy,
                          std::uint64_t reset_seed, bool record_transitions) {
  EpisodeRecord record;
  std::vector<double> obs = environment.reset(reset_seed);
  try {
    for (std::uint64_t t = 0; t < environment.max_steps(); ++t) {
      auto action = policy(obs, t);
      auto result = environment.step(action);
      record.total_return += result.reward;
      record.rewards.push_back(result.reward);
      ++record.steps;
      if (record_transitions) {
        record.transitions.push_back(
            {std::move(obs), std::move(action), result.reward, result.observation, result.terminal});
      }
      obs = std::move(result.observation);
      if (result.done) {
        record.end_reason = result.reason;
        break;
      }
    }
  } catch (const SimulationDiverged& e) {
    record.diverged = true;
    record.end_reason = "diverged";
  }
  return record;
}

}  // namespace quadlab
