#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "quadlab/env/environment.hpp"
#include "quadlab/net.hpp"
#include "quadlab/replay.hpp"

namespace quadlab {

// Maps (observation, step index within the episode) to an action.
using Policy = std::function<std::vector<double>(std::span<const double>, std::uint64_t)>;

// Noise-free actor.
Policy deterministic_policy(const net::ParamVector& actor);

struct EpisodeRecord {
  double total_return = 0.0;
  std::uint64_t steps = 0;
  std::vector<double> rewards;
  std::vector<replay::Transition> transitions;  // filled when requested
  std::string end_reason;
  bool diverged = false;
};

// Runs one episode to completion. A SimulationDiverged error ends the episode
// early; the record keeps the return accumulated so far and sets diverged.
EpisodeRecord run_episode(env::Environment& environment, const Policy& policy,
                          std::uint64_t reset_seed, bool record_transitions);

}  // namespace quadlab
