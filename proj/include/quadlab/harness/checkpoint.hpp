#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quadlab/harness/config.hpp"
#include "quadlab/net.hpp"

namespace quadlab::harness {

inline constexpr int kCheckpointVersion = 1;

struct TrainingProgress {
  std::uint64_t completed = 0;  // episodes or generations
  std::uint64_t env_steps = 0;
  std::uint64_t actor_updates = 0;
  double best_return = 0.0;
  bool aborted = false;

  friend bool operator==(const TrainingProgress&, const TrainingProgress&) = default;
};

struct Checkpoint {
  int format_version = kCheckpointVersion;
  Algorithm algorithm = Algorithm::td3;
  net::ParamVector actor;
  // Optional; evaluation only ever needs the actor.
  std::vector<std::pair<std::string, net::ParamVector>> critics;
  std::map<std::string, std::string> config;
  TrainingProgress progress;

  // Config snapshot applied over the defaults.
  RunConfig run_config() const;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
// Throws LoadError naming the cause: malformed document, unsupported version,
// or parameter length mismatch.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace quadlab::harness
