#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "quadlab/harness/checkpoint.hpp"
#include "quadlab/harness/config.hpp"
#include "quadlab/rl.hpp"

namespace quadlab::harness {

struct TrainResult {
  Checkpoint final_checkpoint;
  Checkpoint best_checkpoint;
  std::filesystem::path metrics_path;
  std::filesystem::path final_path;
  std::filesystem::path best_path;
  std::uint64_t rows = 0;
  bool aborted = false;
  std::string abort_reason;
};

// Files written into config.output_dir.
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kFinalCheckpointFile = "checkpoint_final.json";
inline constexpr const char* kBestCheckpointFile = "checkpoint_best.json";
inline constexpr const char* kAbortedFile = "ABORTED";

std::unique_ptr<rl::ActorCriticLearner> make_learner(const RunConfig& config, std::uint64_t seed);

// Runs the configured algorithm on flat terrain for config.budget episodes or
// generations. A diverged simulation or a failed update stops the run; the
// artifacts written so far are kept and marked aborted.
TrainResult train(const RunConfig& config);

}  // namespace quadlab::harness
