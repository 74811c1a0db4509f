#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quadlab/env/terrain.hpp"
#include "quadlab/harness/checkpoint.hpp"
#include "quadlab/harness/stats.hpp"

namespace quadlab::harness {

inline constexpr std::size_t kDefaultTrials = 10;

struct EvalReport {
  env::TerrainKind terrain = env::TerrainKind::flat;
  std::vector<double> returns;
  Summary stats;
};

EvalReport make_report(env::TerrainKind terrain, std::vector<double> returns);

// Return of one noise-free episode on the given terrain with the given seed.
// Production code plays the checkpoint actor; tests inject synthetic returns.
using TrialRunner = std::function<double(env::TerrainKind, std::uint64_t seed)>;

TrialRunner checkpoint_runner(const Checkpoint& checkpoint,
                              std::shared_ptr<const env::Terrain> fixed_terrain = nullptr);

// Trial i uses seed eval_seed + i for both the terrain and the reset.
EvalReport evaluate(const TrialRunner& runner, env::TerrainKind terrain, std::size_t trials,
                    std::uint64_t eval_seed);
EvalReport evaluate(const Checkpoint& checkpoint, env::TerrainKind terrain,
                    std::size_t trials = kDefaultTrials, std::uint64_t eval_seed = 0,
                    std::shared_ptr<const env::Terrain> fixed_terrain = nullptr);

struct TransferResult {
  EvalReport flat;
  EvalReport rough;
  double degradation = 0.0;  // mean_flat - mean_rough
};

TransferResult transfer_experiment(const TrialRunner& runner, std::uint64_t eval_seed,
                                   std::size_t trials = kDefaultTrials);
TransferResult transfer_experiment(const Checkpoint& checkpoint, std::uint64_t eval_seed,
                                   std::size_t trials = kDefaultTrials);

// terrain,mean,std,median,best,trial_1..trial_n
std::string report_csv(std::span<const EvalReport> reports);
void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path);

// Markdown table: Terrain | Mean Reward | Std. Dev. | Median Reward | Best Reward
std::string report_table(std::span<const EvalReport> reports);

}  // namespace quadlab::harness
