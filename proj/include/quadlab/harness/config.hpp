#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "quadlab/cem.hpp"
#include "quadlab/env/environment.hpp"
#include "quadlab/env/quadruped.hpp"
#include "quadlab/rl.hpp"

namespace quadlab::harness {

enum class Algorithm { ddpg, td3, cem_ddpg, cem_td3 };

// Accepts "ddpg", "td3", "cem-ddpg"/"cem_ddpg", "cem-td3"/"cem_td3".
Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algorithm);  // "ddpg", "td3", "cem-ddpg", "cem-td3"
bool is_evolutionary(Algorithm algorithm);

struct CemSettings {
  std::size_t population = 10;
  std::size_t elites = 5;
  double initial_variance = 1e-3;
  double noise_initial = 1e-3;
  double noise_decay = 0.999;
  double noise_final = 1e-5;
  double grad_steps_ratio = 1.0;
  std::uint64_t max_grad_steps = 1000;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::td3;
  std::uint64_t master_seed = 0;
  // Episodes for DDPG/TD3, generations for the CEM variants.
  std::uint64_t budget = 100;
  // Stops the run once this many environment steps have been collected,
  // checked between episodes or generations. 0 disables the cap.
  std::uint64_t max_env_steps = 0;
  std::uint64_t t_max = 1000;
  env::RobotConfig robot;
  double rough_amplitude = 0.03;
  double terrain_cell_size = 0.05;
  std::vector<std::size_t> hidden = {64, 64};
  rl::RlHyperparams rl;
  std::size_t buffer_capacity = 1000000;
  std::uint64_t warmup_steps = 1000;
  CemSettings cem;
  // Off by default so that metrics files are reproducible byte for byte.
  bool record_wall_time = false;
  std::filesystem::path output_dir = "runs/default";

  void validate() const;
};

// Flat "key = value" pairs in a stable order. Round-trips through
// apply_config_entries; checkpoints store this as the config snapshot.
std::map<std::string, std::string> config_entries(const RunConfig& config);

// Applies entries on top of `config`. Unknown keys and malformed values
// throw ConfigError.
void apply_config_entries(RunConfig& config, const std::map<std::string, std::string>& entries);

// Config file grammar, one entry per line:
//   line    := blank | comment | entry
//   comment := '#' anything
//   entry   := key '=' value [comment]
// Keys are the names produced by config_entries; whitespace around keys and
// values is ignored; a repeated key is an error.
std::map<std::string, std::string> parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

env::TerrainSettings terrain_settings(const RunConfig& config, env::TerrainKind kind);

}  // namespace quadlab::harness
