#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quadlab/env/quadruped.hpp"
#include "quadlab/env/terrain.hpp"

namespace quadlab::env {

struct EnvStep {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
  // True when the episode ended on a failure state (no bootstrapping past
  // it); false for time-limit truncation.
  bool terminal = false;
  std::string reason;
};

// Episodic continuous-control task, as seen by the learners and the harness.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t observation_size() const = 0;
  virtual std::size_t action_size() const = 0;
  virtual double action_bound() const = 0;
  virtual std::uint64_t max_steps() const = 0;

  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual EnvStep step(std::span<const double> action) = 0;
};

// Builds a fresh environment for a given episode seed (rough terrain is
// regenerated from it).
using EnvFactory = std::function<std::unique_ptr<Environment>(std::uint64_t seed)>;

class QuadrupedEnv final : public Environment {
 public:
  QuadrupedEnv(Terrain terrain, RobotConfig config, std::uint64_t t_max,
               Normalizers normalizers = {});

  std::size_t observation_size() const override { return kObservationSize; }
  std::size_t action_size() const override { return kActionSize; }
  double action_bound() const override { return config_.action_bound; }
  std::uint64_t max_steps() const override { return t_max_; }

  std::vector<double> reset(std::uint64_t seed) override;
  EnvStep step(std::span<const double> action) override;

  const RobotState& state() const { return state_; }
  const Terrain& terrain() const { return terrain_; }
  const RobotConfig& config() const { return config_; }
  // Reward decomposition of the most recent step.
  const RewardTerms& last_terms() const { return last_terms_; }

 private:
  Terrain terrain_;
  RobotConfig config_;
  std::uint64_t t_max_;
  Normalizers normalizers_;
  RobotState state_;
  RewardTerms last_terms_;
  bool started_ = false;
};

struct TerrainSettings {
  TerrainKind kind = TerrainKind::flat;
  double amplitude = 0.03;
  double cell_size = 0.05;
  // When set, every episode uses this grid instead of a seed-generated one.
  std::shared_ptr<const Terrain> fixed;
};

EnvFactory quadruped_factory(RobotConfig config, std::uint64_t t_max, TerrainSettings terrain,
                             Normalizers normalizers = {});

}  // namespace quadlab::env
