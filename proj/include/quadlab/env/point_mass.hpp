#pragma once

#include "quadlab/env/environment.hpp"

namespace quadlab::env {

// One actuated mass on a line with linear drag: the 1-DOF surrogate of the
// forward-velocity reward. The action is a force command in [-bound, bound];
// the reward is 75 * v after the step. Return is linear in every past action
// with positive coefficients, so full positive force is optimal.
struct PointMassConfig {
  double mass = 1.0;
  double force_gain = 1.0;
  double drag = 1.0;
  double dt = 0.05;
  double action_bound = 0.7;
  double reward_scale = 75.0;
  std::uint64_t horizon = 50;
  double position_scale = 1.0;
  double velocity_scale = 1.0;
};

class PointMassEnv final : public Environment {
 public:
  explicit PointMassEnv(PointMassConfig config = {});

  std::size_t observation_size() const override { return 2; }
  std::size_t action_size() const override { return 1; }
  double action_bound() const override { return config_.action_bound; }
  std::uint64_t max_steps() const override { return config_.horizon; }

  std::vector<double> reset(std::uint64_t seed) override;
  EnvStep step(std::span<const double> action) override;

  double position() const { return position_; }
  double velocity() const { return velocity_; }

 private:
  PointMassConfig config_;
  double position_ = 0.0;
  double velocity_ = 0.0;
  std::uint64_t t_ = 0;
};

// Return of the constant +bound policy, the known optimum.
double point_mass_optimal_return(const PointMassConfig& config);

EnvFactory point_mass_factory(PointMassConfig config = {});

}  // namespace quadlab::env
