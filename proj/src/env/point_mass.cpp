#include "quadlab/env/point_mass.hpp"

#include <algorithm>
#include <cmath>

#include "quadlab/errors.hpp"

namespace quadlab::env {

PointMassEnv::PointMassEnv(PointMassConfig config) : config_(config) {
  if (!(config_.mass > 0.0 && config_.dt > 0.0 && config_.action_bound > 0.0) ||
      config_.horizon == 0)
    throw SpecError("point mass: mass, dt, bound and horizon must be positive");
}

std::vector<double> PointMassEnv::reset(std::uint64_t /*seed*/) {
  position_ = 0.0;
  velocity_ = 0.0;
  t_ = 0;
  return {0.0, 0.0};
}

EnvStep PointMassEnv::step(std::span<const double> action) {
  if (action.size() != 1) throw InputError("point mass takes one action");
  if (t_ >= config_.horizon) throw ProtocolError("step called after the horizon");
  const double a = std::clamp(action[0], -config_.action_bound, config_.action_bound);
  const double accel = (config_.force_gain * a - config_.drag * velocity_) / config_.mass;
  velocity_ += accel * config_.dt;
  position_ += velocity_ * config_.dt;
  ++t_;
  EnvStep out;
  out.observation = {position_ / config_.position_scale, velocity_ / config_.velocity_scale};
  out.reward = config_.reward_scale * velocity_;
  out.done = t_ >= config_.horizon;
  out.terminal = false;
  out.reason = out.done ? "timeout" : "none";
  return out;
}

double point_mass_optimal_return(const PointMassConfig& config) {
  PointMassEnv env(config);
  env.reset(0);
  const double a = config.action_bound;
  double total = 0.0;
  for (std::uint64_t t = 0; t < config.horizon; ++t) total += env.step({&a, 1}).reward;
  return total;
}

EnvFactory point_mass_factory(PointMassConfig config) {
  return [config](std::uint64_t) -> std::unique_ptr<Environment> {
    return std::make_unique<PointMassEnv>(config);
  };
}

}  // namespace quadlab::env
