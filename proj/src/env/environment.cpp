#include "quadlab/env/environment.hpp"

#include "quadlab/errors.hpp"

namespace quadlab::env {

QuadrupedEnv::QuadrupedEnv(Terrain terrain, RobotConfig config, std::uint64_t t_max,
                           Normalizers normalizers)
    : terrain_(std::move(terrain)),
      config_(config),
      t_max_(t_max),
      normalizers_(normalizers) {
  config_.validate();
  if (t_max_ == 0) throw InputError("T_max must be at least 1");
}

std::vector<double> QuadrupedEnv::reset(std::uint64_t seed) {
  auto [state, obs] = env::reset(terrain_, config_, seed, normalizers_);
  state_ = state;
  last_terms_ = {};
  started_ = true;
  return {obs.begin(), obs.end()};
}

EnvStep QuadrupedEnv::step(std::span<const double> action) {
  if (!started_) throw ProtocolError("step called before reset");
  auto result = env::step(state_, action, terrain_, config_, t_max_, normalizers_);
  state_ = result.state;
  last_terms_ = reward_terms(state_, config_, t_max_);
  EnvStep out;
  out.observation.assign(result.observation.begin(), result.observation.end());
  out.reward = result.reward;
  out.done = result.done;
  out.terminal = result.done && result.done_reason != DoneReason::timeout;
  out.reason = to_string(result.done_reason);
  return out;
}

EnvFactory quadruped_factory(RobotConfig config, std::uint64_t t_max, TerrainSettings terrain,
                             Normalizers normalizers) {
  config.validate();
  return [=](std::uint64_t seed) -> std::unique_ptr<Environment> {
    Terrain ground = terrain.fixed ? *terrain.fixed
                                   : make_terrain(terrain.kind, seed, terrain.amplitude,
                                                  terrain.cell_size);
    return std::make_unique<QuadrupedEnv>(std::move(ground), config, t_max, normalizers);
  };
}

}  // namespace quadlab::env
