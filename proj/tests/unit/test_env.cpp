#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "quadlab/env/environment.hpp"
#include "quadlab/env/point_mass.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/random.hpp"
#include "support.hpp"

namespace quadlab::env {
namespace {

Terrain flat() { return make_terrain(TerrainKind::flat, 0, 0.0, 0.05); }

std::vector<double> stance_action(const RobotConfig& cfg) {
  const auto q = cfg.nominal_stance();
  return {q.begin(), q.end()};
}

TEST(Terrain, FlatIsZeroEverywhere) {
  const auto t = make_terrain(TerrainKind::flat, 99, 0.5, 0.05);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(t.height(rng.uniform(-50, 50), rng.uniform(-50, 50)), 0.0);
}

TEST(Terrain, RoughIsDeterministicAndBounded) {
  const auto a = make_terrain(TerrainKind::rough, 7, 0.03, 0.05);
  const auto b = make_terrain(TerrainKind::rough, 7, 0.03, 0.05);
  EXPECT_EQ(a.heights(), b.heights());
  Rng rng(2);
  bool any_nonzero = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-25, 25), y = rng.uniform(-6, 6);
    const double h = a.height(x, y);
    EXPECT_EQ(h, a.height(x, y));
    EXPECT_LE(h, 0.03);
    EXPECT_GE(h, -0.03);
    any_nonzero |= h != 0.0;
  }
  EXPECT_TRUE(any_nonzero);
  EXPECT_NE(a.heights(), make_terrain(TerrainKind::rough, 8, 0.03, 0.05).heights());
}

TEST(Terrain, BilinearBetweenNodesAndExactAtNodes) {
  const auto t = make_terrain(TerrainKind::rough, 3, 0.03, 0.1, 5, 7);
  const auto node = [&](std::size_t r, std::size_t c) { return t.heights()[r * 7 + c]; };
  // node (r, c) sits at x = (c - 3) * 0.1, y = (r - 2) * 0.1
  EXPECT_DOUBLE_EQ(t.height(0.0, 0.0), node(2, 3));
  EXPECT_DOUBLE_EQ(t.height(0.1, -0.1), node(1, 4));
  const double fx = 0.25, fy = 0.75;
  const double x = (fx) * 0.1, y = (fy) * 0.1;
  const double want = (1 - fx) * (1 - fy) * node(2, 3) + fx * (1 - fy) * node(2, 4) +
                      (1 - fx) * fy * node(3, 3) + fx * fy * node(3, 4);
  EXPECT_NEAR(t.height(x, y), want, 1e-15);
  // continuity across a cell edge
  EXPECT_NEAR(t.height(0.1 - 1e-12, 0.03), t.height(0.1 + 1e-12, 0.03), 1e-12);
  // outside the grid the border is held
  EXPECT_DOUBLE_EQ(t.height(100.0, 100.0), node(4, 6));
}

TEST(Terrain, BadCellSizeThrows) {
  EXPECT_THROW(make_terrain(TerrainKind::rough, 1, 0.03, 0.0), InputError);
  EXPECT_THROW(make_terrain(TerrainKind::flat, 1, 0.03, -1.0), InputError);
  EXPECT_THROW(make_terrain(TerrainKind::rough, 1, -0.03, 0.05), InputError);
}

TEST(Terrain, FileRoundTrip) {
  const auto dir = quadlab::testing::fresh_dir("terrain");
  const auto t = make_terrain(TerrainKind::rough, 11, 0.03, 0.05, 9, 13);
  save_terrain(t, dir / "t.txt");
  const auto back = load_terrain(dir / "t.txt");
  EXPECT_EQ(back.kind(), TerrainKind::rough);
  EXPECT_EQ(back.seed(), 11u);
  EXPECT_EQ(back.rows(), 9u);
  EXPECT_EQ(back.cols(), 13u);
  EXPECT_EQ(back.heights(), t.heights());
  const auto text = quadlab::testing::read_file(dir / "t.txt");
  EXPECT_EQ(text.rfind("kind rough\nseed 11\namplitude ", 0), 0u);

  std::ofstream(dir / "bad.txt") << "kind rough\nseed 1\namplitude 0.03\ncell_size 0.05\nrows 2\ncols 2\n0 0 0\n";
  EXPECT_THROW(load_terrain(dir / "bad.txt"), LoadError);
  EXPECT_THROW(load_terrain(dir / "missing.txt"), LoadError);
}

TEST(Pd, TorqueFormulaClampAndSign) {
  RobotConfig cfg;
  JointArray zero{}, target{}, angles{};
  EXPECT_EQ(pd_torque(zero, zero, zero, cfg), zero);

  cfg.pd_kp = 10.0;
  target.fill(0.5);
  angles.fill(-0.5);
  for (const double tau : pd_torque(target, angles, zero, cfg)) EXPECT_EQ(tau, 5.0);

  cfg = RobotConfig{};
  target.fill(0.1);
  angles.fill(0.2);
  for (const double tau : pd_torque(target, angles, zero, cfg)) EXPECT_LT(tau, 0.0);

  JointArray vel{};
  vel.fill(0.3);
  target.fill(0.25);
  angles.fill(0.2);
  for (const double tau : pd_torque(target, angles, vel, cfg))
    EXPECT_DOUBLE_EQ(tau, 40.0 * 0.05 - 1.0 * 0.3);
}

TEST(Pd, TargetsClampedAndTorquesBounded) {
  RobotConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    JointArray target{}, angles{}, vel{};
    for (std::size_t j = 0; j < kJoints; ++j) {
      target[j] = rng.uniform(-3, 3);
      angles[j] = rng.uniform(-1.5, 1.5);
      vel[j] = rng.uniform(-20, 20);
    }
    JointArray clamped = target;
    for (double& t : clamped) t = std::clamp(t, -0.7, 0.7);
    const auto tau = pd_torque(target, angles, vel, cfg);
    EXPECT_EQ(tau, pd_torque(clamped, angles, vel, cfg));
    for (const double v : tau) {
      EXPECT_LE(v, 5.0);
      EXPECT_GE(v, -5.0);
    }
  }
}

TEST(Kinematics, StraightLegsHangBelowHips) {
  RobotConfig cfg;
  RobotState s;
  s.torso_position = {0.0, 0.0, 1.0};
  const auto feet = forward_kinematics(s, cfg);
  for (std::size_t leg = 0; leg < kLegs; ++leg) {
    const auto hip = cfg.hip_offset(leg);
    EXPECT_NEAR(feet[leg][0], hip[0], 1e-15);
    EXPECT_NEAR(feet[leg][1], hip[1], 1e-15);
    EXPECT_NEAR(feet[leg][2], 1.0 - 0.24, 1e-15);
  }
}

TEST(Kinematics, HipAtNinetyDegreesIsHorizontal) {
  RobotConfig cfg;
  RobotState s;
  s.torso_position = {0.0, 0.0, 1.0};
  s.joint_angles[0] = std::numbers::pi / 2;
  const auto feet = forward_kinematics(s, cfg);
  EXPECT_NEAR(feet[0][2], 1.0, 1e-15);
  EXPECT_NEAR(feet[0][0], 0.2 + 0.24, 1e-15);
}

TEST(Kinematics, MatchesSymbolicChain) {
  RobotConfig cfg;
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    RobotState s;
    for (double& v : s.torso_position) v = rng.uniform(-1, 1);
    const double roll = rng.uniform(-0.5, 0.5), pitch = rng.uniform(-0.5, 0.5), yaw = rng.uniform(-3, 3);
    s.torso_orientation = {roll, pitch, yaw};
    for (double& q : s.joint_angles) q = rng.uniform(-1.5, 1.5);
    const auto feet = forward_kinematics(s, cfg);
    for (std::size_t leg = 0; leg < kLegs; ++leg) {
      const double h = s.joint_angles[2 * leg], k = s.joint_angles[2 * leg + 1];
      const double bx = (leg < 2 ? 0.2 : -0.2) + 0.12 * std::sin(h) + 0.12 * std::sin(h + k);
      const double by = leg % 2 == 0 ? 0.1 : -0.1;
      const double bz = -0.12 * std::cos(h) - 0.12 * std::cos(h + k);
      // rotate by Rz(yaw) Ry(pitch) Rx(roll) one axis at a time
      double x = bx, y = by * std::cos(roll) - bz * std::sin(roll), z = by * std::sin(roll) + bz * std::cos(roll);
      const double x2 = x * std::cos(pitch) + z * std::sin(pitch), z2 = -x * std::sin(pitch) + z * std::cos(pitch);
      x = x2;
      z = z2;
      const double x3 = x * std::cos(yaw) - y * std::sin(yaw), y3 = x * std::sin(yaw) + y * std::cos(yaw);
      EXPECT_NEAR(feet[leg][0], s.torso_position[0] + x3, 1e-12);
      EXPECT_NEAR(feet[leg][1], s.torso_position[1] + y3, 1e-12);
      EXPECT_NEAR(feet[leg][2], s.torso_position[2] + z, 1e-12);
    }
  }
}

TEST(Kinematics, FootVelocityIsPositionDerivative) {
  RobotConfig cfg;
  Rng rng(5);
  RobotState s;
  s.torso_orientation = {0.1, -0.2, 0.3};
  for (double& v : s.linear_velocity) v = rng.uniform(-1, 1);
  for (double& v : s.angular_velocity) v = rng.uniform(-1, 1);
  for (double& q : s.joint_angles) q = rng.uniform(-1, 1);
  for (double& q : s.joint_velocities) q = rng.uniform(-2, 2);
  const auto vel = foot_velocities(s, cfg);

  // advance along the velocities by a tiny interval, rotating with omega
  const double h = 1e-6;
  const auto advance = [&](double sign) {
    RobotState m = s;
    for (int k = 0; k < 3; ++k) m.torso_position[k] += sign * h * s.linear_velocity[k];
    for (std::size_t j = 0; j < kJoints; ++j) m.joint_angles[j] += sign * h * s.joint_velocities[j];
    return m;
  };
  const auto up = forward_kinematics(advance(1), cfg), down = forward_kinematics(advance(-1), cfg);
  const auto here = forward_kinematics(s, cfg);
  for (std::size_t leg = 0; leg < kLegs; ++leg) {
    // rigid rotation part: omega x (foot - torso)
    Vec3 r{};
    for (int k = 0; k < 3; ++k) r[k] = here[leg][k] - s.torso_position[k];
    const auto& w = s.angular_velocity;
    const Vec3 wr = {w[1] * r[2] - w[2] * r[1], w[2] * r[0] - w[0] * r[2], w[0] * r[1] - w[1] * r[0]};
    for (int k = 0; k < 3; ++k)
      EXPECT_NEAR(vel[leg][k], (up[leg][k] - down[leg][k]) / (2 * h) + wr[k], 1e-7);
  }
}

TEST(Contact, AboveGroundIsZero) {
  RobotConfig cfg;
  FootArray pos{}, vel{};
  for (auto& p : pos) p = {0.0, 0.0, 0.01};
  for (auto& v : vel) v = {1.0, 0.0, -1.0};
  for (const auto& f : contact_forces(pos, vel, flat(), cfg)) EXPECT_EQ(f, (Vec3{0.0, 0.0, 0.0}));
}

TEST(Contact, PenaltyNormalAtRest) {
  RobotConfig cfg;
  FootArray pos{}, vel{};
  for (auto& p : pos) p = {0.0, 0.0, -0.01};
  for (const auto& f : contact_forces(pos, vel, flat(), cfg)) {
    EXPECT_DOUBLE_EQ(f[2], 50.0);
    EXPECT_EQ(f[0], 0.0);
    EXPECT_EQ(f[1], 0.0);
  }
}

TEST(Contact, NormalNonNegativeAndInsideFrictionCone) {
  RobotConfig cfg;
  const auto rough = make_terrain(TerrainKind::rough, 5, 0.03, 0.05);
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    FootArray pos{}, vel{};
    for (std::size_t leg = 0; leg < kLegs; ++leg) {
      pos[leg] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-0.05, 0.05)};
      vel[leg] = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    }
    for (const auto& f : contact_forces(pos, vel, rough, cfg)) {
      EXPECT_GE(f[2], 0.0);
      EXPECT_LE(std::hypot(f[0], f[1]), cfg.friction * f[2] * (1 + 1e-12));
    }
  }
}

TEST(Contact, FrictionOpposesSlip) {
  RobotConfig cfg;
  FootArray pos{}, vel{};
  pos[0] = {0.0, 0.0, -0.01};
  vel[0] = {0.3, -0.4, 0.0};
  const auto f = contact_forces(pos, vel, flat(), cfg)[0];
  EXPECT_LT(f[0], 0.0);
  EXPECT_GT(f[1], 0.0);
  EXPECT_NEAR(f[0] * 0.4 + f[1] * 0.3, 0.0, 1e-12);
}

TEST(Integrate, FreeFallOneStepSemiImplicit) {
  RobotConfig cfg;
  RobotState s;
  s.torso_position = {0.0, 0.0, 5.0};
  const JointArray zero{};
  const int n = cfg.substeps;
  const double h = cfg.dt / n;
  const auto next = integrate(s, zero, flat(), cfg);
  // velocity first: z_n = z_0 - g h^2 (1 + 2 + ... + n)
  EXPECT_NEAR(next.torso_position[2], 5.0 - cfg.gravity * h * h * n * (n + 1) / 2.0, 1e-14);
  EXPECT_NEAR(next.linear_velocity[2], -cfg.gravity * cfg.dt, 1e-14);

  cfg.substeps = 1;
  const auto single = integrate(s, zero, flat(), cfg);
  EXPECT_NEAR(single.torso_position[2], 5.0 - cfg.gravity * cfg.dt * cfg.dt, 1e-14);
  EXPECT_EQ(single.timestep, 1u);
  EXPECT_EQ(single.previous_joint_angles, s.joint_angles);
}

TEST(Integrate, DeterministicAndJointsClamped) {
  RobotConfig cfg;
  auto [s, obs] = reset(flat(), cfg, 0);
  JointArray torque{};
  torque.fill(5.0);
  const auto a = integrate(s, torque, flat(), cfg);
  EXPECT_EQ(a, integrate(s, torque, flat(), cfg));
  s.torso_position[2] = 3.0;
  s.joint_velocities.fill(1000.0);
  const auto b = integrate(s, torque, flat(), cfg);
  for (const double q : b.joint_angles) EXPECT_LE(q, cfg.joint_limit);
}

TEST(Integrate, NonFiniteStateDiverges) {
  RobotConfig cfg;
  RobotState s;
  s.torso_position = {0.0, 0.0, 1.0};
  s.linear_velocity[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(integrate(s, JointArray{}, flat(), cfg), SimulationDiverged);
}

TEST(Integrate, RestingStanceHoldsHeight) {
  RobotConfig cfg;
  QuadrupedEnv env(flat(), cfg, 1000);
  env.reset(0);
  const double stand = cfg.stand_height();
  const auto action = stance_action(cfg);
  for (int t = 0; t < 1000; ++t) {
    const auto r = env.step(action);
    EXPECT_NEAR(env.state().torso_position[2], stand, 0.05 * stand);
    for (const auto& f : env.state().foot_forces) EXPECT_GE(f[2], 0.0);
    if (t < 999) ASSERT_FALSE(r.done) << "step " << t << " " << r.reason;
    else EXPECT_EQ(r.reason, "timeout");
  }
}

TEST(Reset, FlatPlacementAndReference) {
  RobotConfig cfg;
  const auto [s, obs] = reset(flat(), cfg, 1);
  EXPECT_EQ(s.linear_velocity[0], 0.0);
  EXPECT_EQ(s.torso_orientation, (Vec3{0, 0, 0}));
  EXPECT_DOUBLE_EQ(s.torso_position[2], cfg.stand_height());
  EXPECT_EQ(s.reference_position, s.torso_position);
  EXPECT_EQ(s.previous_joint_angles, s.joint_angles);
  EXPECT_EQ(s.timestep, 0u);
  EXPECT_EQ(reset(flat(), cfg, 1).first, s);
}

TEST(Reset, RoughPlacementFollowsTerrain) {
  RobotConfig cfg;
  const auto rough = make_terrain(TerrainKind::rough, 3, 0.03, 0.05);
  const auto [s, obs] = reset(rough, cfg, 3);
  EXPECT_DOUBLE_EQ(s.torso_position[2], cfg.stand_height() + rough.height(0.0, 0.0));
}

TEST(Reset, JointNoiseIsSeededAndBounded) {
  RobotConfig cfg;
  cfg.reset_joint_noise = 0.05;
  const auto a = reset(flat(), cfg, 4).first;
  EXPECT_EQ(a, reset(flat(), cfg, 4).first);
  EXPECT_NE(a.joint_angles, reset(flat(), cfg, 5).first.joint_angles);
  const auto nominal = cfg.nominal_stance();
  for (std::size_t j = 0; j < kJoints; ++j) EXPECT_LE(std::abs(a.joint_angles[j] - nominal[j]), 0.05);
}

TEST(Reward, HandEvaluations) {
  RobotConfig cfg;
  RobotState s;
  EXPECT_EQ(compute_reward(s, cfg, 1000), 0.0);

  s.linear_velocity[0] = 0.1;
  s.timestep = 100;
  EXPECT_NEAR(compute_reward(s, cfg, 1000), 10.0, 1e-12);

  RobotState d;
  d.torso_position[2] = 0.05;
  d.torso_orientation[0] = 0.1;
  EXPECT_NEAR(compute_reward(d, cfg, 1000), -1.0, 1e-12);

  RobotState j;
  j.joint_angles[3] = 0.2;
  j.previous_joint_angles[3] = -0.2;
  EXPECT_EQ(compute_reward(j, cfg, 1000), 0.0);
}

TEST(Reward, DecompositionOnRandomStates) {
  RobotConfig cfg;
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    RobotState s;
    for (double& v : s.torso_position) v = rng.uniform(-1, 1);
    for (double& v : s.reference_position) v = rng.uniform(-1, 1);
    for (double& v : s.torso_orientation) v = rng.uniform(-1, 1);
    for (double& v : s.linear_velocity) v = rng.uniform(-2, 2);
    for (double& v : s.joint_angles) v = rng.uniform(-1.5, 1.5);
    for (double& v : s.previous_joint_angles) v = rng.uniform(-1.5, 1.5);
    s.timestep = rng.index(1001);
    EXPECT_NEAR(compute_reward(s, cfg, 1000), reward_terms(s, cfg, 1000).sum(), 1e-12);
  }
}

TEST(Observe, LayoutAudit) {
  RobotState s;
  for (int k = 0; k < 3; ++k) {
    s.torso_position[k] = 1 + k;
    s.torso_orientation[k] = 4 + k;
    s.linear_velocity[k] = 7 + k;
    s.angular_velocity[k] = 10 + k;
  }
  for (std::size_t j = 0; j < kJoints; ++j) {
    s.joint_angles[j] = 13 + j;
    s.joint_velocities[j] = 21 + j;
    s.previous_joint_angles[j] = 41 + j;
  }
  for (std::size_t leg = 0; leg < kLegs; ++leg)
    for (int k = 0; k < 3; ++k) s.foot_forces[leg][k] = 29 + 3 * leg + k;
  const auto o = observe(s, Normalizers::identity());
  ASSERT_EQ(o.size(), 48u);
  // with identity normalizers entry i holds the value i + 1
  for (std::size_t i = 0; i < 48; ++i) EXPECT_EQ(o[i], static_cast<double>(i + 1)) << "entry " << i;
}

TEST(Observe, ResetObservationBlocks) {
  RobotConfig cfg;
  const Normalizers n;
  const auto [s, o] = reset(flat(), cfg, 0, n);
  for (std::size_t j = 0; j < kJoints; ++j) {
    EXPECT_DOUBLE_EQ(o[obs_layout::joint_angles + j], cfg.nominal_stance()[j] / n.angle);
    EXPECT_EQ(o[obs_layout::joint_velocities + j], 0.0);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(o[obs_layout::linear_velocity + k], 0.0);
    EXPECT_EQ(o[obs_layout::angular_velocity + k], 0.0);
  }
}

TEST(Observe, NonFiniteThrows) {
  RobotState s;
  s.joint_velocities[2] = std::nan("");
  EXPECT_THROW(observe(s), SimulationDiverged);
}

TEST(Step, ActionClampIsIdempotent) {
  RobotConfig cfg;
  const auto [s, o] = reset(flat(), cfg, 0);
  std::vector<double> wild = {2.0, -3.0, 0.8, -0.71, 0.1, 5.0, -5.0, 0.0};
  std::vector<double> clamped = wild;
  for (double& a : clamped) a = std::clamp(a, -0.7, 0.7);
  const auto a = step(s, wild, flat(), cfg, 1000);
  const auto b = step(s, clamped, flat(), cfg, 1000);
  EXPECT_EQ(a.state, b.state);
  EXPECT_EQ(a.reward, b.reward);
}

TEST(Step, TimeoutThenProtocolError) {
  RobotConfig cfg;
  QuadrupedEnv env(flat(), cfg, 5);
  env.reset(0);
  const auto action = stance_action(cfg);
  EnvStep r;
  for (int t = 0; t < 5; ++t) {
    r = env.step(action);
    EXPECT_EQ(r.done, t == 4);
  }
  EXPECT_EQ(r.reason, "timeout");
  EXPECT_FALSE(r.terminal);
  EXPECT_THROW(env.step(action), ProtocolError);
}

TEST(Step, ScriptedFall) {
  RobotConfig cfg;
  auto [s, o] = reset(flat(), cfg, 0);
  s.torso_position[2] = 0.3 * cfg.stand_height();
  s.joint_angles.fill(std::numbers::pi / 2);
  const auto r = step(s, stance_action(cfg), flat(), cfg, 1000);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.done_reason, DoneReason::fell);
  EXPECT_THROW(step(r.state, stance_action(cfg), flat(), cfg, 1000), ProtocolError);
}

TEST(Step, ScriptedTilt) {
  RobotConfig cfg;
  auto [s, o] = reset(flat(), cfg, 0);
  s.torso_position[2] = 1.0;
  s.torso_orientation[0] = 1.2;
  const auto r = step(s, stance_action(cfg), flat(), cfg, 1000);
  EXPECT_EQ(r.done_reason, DoneReason::tilted);
}

TEST(Step, DoneIffReason) {
  RobotConfig cfg;
  QuadrupedEnv env(make_terrain(TerrainKind::rough, 2, 0.03, 0.05), cfg, 300);
  Rng rng(8);
  for (int ep = 0; ep < 5; ++ep) {
    env.reset(ep);
    std::vector<double> a(8);
    for (int t = 0; t < 300; ++t) {
      for (double& x : a) x = rng.uniform(-1, 1);
      const auto r = env.step(a);
      EXPECT_EQ(r.done, r.reason != "none");
      EXPECT_EQ(r.observation.size(), 48u);
      EXPECT_LE(env.state().timestep, 300u);
      EXPECT_LE(env.last_terms().survival, 25.0);
      EXPECT_NEAR(env.last_terms().sum(), r.reward, 1e-12);
      if (r.done) break;
    }
  }
}

TEST(Step, TrajectoryDeterminism) {
  const auto run = [] {
    RobotConfig cfg;
    QuadrupedEnv env(make_terrain(TerrainKind::rough, 4, 0.03, 0.05), cfg, 200);
    env.reset(4);
    Rng rng(9);
    std::vector<double> rewards;
    std::vector<double> a(8);
    for (int t = 0; t < 200; ++t) {
      for (double& x : a) x = rng.uniform(-0.7, 0.7);
      const auto r = env.step(a);
      rewards.push_back(r.reward);
      if (r.done) break;
    }
    return std::make_pair(rewards, env.state());
  };
  EXPECT_EQ(run(), run());
}

TEST(Environment, FactoryRegeneratesRoughTerrainPerSeed) {
  RobotConfig cfg;
  TerrainSettings ts;
  ts.kind = TerrainKind::rough;
  const auto make = quadruped_factory(cfg, 100, ts);
  auto a = make(1), b = make(1), c = make(2);
  const auto& ta = dynamic_cast<QuadrupedEnv&>(*a).terrain();
  EXPECT_EQ(ta.heights(), dynamic_cast<QuadrupedEnv&>(*b).terrain().heights());
  EXPECT_NE(ta.heights(), dynamic_cast<QuadrupedEnv&>(*c).terrain().heights());

  ts.fixed = std::make_shared<Terrain>(make_terrain(TerrainKind::rough, 77, 0.03, 0.05));
  const auto pinned = quadruped_factory(cfg, 100, ts);
  EXPECT_EQ(dynamic_cast<QuadrupedEnv&>(*pinned(1)).terrain().heights(), ts.fixed->heights());
  EXPECT_EQ(dynamic_cast<QuadrupedEnv&>(*pinned(2)).terrain().heights(), ts.fixed->heights());
}

TEST(RobotConfigCheck, PlatformConstantsAreFixed) {
  RobotConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.mass = 6.0;
  EXPECT_THROW(cfg.validate(), SpecError);
  cfg = RobotConfig{};
  cfg.torque_limit = 4.0;
  EXPECT_THROW(cfg.validate(), SpecError);
  cfg = RobotConfig{};
  cfg.substeps = 0;
  EXPECT_THROW(cfg.validate(), SpecError);
}

TEST(PointMass, OptimalReturnIsConstantFullForce) {
  PointMassConfig cfg;
  PointMassEnv env(cfg);
  env.reset(0);
  double total = 0.0;
  for (std::uint64_t t = 0; t < cfg.horizon; ++t) total += env.step(std::vector<double>{5.0}).reward;
  EXPECT_NEAR(total, point_mass_optimal_return(cfg), 1e-9);
  EXPECT_GT(total, 0.0);

  env.reset(0);
  double other = 0.0;
  for (std::uint64_t t = 0; t < cfg.horizon; ++t)
    other += env.step(std::vector<double>{t % 2 == 0 ? 0.7 : 0.3}).reward;
  EXPECT_LT(other, total);
}

}  // namespace
}  // namespace quadlab::env
