#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include "quadlab/env/terrain.hpp"

namespace quadlab::env {

inline constexpr std::size_t kLegs = 4;
inline constexpr std::size_t kJoints = 8;
inline constexpr std::size_t kObservationSize = 48;
inline constexpr std::size_t kActionSize = kJoints;

using Vec3 = std::array<double, 3>;
using JointArray = std::array<double, kJoints>;
using FootArray = std::array<Vec3, kLegs>;

// Legs are ordered front-left, front-right, hind-left, hind-right. Joint
// 2k is leg k's hip pitch, joint 2k+1 its knee pitch. Each leg is a planar
// two-link chain in the torso's x-z plane; positive hip pitch swings the foot
// forward (+x).
struct RobotConfig {
  double body_length = 0.40;  // m
  double body_width = 0.20;   // m
  double body_height = 0.05;  // m, only used for the torso inertia
  double mass = 5.0;          // kg
  double torque_limit = 5.0;  // N*m per joint
  double upper_leg_length = 0.12;
  double lower_leg_length = 0.12;
  double pd_kp = 40.0;  // N*m/rad
  double pd_kd = 1.0;   // N*m*s/rad
  double joint_inertia = 0.02;  // kg*m^2 reflected at each joint
  double dt = 0.01;             // s per control step
  int substeps = 4;
  double contact_stiffness = 5000.0;  // N/m
  double contact_damping = 50.0;      // N*s/m
  double friction = 0.8;
  double tangential_damping = 100.0;  // N*s/m, slope of the regularised friction law
  double gravity = 9.81;
  double action_bound = 0.7;  // rad
  double joint_limit = std::numbers::pi / 2.0;
  double nominal_hip = 0.3;
  double nominal_knee = -0.6;
  double fall_height_fraction = 0.4;
  double tilt_limit = 1.0;  // rad
  double reset_joint_noise = 0.0;  // rad, uniform perturbation of the stance at reset

  // Throws SpecError when a field is out of range or a fixed platform value
  // (mass, body length, torque limit) has been changed.
  void validate() const;

  JointArray nominal_stance() const;

  // Torso height above the ground when the legs are at the nominal stance and
  // the feet just touch the ground.
  double stand_height() const;

  Vec3 hip_offset(std::size_t leg) const;
};

enum class DoneReason { none, fell, tilted, timeout };

std::string to_string(DoneReason reason);

struct RobotState {
  Vec3 torso_position{};     // world, m
  Vec3 torso_orientation{};  // roll, pitch, yaw (ZYX Euler), rad
  Vec3 linear_velocity{};    // world, m/s
  Vec3 angular_velocity{};   // world, rad/s
  JointArray joint_angles{};
  JointArray joint_velocities{};
  JointArray previous_joint_angles{};
  FootArray foot_forces{};  // world-frame ground reaction per foot, N
  std::uint64_t timestep = 0;
  Vec3 reference_position{};  // torso position at reset
  DoneReason done_reason = DoneReason::none;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

using Observation = std::array<double, kObservationSize>;

// Observation layout (0-based, inclusive):
//   0-2   torso position          / position
//   3-5   roll, pitch, yaw        / angle
//   6-8   linear velocity         / velocity
//   9-11  angular velocity        / angular_velocity
//   12-19 joint angles            / angle
//   20-27 joint velocities        / joint_velocity
//   28-39 foot forces (x,y,z)x4   / force
//   40-47 previous joint angles   / angle
namespace obs_layout {
inline constexpr std::size_t position = 0;
inline constexpr std::size_t orientation = 3;
inline constexpr std::size_t linear_velocity = 6;
inline constexpr std::size_t angular_velocity = 9;
inline constexpr std::size_t joint_angles = 12;
inline constexpr std::size_t joint_velocities = 20;
inline constexpr std::size_t foot_forces = 28;
inline constexpr std::size_t previous_joint_angles = 40;
}  // namespace obs_layout

struct Normalizers {
  double position = 1.0;
  double velocity = 2.0;
  double angle = std::numbers::pi / 2.0;
  double angular_velocity = 2.0;
  double joint_velocity = 10.0;
  double force = 100.0;

  static Normalizers identity() { return {1.0, 1.0, 1.0, 1.0, 1.0, 1.0}; }
};

struct StepResult {
  RobotState state;
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  DoneReason done_reason = DoneReason::none;
};

// The seven additive terms of the per-step reward, logged separately.
struct RewardTerms {
  double forward_velocity = 0.0;  //  75 v_x
  double survival = 0.0;          //  25 T_s / T_max
  double height_deviation = 0.0;  // -10 |z - z_ref|
  double lateral_deviation = 0.0; //  -5 |y - y_ref|
  double roll = 0.0;              //  -5 |roll|
  double pitch = 0.0;             //  -5 |pitch|
  double joint_smoothness = 0.0;  // -0.05 sum_i ||p_t,i| - |p_t-1,i||

  double sum() const {
    return forward_velocity + survival + height_deviation + lateral_deviation + roll + pitch +
           joint_smoothness;
  }
};

JointArray pd_torque(const JointArray& targets, const JointArray& angles,
                     const JointArray& velocities, const RobotConfig& config);

// World-frame foot positions.
FootArray forward_kinematics(const RobotState& state, const RobotConfig& config);

// World-frame foot velocities.
FootArray foot_velocities(const RobotState& state, const RobotConfig& config);

// Penalty contact with a vertical normal: normal = k d + c max(0, -v_z) for
// penetration d > 0; tangential force opposes horizontal foot velocity and is
// capped at friction * normal.
FootArray contact_forces(const FootArray& foot_positions, const FootArray& foot_velocities,
                         const Terrain& terrain, const RobotConfig& config);

// Advances one control step with torques held constant across substeps.
RobotState integrate(const RobotState& state, const JointArray& torques, const Terrain& terrain,
                     const RobotConfig& config);

double compute_reward(const RobotState& state, const RobotConfig& config, std::uint64_t t_max);
RewardTerms reward_terms(const RobotState& state, const RobotConfig& config, std::uint64_t t_max);

Observation observe(const RobotState& state, const Normalizers& normalizers = {});

std::pair<RobotState, Observation> reset(const Terrain& terrain, const RobotConfig& config,
                                         std::uint64_t seed,
                                         const Normalizers& normalizers = {});

StepResult step(const RobotState& state, std::span<const double> action, const Terrain& terrain,
                const RobotConfig& config, std::uint64_t t_max,
                const Normalizers& normalizers = {});

// Torso height above the terrain directly below it.
double ground_clearance(const RobotState& state, const Terrain& terrain);

}  // namespace quadlab::env
