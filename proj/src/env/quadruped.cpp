#include "quadlab/env/quadruped.hpp"

#include <algorithm>
#include <cmath>

#include "quadlab/errors.hpp"
#include "quadlab/random.hpp"

namespace quadlab::env {

namespace {

using Mat3 = std::array<double, 9>;  // row-major

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 mul(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Vec3 mul_transpose(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[3] * v[1] + m[6] * v[2], m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
          m[2] * v[0] + m[5] * v[1] + m[8] * v[2]};
}

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col)
      c[r * 3 + col] = a[r * 3] * b[col] + a[r * 3 + 1] * b[3 + col] + a[r * 3 + 2] * b[6 + col];
  return c;
}

// R = Rz(yaw) Ry(pitch) Rx(roll)
Mat3 rotation_from_euler(const Vec3& rpy) {
  const double cr = std::cos(rpy[0]), sr = std::sin(rpy[0]);
  const double cp = std::cos(rpy[1]), sp = std::sin(rpy[1]);
  const double cy = std::cos(rpy[2]), sy = std::sin(rpy[2]);
  return {cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
          sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
          -sp,     cp * sr,                cp * cr};
}

Vec3 euler_from_rotation(const Mat3& r) {
  const double pitch = std::asin(std::clamp(-r[6], -1.0, 1.0));
  return {std::atan2(r[7], r[8]), pitch, std::atan2(r[3], r[0])};
}

// exp([w]x h) via Rodrigues.
Mat3 rotation_increment(const Vec3& w, double h) {
  const Vec3 phi = scale(w, h);
  const double angle = std::sqrt(phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2]);
  if (angle < 1e-14) return {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const Vec3 k = scale(phi, 1.0 / angle);
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {t * k[0] * k[0] + c,        t * k[0] * k[1] - s * k[2], t * k[0] * k[2] + s * k[1],
          t * k[0] * k[1] + s * k[2], t * k[1] * k[1] + c,        t * k[1] * k[2] - s * k[0],
          t * k[0] * k[2] - s * k[1], t * k[1] * k[2] + s * k[0], t * k[2] * k[2] + c};
}

struct LegGeometry {
  Vec3 foot_body;  // foot relative to torso centre, body frame
  double dx_dhip, dx_dknee, dz_dhip, dz_dknee;
};

LegGeometry leg_geometry(const RobotConfig& config, std::size_t leg, double hip, double knee) {
  const double l1 = config.upper_leg_length;
  const double l2 = config.lower_leg_length;
  const double s1 = std::sin(hip), c1 = std::cos(hip);
  const double s12 = std::sin(hip + knee), c12 = std::cos(hip + knee);
  const Vec3 offset = config.hip_offset(leg);
  LegGeometry g;
  g.foot_body = {offset[0] + l1 * s1 + l2 * s12, offset[1], offset[2] - l1 * c1 - l2 * c12};
  g.dx_dhip = l1 * c1 + l2 * c12;
  g.dx_dknee = l2 * c12;
  g.dz_dhip = l1 * s1 + l2 * s12;
  g.dz_dknee = l2 * s12;
  return g;
}

bool finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

bool finite_state(const RobotState& s) {
  if (!finite(s.torso_position) || !finite(s.torso_orientation) || !finite(s.linear_velocity) ||
      !finite(s.angular_velocity))
    return false;
  for (std::size_t j = 0; j < kJoints; ++j)
    if (!std::isfinite(s.joint_angles[j]) || !std::isfinite(s.joint_velocities[j])) return false;
  for (const auto& f : s.foot_forces)
    if (!finite(f)) return false;
  return true;
}

}  // namespace

void RobotConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw SpecError(std::string("robot config: ") + name + " must be positive");
  };
  positive(body_length, "body_length");
  positive(body_width, "body_width");
  positive(body_height, "body_height");
  positive(mass, "mass");
  positive(torque_limit, "torque_limit");
  positive(upper_leg_length, "upper_leg_length");
  positive(lower_leg_length, "lower_leg_length");
  positive(pd_kp, "pd_kp");
  positive(pd_kd, "pd_kd");
  positive(joint_inertia, "joint_inertia");
  positive(dt, "dt");
  positive(contact_stiffness, "contact_stiffness");
  positive(contact_damping, "contact_damping");
  positive(friction, "friction");
  positive(tangential_damping, "tangential_damping");
  positive(gravity, "gravity");
  positive(action_bound, "action_bound");
  positive(joint_limit, "joint_limit");
  positive(fall_height_fraction, "fall_height_fraction");
  positive(tilt_limit, "tilt_limit");
  if (substeps < 1) throw SpecError("robot config: substeps must be >= 1");
  if (reset_joint_noise < 0.0) throw SpecError("robot config: reset_joint_noise must be >= 0");
  if (mass != 5.0 || body_length != 0.40 || torque_limit != 5.0)
    throw SpecError("robot config: mass 5 kg, body length 0.40 m and torque limit 5 N*m are fixed");
  if (std::abs(nominal_hip) > action_bound || std::abs(nominal_knee) > action_bound)
    throw SpecError("robot config: nominal stance must lie inside the action bound");
}

JointArray RobotConfig::nominal_stance() const {
  JointArray q{};
  for (std::size_t leg = 0; leg < kLegs; ++leg) {
    q[2 * leg] = nominal_hip;
    q[2 * leg + 1] = nominal_knee;
  }
  return q;
}

double RobotConfig::stand_height() const {
  return upper_leg_length * std::cos(nominal_hip) +
         lower_leg_length * std::cos(nominal_hip + nominal_knee);
}

Vec3 RobotConfig::hip_offset(std::size_t leg) const {
  const double x = (leg < 2 ? 0.5 : -0.5) * body_length;
  const double y = (leg % 2 == 0 ? 0.5 : -0.5) * body_width;
  return {x, y, 0.0};
}

std::string to_string(DoneReason reason) {
  switch (reason) {
    case DoneReason::none:
      return "none";
    case DoneReason::fell:
      return "fell";
    case DoneReason::tilted:
      return "tilted";
    case DoneReason::timeout:
      return "timeout";
  }
  return "none";
}

JointArray pd_torque(const JointArray& targets, const JointArray& angles,
                     const JointArray& velocities, const RobotConfig& config) {
  JointArray tau{};
  for (std::size_t j = 0; j < kJoints; ++j) {
    const double target = std::clamp(targets[j], -config.action_bound, config.action_bound);
    const double raw = config.pd_kp * (target - angles[j]) - config.pd_kd * velocities[j];
    tau[j] = std::clamp(raw, -config.torque_limit, config.torque_limit);
  }
  return tau;
}

FootArray forward_kinematics(const RobotState& state, const RobotConfig& config) {
  const Mat3 r = rotation_from_euler(state.torso_orientation);
  FootArray feet{};
  for (std::size_t leg = 0; leg < kLegs; ++leg) {
    const auto g =
        leg_geometry(config, leg, state.joint_angles[2 * leg], state.joint_angles[2 * leg + 1]);
    feet[leg] = add(state.torso_position, mul(r, g.foot_body));
  }
  return feet;
}

FootArray foot_velocities(const RobotState& state, const RobotConfig& config) {
  const Mat3 r = rotation_from_euler(state.torso_orientation);
  FootArray vel{};
  for (std::size_t leg = 0; leg < kLegs; ++leg) {
    const double qd_hip = state.joint_velocities[2 * leg];
    const double qd_knee = state.joint_velocities[2 * leg + 1];
    const auto g =
        leg_geometry(config, leg, state.joint_angles[2 * leg], state.joint_angles[2 * leg + 1]);
    const Vec3 lever = mul(r, g.foot_body);
    const Vec3 joint_rate = {g.dx_dhip * qd_hip + g.dx_dknee * qd_knee, 0.0,
                             g.dz_dhip * qd_hip + g.dz_dknee * qd_knee};
    vel[leg] = add(add(state.linear_velocity, cross(state.angular_velocity, lever)),
                   mul(r, joint_rate));
  }
  return vel;
}

FootArray contact_forces(const FootArray& foot_positions, const FootArray& foot_velocities,
                         const Terrain& terrain, const RobotConfig& config) {
  FootArray forces{};
  for (std::size_t leg = 0; leg < kLegs; ++leg) {
    const Vec3& p = foot_positions[leg];
    const Vec3& v = foot_velocities[leg];
    const double depth = terrain.height(p[0], p[1]) - p[2];
    if (depth <= 0.0) continue;
    const double normal =
        config.contact_stiffness * depth + config.contact_damping * std::max(0.0, -v[2]);
    const double speed = std::hypot(v[0], v[1]);
    double fx = 0.0, fy = 0.0;
    if (speed > 0.0) {
      // viscous near zero slip, Coulomb-saturated beyond
      const double magnitude = std::min(config.tangential_damping * speed, config.friction * normal);
      fx = -magnitude * v[0] / speed;
      fy = -magnitude * v[1] / speed;
    }
    forces[leg] = {fx, fy, normal};
  }
  return forces;
}

RobotState integrate(const RobotState& state, const JointArray& torques, const Terrain& terrain,
                     const RobotConfig& config) {
  RobotState s = state;
  const double h = config.dt / static_cast<double>(config.substeps);
  const double ixx = config.mass / 12.0 *
                     (config.body_width * config.body_width + config.body_height * config.body_height);
  const double iyy = config.mass / 12.0 * (config.body_length * config.body_length +
                                           config.body_height * config.body_height);
  const double izz = config.mass / 12.0 * (config.body_length * config.body_length +
                                           config.body_width * config.body_width);
  const Vec3 inertia = {ixx, iyy, izz};

  for (int iter = 0; iter < config.substeps; ++iter) {
    const Mat3 r = rotation_from_euler(s.torso_orientation);
    const FootArray feet = forward_kinematics(s, config);
    const FootArray foot_vel = foot_velocities(s, config);
    const FootArray forces = contact_forces(feet, foot_vel, terrain, config);

    Vec3 total_force = {0.0, 0.0, -config.mass * config.gravity};
    Vec3 total_torque{};
    for (std::size_t leg = 0; leg < kLegs; ++leg) {
      total_force = add(total_force, forces[leg]);
      total_torque = add(total_torque, cross(sub(feet[leg], s.torso_position), forces[leg]));
    }

    // joints: motor torque plus the reaction of the ground load, J^T F
    for (std::size_t leg = 0; leg < kLegs; ++leg) {
      const auto g =
          leg_geometry(config, leg, s.joint_angles[2 * leg], s.joint_angles[2 * leg + 1]);
      const Vec3 f_body = mul_transpose(r, forces[leg]);
      const double load_hip = g.dx_dhip * f_body[0] + g.dz_dhip * f_body[2];
      const double load_knee = g.dx_dknee * f_body[0] + g.dz_dknee * f_body[2];
      const double loads[2] = {load_hip, load_knee};
      for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t j = 2 * leg + k;
        const double acc = (torques[j] + loads[k]) / config.joint_inertia;
        s.joint_velocities[j] += acc * h;
        s.joint_angles[j] += s.joint_velocities[j] * h;
        if (s.joint_angles[j] > config.joint_limit) {
          s.joint_angles[j] = config.joint_limit;
          s.joint_velocities[j] = std::min(0.0, s.joint_velocities[j]);
        } else if (s.joint_angles[j] < -config.joint_limit) {
          s.joint_angles[j] = -config.joint_limit;
          s.joint_velocities[j] = std::max(0.0, s.joint_velocities[j]);
        }
      }
    }

    // torso translation
    for (int k = 0; k < 3; ++k) {
      s.linear_velocity[k] += total_force[k] / config.mass * h;
      s.torso_position[k] += s.linear_velocity[k] * h;
    }

    // torso rotation, world-frame Euler equation
    const Vec3 w = s.angular_velocity;
    const Vec3 w_body = mul_transpose(r, w);
    const Vec3 momentum = mul(r, {inertia[0] * w_body[0], inertia[1] * w_body[1], inertia[2] * w_body[2]});
    const Vec3 net = sub(total_torque, cross(w, momentum));
    const Vec3 net_body = mul_transpose(r, net);
    const Vec3 alpha =
        mul(r, {net_body[0] / inertia[0], net_body[1] / inertia[1], net_body[2] / inertia[2]});
    s.angular_velocity = add(s.angular_velocity, scale(alpha, h));
    s.torso_orientation =
        euler_from_rotation(matmul(rotation_increment(s.angular_velocity, h), r));
  }

  s.previous_joint_angles = state.joint_angles;
  s.foot_forces = contact_forces(forward_kinematics(s, config), foot_velocities(s, config),
                                 terrain, config);
  s.timestep = state.timestep + 1;
  if (!finite_state(s)) throw SimulationDiverged("simulation produced a non-finite state");
  return s;
}

double compute_reward(const RobotState& state, const RobotConfig& /*config*/,
                      std::uint64_t t_max) {
  double joint_change = 0.0;
  for (std::size_t j = 0; j < kJoints; ++j)
    joint_change += std::abs(std::abs(state.joint_angles[j]) - std::abs(state.previous_joint_angles[j]));
  const double z_dev = state.torso_position[2] - state.reference_position[2];
  const double y_dev = state.torso_position[1] - state.reference_position[1];
  return 75.0 * state.linear_velocity[0] +
         25.0 * static_cast<double>(state.timestep) / static_cast<double>(t_max) -
         10.0 * std::abs(z_dev) - 5.0 * std::abs(y_dev) - 5.0 * std::abs(state.torso_orientation[0]) -
         5.0 * std::abs(state.torso_orientation[1]) - 0.05 * joint_change;
}

RewardTerms reward_terms(const RobotState& state, const RobotConfig& /*config*/,
                         std::uint64_t t_max) {
  RewardTerms t;
  t.forward_velocity = 75.0 * state.linear_velocity[0];
  t.survival = 25.0 * static_cast<double>(state.timestep) / static_cast<double>(t_max);
  t.height_deviation = -10.0 * std::abs(state.torso_position[2] - state.reference_position[2]);
  t.lateral_deviation = -5.0 * std::abs(state.torso_position[1] - state.reference_position[1]);
  t.roll = -5.0 * std::abs(state.torso_orientation[0]);
  t.pitch = -5.0 * std::abs(state.torso_orientation[1]);
  for (std::size_t j = 0; j < kJoints; ++j)
    t.joint_smoothness -=
        0.05 * std::abs(std::abs(state.joint_angles[j]) - std::abs(state.previous_joint_angles[j]));
  return t;
}

Observation observe(const RobotState& state, const Normalizers& n) {
  Observation o{};
  for (std::size_t k = 0; k < 3; ++k) {
    o[obs_layout::position + k] = state.torso_position[k] / n.position;
    o[obs_layout::orientation + k] = state.torso_orientation[k] / n.angle;
    o[obs_layout::linear_velocity + k] = state.linear_velocity[k] / n.velocity;
    o[obs_layout::angular_velocity + k] = state.angular_velocity[k] / n.angular_velocity;
  }
  for (std::size_t j = 0; j < kJoints; ++j) {
    o[obs_layout::joint_angles + j] = state.joint_angles[j] / n.angle;
    o[obs_layout::joint_velocities + j] = state.joint_velocities[j] / n.joint_velocity;
    o[obs_layout::previous_joint_angles + j] = state.previous_joint_angles[j] / n.angle;
  }
  for (std::size_t leg = 0; leg < kLegs; ++leg)
    for (std::size_t k = 0; k < 3; ++k)
      o[obs_layout::foot_forces + 3 * leg + k] = state.foot_forces[leg][k] / n.force;
  for (const double v : o)
    if (!std::isfinite(v)) throw SimulationDiverged("observation has a non-finite entry");
  return o;
}

std::pair<RobotState, Observation> reset(const Terrain& terrain, const RobotConfig& config,
                                         std::uint64_t seed, const Normalizers& normalizers) {
  config.validate();
  RobotState s;
  s.joint_angles = config.nominal_stance();
  if (config.reset_joint_noise > 0.0) {
    Rng rng(derive_seed(seed, {0x5e7}));
    for (double& q : s.joint_angles)
      q = std::clamp(q + rng.uniform(-config.reset_joint_noise, config.reset_joint_noise),
                     -config.action_bound, config.action_bound);
  }
  s.previous_joint_angles = s.joint_angles;
  s.torso_position = {0.0, 0.0, config.stand_height() + terrain.height(0.0, 0.0)};
  s.reference_position = s.torso_position;
  s.foot_forces =
      contact_forces(forward_kinematics(s, config), foot_velocities(s, config), terrain, config);
  return {s, observe(s, normalizers)};
}

double ground_clearance(const RobotState& state, const Terrain& terrain) {
  return state.torso_position[2] - terrain.height(state.torso_position[0], state.torso_position[1]);
}

StepResult step(const RobotState& state, std::span<const double> action, const Terrain& terrain,
                const RobotConfig& config, std::uint64_t t_max, const Normalizers& normalizers) {
  if (state.done_reason != DoneReason::none)
    throw ProtocolError("step called on a finished episode (" + to_string(state.done_reason) + ")");
  if (state.timestep >= t_max) throw ProtocolError("step called at T_max");
  if (action.size() != kActionSize)
    throw InputError("action must have " + std::to_string(kActionSize) + " entries");

  JointArray targets{};
  for (std::size_t j = 0; j < kJoints; ++j) {
    if (std::isnan(action[j])) throw InputError("action contains NaN");
    targets[j] = std::clamp(action[j], -config.action_bound, config.action_bound);
  }
  const JointArray torques =
      pd_torque(targets, state.joint_angles, state.joint_velocities, config);

  StepResult result;
  result.state = integrate(state, torques, terrain, config);
  result.reward = compute_reward(result.state, config, t_max);

  auto& next = result.state;
  if (ground_clearance(next, terrain) < config.fall_height_fraction * config.stand_height())
    next.done_reason = DoneReason::fell;
  else if (std::abs(next.torso_orientation[0]) > config.tilt_limit ||
           std::abs(next.torso_orientation[1]) > config.tilt_limit)
    next.done_reason = DoneReason::tilted;
  else if (next.timestep >= t_max)
    next.done_reason = DoneReason::timeout;
  result.done = next.done_reason != DoneReason::none;
  result.done_reason = next.done_reason;
  result.observation = observe(next, normalizers);
  return result;
}

}  // namespace quadlab::env
