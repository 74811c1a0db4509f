#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quadlab/net.hpp"
#include "quadlab/replay.hpp"

namespace quadlab::rl {

struct RlHyperparams {
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  std::size_t batch_size = 128;
  double action_bound = 0.7;
  double exploration_sigma = 0.07;   // 0.1 * bound
  std::size_t policy_delay = 2;
  double target_noise_sigma = 0.14;  // 0.2 * bound
  double target_noise_clip = 0.35;   // 0.5 * bound

  void validate() const;
};

// observation -> hidden (tanh) -> action (bound * tanh)
net::NetworkSpec actor_spec(std::size_t observation_size, std::size_t action_size,
                            const std::vector<std::size_t>& hidden, double action_bound);
// [observation, action] -> hidden (tanh) -> Q (linear)
net::NetworkSpec critic_spec(std::size_t observation_size, std::size_t action_size,
                             const std::vector<std::size_t>& hidden);

// clamp(pi(s) + eps, -bound, bound), eps ~ N(0, sigma^2) per coordinate.
std::vector<double> exploration_action(const net::ParamVector& actor,
                                       std::span<const double> observation, double sigma,
                                       double action_bound, std::uint64_t seed);

// Row-wise [observation | action] concatenation for the critic input.
std::vector<double> critic_inputs(std::span<const double> observations,
                                  std::span<const double> actions, std::size_t batch);

// Q(s, a) for every batch row.
std::vector<double> critic_values(const net::ParamVector& critic,
                                  std::span<const double> observations,
                                  std::span<const double> actions, std::size_t batch);

// y = r + gamma * (1 - done) * q_next
std::vector<double> bellman_targets(const replay::Batch& batch, std::span<const double> q_next,
                                    double gamma);

// y = r + gamma (1 - done) Q'(s', pi'(s'))
std::vector<double> ddpg_critic_target(const replay::Batch& batch,
                                       const net::ParamVector& target_actor,
                                       const net::ParamVector& target_critic, double gamma);

// a' = clamp(pi'(s') + clamp(eps, -c, c), -bound, bound), eps ~ N(0, sigma^2)
std::vector<double> smoothed_target_actions(const replay::Batch& batch,
                                            const net::ParamVector& target_actor,
                                            const RlHyperparams& hp, std::uint64_t seed);

// y = r + gamma (1 - done) min(Q1'(s', a'), Q2'(s', a')) with a' as above.
std::vector<double> td3_critic_target(const replay::Batch& batch,
                                      const net::ParamVector& target_actor,
                                      const net::ParamVector& target_critic_1,
                                      const net::ParamVector& target_critic_2,
                                      const RlHyperparams& hp, std::uint64_t seed);

struct LossGradient {
  double value = 0.0;
  std::vector<double> grad;
};

// Mean squared error between Q(s, a) and targets, and its parameter gradient.
LossGradient critic_loss_gradient(const net::ParamVector& critic, const replay::Batch& batch,
                                  std::span<const double> targets);

// Mean of Q(s, pi(s)) over the batch and its gradient w.r.t. the actor
// parameters, chained through the critic's action inputs.
LossGradient actor_objective_gradient(const net::ParamVector& actor,
                                      const net::ParamVector& critic,
                                      const replay::Batch& batch);

// Common surface used by the CEM-RL coupling and the harness.
class ActorCriticLearner {
 public:
  virtual ~ActorCriticLearner() = default;

  virtual std::string algorithm() const = 0;
  virtual const net::ParamVector& policy() const = 0;
  // Replaces actor and target actor and restarts the actor optimizer; the
  // critics are left as they are.
  virtual void load_actor(const net::ParamVector& actor) = 0;
  virtual void train_step(const replay::ReplayBuffer& buffer, std::uint64_t seed) = 0;
  virtual std::uint64_t actor_updates() const = 0;
  // Online critics, in a fixed order, for checkpointing.
  virtual std::vector<std::pair<std::string, net::ParamVector>> critics() const = 0;
  virtual const RlHyperparams& hyperparams() const = 0;
};

struct DdpgLearner final : ActorCriticLearner {
  DdpgLearner(std::size_t observation_size, std::size_t action_size,
              const std::vector<std::size_t>& hidden, RlHyperparams hp, std::uint64_t seed);

  net::ParamVector actor, critic, target_actor, target_critic;
  net::AdamState actor_opt, critic_opt;
  RlHyperparams hp;
  std::uint64_t actor_update_count = 0;

  void update_critic(const replay::Batch& batch, std::span<const double> targets);
  void update_actor(const replay::Batch& batch);

  std::string algorithm() const override { return "ddpg"; }
  const net::ParamVector& policy() const override { return actor; }
  void load_actor(const net::ParamVector& params) override;
  void train_step(const replay::ReplayBuffer& buffer, std::uint64_t seed) override;
  std::uint64_t actor_updates() const override { return actor_update_count; }
  std::vector<std::pair<std::string, net::ParamVector>> critics() const override;
  const RlHyperparams& hyperparams() const override { return hp; }
};

struct Td3Learner final : ActorCriticLearner {
  Td3Learner(std::size_t observation_size, std::size_t action_size,
             const std::vector<std::size_t>& hidden, RlHyperparams hp, std::uint64_t seed);

  net::ParamVector actor, critic_1, critic_2, target_actor, target_critic_1, target_critic_2;
  net::AdamState actor_opt, critic_1_opt, critic_2_opt;
  RlHyperparams hp;
  std::uint64_t update_counter = 0;
  std::uint64_t actor_update_count = 0;

  // Both critics regress onto the same targets.
  void update_critic(const replay::Batch& batch, std::span<const double> targets);
  // Ascends Q1 only.
  void update_actor(const replay::Batch& batch);

  std::string algorithm() const override { return "td3"; }
  const net::ParamVector& policy() const override { return actor; }
  void load_actor(const net::ParamVector& params) override;
  void train_step(const replay::ReplayBuffer& buffer, std::uint64_t seed) override;
  std::uint64_t actor_updates() const override { return actor_update_count; }
  std::vector<std::pair<std::string, net::ParamVector>> critics() const override;
  const RlHyperparams& hyperparams() const override { return hp; }
};

}  // namespace quadlab::rl
