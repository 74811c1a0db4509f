#include "quadlab/rl.hpp"

#include <algorithm>
#include <cmath>

#include "quadlab/errors.hpp"
#include "quadlab/random.hpp"

namespace quadlab::rl {

void RlHyperparams::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InputError("rl: gamma must be in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw InputError("rl: tau must be in (0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw InputError("rl: learning rates must be positive");
  if (batch_size == 0) throw InputError("rl: batch_size must be positive");
  if (!(action_bound > 0.0)) throw InputError("rl: action_bound must be positive");
  if (!(exploration_sigma >= 0.0) || !(target_noise_sigma >= 0.0))
    throw InputError("rl: noise scales must be non-negative");
  if (policy_delay == 0) throw InputError("rl: policy_delay must be >= 1");
  if (!(target_noise_clip >= 0.0)) throw InputError("rl: target_noise_clip must be >= 0");
}

net::NetworkSpec actor_spec(std::size_t observation_size, std::size_t action_size,
                            const std::vector<std::size_t>& hidden, double action_bound) {
  return net::make_mlp(observation_size, hidden, action_size, net::Activation::scaled_tanh,
                       action_bound);
}

net::NetworkSpec critic_spec(std::size_t observation_size, std::size_t action_size,
                             const std::vector<std::size_t>& hidden) {
  return net::make_mlp(observation_size + action_size, hidden, 1, net::Activation::linear);
}

std::vector<double> exploration_action(const net::ParamVector& actor,
                                       std::span<const double> observation, double sigma,
                                       double action_bound, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InputError("exploration sigma must be non-negative");
  auto action = net::forward(actor, observation);
  if (sigma > 0.0) {
    Rng rng(seed);
    for (double& a : action) a += sigma * rng.normal();
  }
  for (double& a : action) a = std::clamp(a, -action_bound, action_bound);
  return action;
}

std::vector<double> critic_inputs(std::span<const double> observations,
                                  std::span<const double> actions, std::size_t batch) {
  const std::size_t obs = observations.size() / batch;
  const std::size_t act = actions.size() / batch;
  std::vector<double> out(batch * (obs + act));
  for (std::size_t k = 0; k < batch; ++k) {
    std::copy_n(observations.begin() + k * obs, obs, out.begin() + k * (obs + act));
    std::copy_n(actions.begin() + k * act, act, out.begin() + k * (obs + act) + obs);
  }
  return out;
}

std::vector<double> critic_values(const net::ParamVector& critic,
                                  std::span<const double> observations,
                                  std::span<const double> actions, std::size_t batch) {
  const auto tape = net::forward_batch(critic, critic_inputs(observations, actions, batch), batch);
  const auto out = tape.output();
  return {out.begin(), out.end()};
}

std::vector<double> bellman_targets(const replay::Batch& batch, std::span<const double> q_next,
                                    double gamma) {
  std::vector<double> y(batch.size);
  for (std::size_t k = 0; k < batch.size; ++k)
    y[k] = batch.dones[k] != 0.0 ? batch.rewards[k] : batch.rewards[k] + gamma * q_next[k];
  return y;
}

std::vector<double> ddpg_critic_target(const replay::Batch& batch,
                                       const net::ParamVector& target_actor,
                                       const net::ParamVector& target_critic, double gamma) {
  const auto next_actions = net::forward_batch(target_actor, batch.next_observations, batch.size);
  const auto q_next =
      critic_values(target_critic, batch.next_observations, next_actions.output(), batch.size);
  return bellman_targets(batch, q_next, gamma);
}

std::vector<double> smoothed_target_actions(const replay::Batch& batch,
                                            const net::ParamVector& target_actor,
                                            const RlHyperparams& hp, std::uint64_t seed) {
  const auto tape = net::forward_batch(target_actor, batch.next_observations, batch.size);
  std::vector<double> actions(tape.output().begin(), tape.output().end());
  Rng rng(seed);
  for (double& a : actions) {
    const double noise =
        std::clamp(hp.target_noise_sigma * rng.normal(), -hp.target_noise_clip, hp.target_noise_clip);
    a = std::clamp(a + noise, -hp.action_bound, hp.action_bound);
  }
  return actions;
}

std::vector<double> td3_critic_target(const replay::Batch& batch,
                                      const net::ParamVector& target_actor,
                                      const net::ParamVector& target_critic_1,
                                      const net::ParamVector& target_critic_2,
                                      const RlHyperparams& hp, std::uint64_t seed) {
  const auto next_actions = smoothed_target_actions(batch, target_actor, hp, seed);
  const auto q1 = critic_values(target_critic_1, batch.next_observations, next_actions, batch.size);
  const auto q2 = critic_values(target_critic_2, batch.next_observations, next_actions, batch.size);
  std::vector<double> q_min(batch.size);
  for (std::size_t k = 0; k < batch.size; ++k) q_min[k] = std::min(q1[k], q2[k]);
  return bellman_targets(batch, q_min, hp.gamma);
}

LossGradient critic_loss_gradient(const net::ParamVector& critic, const replay::Batch& batch,
                                  std::span<const double> targets) {
  if (targets.size() != batch.size) throw InputError("critic update: targets/batch size mismatch");
  const auto tape =
      net::forward_batch(critic, critic_inputs(batch.observations, batch.actions, batch.size),
                         batch.size);
  const auto q = tape.output();
  const double n = static_cast<double>(batch.size);
  LossGradient out;
  std::vector<double> dq(batch.size);
  for (std::size_t k = 0; k < batch.size; ++k) {
    const double err = q[k] - targets[k];
    out.value += err * err / n;
    dq[k] = 2.0 * err / n;
  }
  out.grad.assign(critic.values.size(), 0.0);
  net::backward_batch(critic, tape, dq, out.grad, nullptr);
  return out;
}

LossGradient actor_objective_gradient(const net::ParamVector& actor,
                                      const net::ParamVector& critic,
                                      const replay::Batch& batch) {
  const std::size_t n = batch.size;
  const std::size_t obs = batch.observation_size;
  const std::size_t act = actor.spec.output_size();
  const auto actor_tape = net::forward_batch(actor, batch.observations, n);
  const auto critic_tape =
      net::forward_batch(critic, critic_inputs(batch.observations, actor_tape.output(), n), n);

  LossGradient out;
  for (const double q : critic_tape.output()) out.value += q / static_cast<double>(n);

  const std::vector<double> dq(n, 1.0 / static_cast<double>(n));
  std::vector<double> d_input;
  net::backward_batch(critic, critic_tape, dq, {}, &d_input);

  std::vector<double> d_action(n * act);
  for (std::size_t k = 0; k < n; ++k)
    std::copy_n(d_input.begin() + k * (obs + act) + obs, act, d_action.begin() + k * act);

  out.grad.assign(actor.values.size(), 0.0);
  net::backward_batch(actor, actor_tape, d_action, out.grad, nullptr);
  return out;
}

namespace {

void descend(net::ParamVector& params, std::span<const double> grad, net::AdamState& opt,
             double lr, const char* what) {
  try {
    net::adam_step(params, grad, opt, lr);
  } catch (const NumericalError& e) {
    throw TrainingError(std::string(what) + ": " + e.what());
  }
}

void fit_critic(net::ParamVector& critic, net::AdamState& opt, double lr,
                const replay::Batch& batch, std::span<const double> targets) {
  const auto lg = critic_loss_gradient(critic, batch, targets);
  if (!std::isfinite(lg.value)) throw TrainingError("critic loss is not finite");
  descend(critic, lg.grad, opt, lr, "critic update");
}

void ascend_actor(net::ParamVector& actor, const net::ParamVector& critic, net::AdamState& opt,
                  double lr, const replay::Batch& batch) {
  auto lg = actor_objective_gradient(actor, critic, batch);
  for (double& g : lg.grad) g = -g;
  descend(actor, lg.grad, opt, lr, "actor update");
}

}  // namespace

DdpgLearner::DdpgLearner(std::size_t observation_size, std::size_t action_size,
                         const std::vector<std::size_t>& hidden, RlHyperparams hyper,
                         std::uint64_t seed)
    : actor(net::init_network(actor_spec(observation_size, action_size, hidden, hyper.action_bound),
                              derive_seed(seed, {1}))),
      critic(net::init_network(critic_spec(observation_size, action_size, hidden),
                               derive_seed(seed, {2}))),
      target_actor(actor),
      target_critic(critic),
      actor_opt(net::AdamState::for_size(actor.values.size())),
      critic_opt(net::AdamState::for_size(critic.values.size())),
      hp(hyper) {
  hp.validate();
}

void DdpgLearner::update_critic(const replay::Batch& batch, std::span<const double> targets) {
  fit_critic(critic, critic_opt, hp.critic_lr, batch, targets);
}

void DdpgLearner::update_actor(const replay::Batch& batch) {
  ascend_actor(actor, critic, actor_opt, hp.actor_lr, batch);
  ++actor_update_count;
}

void DdpgLearner::load_actor(const net::ParamVector& params) {
  if (!(params.spec == actor.spec)) throw InputError("load_actor: spec mismatch");
  actor = params;
  target_actor = params;
  actor_opt = net::AdamState::for_size(actor.values.size());
}

void DdpgLearner::train_step(const replay::ReplayBuffer& buffer, std::uint64_t seed) {
  const auto batch = buffer.sample_batch(hp.batch_size, derive_seed(seed, {0}));
  const auto targets = ddpg_critic_target(batch, target_actor, target_critic, hp.gamma);
  update_critic(batch, targets);
  update_actor(batch);
  net::polyak_blend_inplace(target_critic, critic, hp.tau);
  net::polyak_blend_inplace(target_actor, actor, hp.tau);
}

std::vector<std::pair<std::string, net::ParamVector>> DdpgLearner::critics() const {
  return {{"critic", critic}};
}

Td3Learner::Td3Learner(std::size_t observation_size, std::size_t action_size,
                       const std::vector<std::size_t>& hidden, RlHyperparams hyper,
                       std::uint64_t seed)
    : actor(net::init_network(actor_spec(observation_size, action_size, hidden, hyper.action_bound),
                              derive_seed(seed, {1}))),
      critic_1(net::init_network(critic_spec(observation_size, action_size, hidden),
                                 derive_seed(seed, {2}))),
      critic_2(net::init_network(critic_spec(observation_size, action_size, hidden),
                                 derive_seed(seed, {3}))),
      target_actor(actor),
      target_critic_1(critic_1),
      target_critic_2(critic_2),
      actor_opt(net::AdamState::for_size(actor.values.size())),
      critic_1_opt(net::AdamState::for_size(critic_1.values.size())),
      critic_2_opt(net::AdamState::for_size(critic_2.values.size())),
      hp(hyper) {
  hp.validate();
}

void Td3Learner::update_critic(const replay::Batch& batch, std::span<const double> targets) {
  fit_critic(critic_1, critic_1_opt, hp.critic_lr, batch, targets);
  fit_critic(critic_2, critic_2_opt, hp.critic_lr, batch, targets);
}

void Td3Learner::update_actor(const replay::Batch& batch) {
  ascend_actor(actor, critic_1, actor_opt, hp.actor_lr, batch);
  ++actor_update_count;
}

void Td3Learner::load_actor(const net::ParamVector& params) {
  if (!(params.spec == actor.spec)) throw InputError("load_actor: spec mismatch");
  actor = params;
  target_actor = params;
  actor_opt = net::AdamState::for_size(actor.values.size());
}

void Td3Learner::train_step(const replay::ReplayBuffer& buffer, std::uint64_t seed) {
  const auto batch = buffer.sample_batch(hp.batch_size, derive_seed(seed, {0}));
  const auto targets = td3_critic_target(batch, target_actor, target_critic_1, target_critic_2,
                                         hp, derive_seed(seed, {1}));
  update_critic(batch, targets);
  ++update_counter;
  if (update_counter % hp.policy_delay == 0) {
    update_actor(batch);
    net::polyak_blend_inplace(target_critic_1, critic_1, hp.tau);
    net::polyak_blend_inplace(target_critic_2, critic_2, hp.tau);
    net::polyak_blend_inplace(target_actor, actor, hp.tau);
  }
}

std::vector<std::pair<std::string, net::ParamVector>> Td3Learner::critics() const {
  return {{"critic_1", critic_1}, {"critic_2", critic_2}};
}

}  // namespace quadlab::rl
