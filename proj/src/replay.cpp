#include "quadlab/replay.hpp"

#include <algorithm>
#include <cmath>

#include "quadlab/errors.hpp"
#include "quadlab/random.hpp"

namespace quadlab::replay {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Transition Batch::transition(std::size_t i) const {
  if (i >= size) throw InputError("batch index out of range");
  Transition t;
  t.observation.assign(observations.begin() + i * observation_size,
                       observations.begin() + (i + 1) * observation_size);
  t.action.assign(actions.begin() + i * action_size, actions.begin() + (i + 1) * action_size);
  t.reward = rewards[i];
  t.next_observation.assign(next_observations.begin() + i * observation_size,
                            next_observations.begin() + (i + 1) * observation_size);
  t.done = dones[i] != 0.0;
  return t;
}

void Batch::append(const Transition& t) {
  if (size == 0 && observations.empty()) {
    observation_size = t.observation.size();
    action_size = t.action.size();
  }
  if (t.observation.size() != observation_size || t.next_observation.size() != observation_size ||
      t.action.size() != action_size)
    throw InputError("batch append: shape mismatch");
  observations.insert(observations.end(), t.observation.begin(), t.observation.end());
  actions.insert(actions.end(), t.action.begin(), t.action.end());
  rewards.push_back(t.reward);
  next_observations.insert(next_observations.end(), t.next_observation.begin(),
                           t.next_observation.end());
  dones.push_back(t.done ? 1.0 : 0.0);
  ++size;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t observation_size,
                           std::size_t action_size)
    : capacity_(capacity), observation_size_(observation_size), action_size_(action_size) {
  if (capacity_ == 0) throw InputError("replay capacity must be positive");
  if (observation_size_ == 0 || action_size_ == 0)
    throw InputError("replay observation/action sizes must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.observation.size() != observation_size_ || t.next_observation.size() != observation_size_ ||
      t.action.size() != action_size_)
    throw InputError("replay push: transition shape does not match buffer");
  if (!all_finite(t.observation) || !all_finite(t.next_observation) || !all_finite(t.action) ||
      !std::isfinite(t.reward))
    throw InputError("replay push: transition has a non-finite field");

  const std::size_t i = write_index_;
  if (size_ < capacity_ && i == size_) {
    observations_.insert(observations_.end(), t.observation.begin(), t.observation.end());
    actions_.insert(actions_.end(), t.action.begin(), t.action.end());
    rewards_.push_back(t.reward);
    next_observations_.insert(next_observations_.end(), t.next_observation.begin(),
                              t.next_observation.end());
    dones_.push_back(t.done ? 1 : 0);
  } else {
    std::copy(t.observation.begin(), t.observation.end(),
              observations_.begin() + i * observation_size_);
    std::copy(t.action.begin(), t.action.end(), actions_.begin() + i * action_size_);
    rewards_[i] = t.reward;
    std::copy(t.next_observation.begin(), t.next_observation.end(),
              next_observations_.begin() + i * observation_size_);
    dones_[i] = t.done ? 1 : 0;
  }
  write_index_ = (write_index_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Transition ReplayBuffer::slot(std::size_t p) const {
  Transition t;
  t.observation.assign(observations_.begin() + p * observation_size_,
                       observations_.begin() + (p + 1) * observation_size_);
  t.action.assign(actions_.begin() + p * action_size_, actions_.begin() + (p + 1) * action_size_);
  t.reward = rewards_[p];
  t.next_observation.assign(next_observations_.begin() + p * observation_size_,
                            next_observations_.begin() + (p + 1) * observation_size_);
  t.done = dones_[p] != 0;
  return t;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw InputError("replay index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : write_index_;
  return slot((oldest + i) % capacity_);
}

Batch ReplayBuffer::sample_batch(std::size_t batch_size, std::uint64_t seed) const {
  if (size_ == 0) throw StateError("cannot sample from an empty replay buffer");
  Batch batch;
  batch.size = batch_size;
  batch.observation_size = observation_size_;
  batch.action_size = action_size_;
  batch.observations.resize(batch_size * observation_size_);
  batch.actions.resize(batch_size * action_size_);
  batch.rewards.resize(batch_size);
  batch.next_observations.resize(batch_size * observation_size_);
  batch.dones.resize(batch_size);

  Rng rng(seed);
  for (std::size_t k = 0; k < batch_size; ++k) {
    const std::size_t p = static_cast<std::size_t>(rng.index(size_));
    std::copy_n(observations_.begin() + p * observation_size_, observation_size_,
                batch.observations.begin() + k * observation_size_);
    std::copy_n(actions_.begin() + p * action_size_, action_size_,
                batch.actions.begin() + k * action_size_);
    batch.rewards[k] = rewards_[p];
    std::copy_n(next_observations_.begin() + p * observation_size_, observation_size_,
                batch.next_observations.begin() + k * observation_size_);
    batch.dones[k] = dones_[p] != 0 ? 1.0 : 0.0;
  }
  return batch;
}

}  // namespace quadlab::replay
