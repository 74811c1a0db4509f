#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace quadlab::replay {

struct Transition {
  std::vector<double> observation;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_observation;
  // 1 when the episode ended in a failure state; time-limit truncation is
  // stored as 0 so the critic still bootstraps through it.
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Minibatch in structure-of-arrays form, row-major per sample.
struct Batch {
  std::size_t size = 0;
  std::size_t observation_size = 0;
  std::size_t action_size = 0;
  std::vector<double> observations;
  std::vector<double> actions;
  std::vector<double> rewards;
  std::vector<double> next_observations;
  std::vector<double> dones;  // 0.0 or 1.0

  Transition transition(std::size_t i) const;
  void append(const Transition& t);
};

// Fixed-capacity FIFO ring. Storage grows with the number of live entries,
// so large capacities cost nothing until they are filled.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t observation_size, std::size_t action_size);

  // Throws InputError on a shape mismatch or a non-finite field.
  void push(const Transition& t);

  // batch_size uniform draws with replacement. Throws StateError when empty.
  Batch sample_batch(std::size_t batch_size, std::uint64_t seed) const;

  Transition at(std::size_t i) const;  // i-th oldest live entry

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t write_index() const { return write_index_; }
  std::size_t observation_size() const { return observation_size_; }
  std::size_t action_size() const { return action_size_; }
  bool empty() const { return size_ == 0; }

 private:
  Transition slot(std::size_t physical) const;

  std::size_t capacity_;
  std::size_t observation_size_;
  std::size_t action_size_;
  std::size_t write_index_ = 0;
  std::size_t size_ = 0;
  std::vector<double> observations_;
  std::vector<double> actions_;
  std::vector<double> rewards_;
  std::vector<double> next_observations_;
  std::vector<unsigned char> dones_;
};

}  // namespace quadlab::replay
