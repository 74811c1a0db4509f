#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace quadlab::net {

enum class Activation { tanh, linear, scaled_tanh };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  Activation activation = Activation::linear;
  // Output scale for scaled_tanh; ignored otherwise.
  double bound = 1.0;

  std::size_t parameter_count() const { return input_size * output_size + output_size; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;

  // Throws SpecError on an empty or dimension-incompatible chain.
  void validate() const;

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::size_t parameter_count() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// Convenience: input -> hidden... (tanh) -> output with the given activation.
NetworkSpec make_mlp(std::size_t input_size, const std::vector<std::size_t>& hidden,
                     std::size_t output_size, Activation output_activation,
                     double output_bound = 1.0);

// Flat parameter storage. Layout is layer-major; within a layer the weight
// matrix (output_size x input_size) is stored row-major, followed by the
// output_size biases. Forward computes z = W x + b.
struct ParamVector {
  NetworkSpec spec;
  std::vector<double> values;

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> biases(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// Offset of a layer's first weight inside the flat vector.
std::size_t layer_offset(const NetworkSpec& spec, std::size_t layer);

// Weights ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
ParamVector init_network(const NetworkSpec& spec, std::uint64_t seed);

ParamVector zeros(const NetworkSpec& spec);

std::vector<double> flatten(const ParamVector& params);
ParamVector unflatten(const NetworkSpec& spec, std::span<const double> values);

std::vector<double> forward(const ParamVector& params, std::span<const double> input);

struct Gradients {
  std::vector<double> params;  // same layout as ParamVector::values
  std::vector<double> input;
};

// Exact reverse-mode gradient of <output_grad, forward(params, input)>.
Gradients backward(const ParamVector& params, std::span<const double> input,
                   std::span<const double> output_grad);

// Cached activations for a minibatch forward pass. Row-major, one row per
// sample. activations[0] is the input; activations[l + 1] is layer l's
// post-activation output.
struct ForwardTape {
  std::size_t batch = 0;
  std::vector<std::vector<double>> activations;

  std::span<const double> output() const { return activations.back(); }
};

ForwardTape forward_batch(const ParamVector& params, std::span<const double> inputs,
                          std::size_t batch);

// Accumulates (+=) parameter gradients into param_grad; an empty span skips
// them. If input_grad is non-null it is overwritten with the gradient w.r.t.
// the batch inputs.
void backward_batch(const ParamVector& params, const ForwardTape& tape,
                    std::span<const double> output_grad, std::span<double> param_grad,
                    std::vector<double>* input_grad);

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_size(std::size_t n);
};

// Bias-corrected Adam descent step, in place. Throws NumericalError (and
// leaves params/state untouched) if any gradient is non-finite.
void adam_step(ParamVector& params, std::span<const double> grads, AdamState& state, double lr);

// target' = (1 - tau) * target + tau * source
ParamVector polyak_blend(const ParamVector& target, const ParamVector& source, double tau);
void polyak_blend_inplace(ParamVector& target, const ParamVector& source, double tau);

}  // namespace quadlab::net
