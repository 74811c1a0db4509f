#include "quadlab/net.hpp"

#include <algorithm>
#include <cmath>

#include "quadlab/errors.hpp"
#include "quadlab/random.hpp"

namespace quadlab::net {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::linear:
      return "linear";
    case Activation::scaled_tanh:
      return "scaled_tanh";
  }
  return "linear";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  if (name == "scaled_tanh") return Activation::scaled_tanh;
  throw SpecError("unknown activation '" + name + "'");
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw SpecError("network needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.input_size == 0 || layer.output_size == 0)
      throw SpecError("layer " + std::to_string(l) + " has a zero dimension");
    if (layer.activation == Activation::scaled_tanh && !(layer.bound > 0.0))
      throw SpecError("scaled_tanh bound must be positive");
    if (l > 0 && layers[l - 1].output_size != layer.input_size)
      throw SpecError("layer " + std::to_string(l) + " input does not match previous output");
  }
}

std::size_t NetworkSpec::input_size() const { return layers.front().input_size; }
std::size_t NetworkSpec::output_size() const { return layers.back().output_size; }

std::size_t NetworkSpec::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.parameter_count();
  return n;
}

NetworkSpec make_mlp(std::size_t input_size, const std::vector<std::size_t>& hidden,
                     std::size_t output_size, Activation output_activation, double output_bound) {
  NetworkSpec spec;
  std::size_t in = input_size;
  for (const auto width : hidden) {
    spec.layers.push_back({in, width, Activation::tanh, 1.0});
    in = width;
  }
  spec.layers.push_back({in, output_size, output_activation, output_bound});
  spec.validate();
  return spec;
}

std::size_t layer_offset(const NetworkSpec& spec, std::size_t layer) {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += spec.layers[l].parameter_count();
  return offset;
}

std::span<const double> ParamVector::weights(std::size_t layer) const {
  const auto& ls = spec.layers[layer];
  return std::span<const double>(values).subspan(layer_offset(spec, layer),
                                                 ls.input_size * ls.output_size);
}

std::span<const double> ParamVector::biases(std::size_t layer) const {
  const auto& ls = spec.layers[layer];
  return std::span<const double>(values).subspan(
      layer_offset(spec, layer) + ls.input_size * ls.output_size, ls.output_size);
}

std::span<double> ParamVector::weights(std::size_t layer) {
  const auto& ls = spec.layers[layer];
  return std::span<double>(values).subspan(layer_offset(spec, layer),
                                           ls.input_size * ls.output_size);
}

std::span<double> ParamVector::biases(std::size_t layer) {
  const auto& ls = spec.layers[layer];
  return std::span<double>(values).subspan(
      layer_offset(spec, layer) + ls.input_size * ls.output_size, ls.output_size);
}

ParamVector zeros(const NetworkSpec& spec) {
  spec.validate();
  return ParamVector{spec, std::vector<double>(spec.parameter_count(), 0.0)};
}

ParamVector init_network(const NetworkSpec& spec, std::uint64_t seed) {
  ParamVector params = zeros(spec);
  Rng rng(seed);
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(spec.layers[l].input_size));
    for (double& w : params.weights(l)) w = rng.uniform(-limit, limit);
  }
  return params;
}

std::vector<double> flatten(const ParamVector& params) { return params.values; }

ParamVector unflatten(const NetworkSpec& spec, std::span<const double> values) {
  spec.validate();
  if (values.size() != spec.parameter_count())
    throw InputError("unflatten: expected " + std::to_string(spec.parameter_count()) +
                     " values, got " + std::to_string(values.size()));
  return ParamVector{spec, std::vector<double>(values.begin(), values.end())};
}

namespace {

void check_params(const ParamVector& params) {
  if (params.values.size() != params.spec.parameter_count())
    throw InputError("parameter vector length does not match its spec");
}

void activate(const LayerSpec& layer, std::span<double> z) {
  switch (layer.activation) {
    case Activation::linear:
      return;
    case Activation::tanh:
      for (double& v : z) v = std::tanh(v);
      return;
    case Activation::scaled_tanh:
      for (double& v : z) v = layer.bound * std::tanh(v);
      return;
  }
}

// dy/dz expressed through the post-activation value y.
double activation_slope(const LayerSpec& layer, double y) {
  switch (layer.activation) {
    case Activation::linear:
      return 1.0;
    case Activation::tanh:
      return 1.0 - y * y;
    case Activation::scaled_tanh: {
      const double t = y / layer.bound;
      return layer.bound * (1.0 - t * t);
    }
  }
  return 1.0;
}

}  // namespace

ForwardTape forward_batch(const ParamVector& params, std::span<const double> inputs,
                          std::size_t batch) {
  check_params(params);
  const auto& spec = params.spec;
  if (batch == 0 || inputs.size() != batch * spec.input_size())
    throw InputError("forward: input size " + std::to_string(inputs.size()) +
                     " does not match batch x " + std::to_string(spec.input_size()));

  ForwardTape tape;
  tape.batch = batch;
  tape.activations.reserve(spec.layers.size() + 1);
  tape.activations.emplace_back(inputs.begin(), inputs.end());

  std::vector<double> transposed;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& layer = spec.layers[l];
    const std::size_t in = layer.input_size;
    const std::size_t out = layer.output_size;
    const auto w = params.weights(l);
    const auto b = params.biases(l);

    // (in x out) copy so the inner loop runs over contiguous outputs
    transposed.resize(in * out);
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t i = 0; i < in; ++i) transposed[i * out + o] = w[o * in + i];

    const auto& x = tape.activations.back();
    std::vector<double> y(batch * out);
    for (std::size_t s = 0; s < batch; ++s) {
      double* z = y.data() + s * out;
      const double* xs = x.data() + s * in;
      std::copy(b.begin(), b.end(), z);
      for (std::size_t i = 0; i < in; ++i) {
        const double xi = xs[i];
        const double* row = transposed.data() + i * out;
        for (std::size_t o = 0; o < out; ++o) z[o] += row[o] * xi;
      }
    }
    activate(layer, y);
    tape.activations.push_back(std::move(y));
  }
  return tape;
}

void backward_batch(const ParamVector& params, const ForwardTape& tape,
                    std::span<const double> output_grad, std::span<double> param_grad,
                    std::vector<double>* input_grad) {
  check_params(params);
  const auto& spec = params.spec;
  const std::size_t batch = tape.batch;
  if (tape.activations.size() != spec.layers.size() + 1)
    throw InputError("backward: tape does not belong to this network");
  if (output_grad.size() != batch * spec.output_size())
    throw InputError("backward: output gradient has wrong size");
  const bool want_params = !param_grad.empty();
  if (want_params && param_grad.size() != spec.parameter_count())
    throw InputError("backward: parameter gradient buffer has wrong size");

  std::vector<double> upstream(output_grad.begin(), output_grad.end());
  std::vector<double> downstream;
  for (std::size_t l = spec.layers.size(); l-- > 0;) {
    const auto& layer = spec.layers[l];
    const std::size_t in = layer.input_size;
    const std::size_t out = layer.output_size;
    const auto& x = tape.activations[l];
    const auto& y = tape.activations[l + 1];
    const auto w = params.weights(l);
    double* dw = want_params ? param_grad.data() + layer_offset(spec, l) : nullptr;
    double* db = want_params ? dw + in * out : nullptr;

    // upstream becomes dL/dz
    for (std::size_t k = 0; k < upstream.size(); ++k)
      upstream[k] *= activation_slope(layer, y[k]);

    const bool need_input = l > 0 || input_grad != nullptr;
    if (need_input) downstream.assign(batch * in, 0.0);

    for (std::size_t s = 0; s < batch; ++s) {
      const double* delta = upstream.data() + s * out;
      const double* xs = x.data() + s * in;
      double* dx = need_input ? downstream.data() + s * in : nullptr;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        if (want_params) {
          db[o] += d;
          double* dw_row = dw + o * in;
          for (std::size_t i = 0; i < in; ++i) dw_row[i] += d * xs[i];
        }
        if (dx != nullptr) {
          const double* w_row = w.data() + o * in;
          for (std::size_t i = 0; i < in; ++i) dx[i] += w_row[i] * d;
        }
      }
    }
    if (need_input) upstream.swap(downstream);
  }
  if (input_grad != nullptr) *input_grad = std::move(upstream);
}

std::vector<double> forward(const ParamVector& params, std::span<const double> input) {
  auto tape = forward_batch(params, input, 1);
  return std::move(tape.activations.back());
}

Gradients backward(const ParamVector& params, std::span<const double> input,
                   std::span<const double> output_grad) {
  const auto tape = forward_batch(params, input, 1);
  Gradients g;
  g.params.assign(params.values.size(), 0.0);
  backward_batch(params, tape, output_grad, g.params, &g.input);
  return g;
}

AdamState AdamState::for_size(std::size_t n) {
  AdamState s;
  s.first_moment.assign(n, 0.0);
  s.second_moment.assign(n, 0.0);
  return s;
}

void adam_step(ParamVector& params, std::span<const double> grads, AdamState& state, double lr) {
  const std::size_t n = params.values.size();
  if (grads.size() != n || state.first_moment.size() != n || state.second_moment.size() != n)
    throw InputError("adam_step: gradient/moment length does not match parameters");
  if (!(state.beta1 > 0.0 && state.beta1 < 1.0 && state.beta2 > 0.0 && state.beta2 < 1.0 &&
        state.epsilon > 0.0))
    throw InputError("adam_step: invalid hyperparameters");
  for (const double g : grads)
    if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient, update refused");

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = grads[k];
    state.first_moment[k] = state.beta1 * state.first_moment[k] + (1.0 - state.beta1) * g;
    state.second_moment[k] = state.beta2 * state.second_moment[k] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.first_moment[k] / correction1;
    const double v_hat = state.second_moment[k] / correction2;
    params.values[k] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

void polyak_blend_inplace(ParamVector& target, const ParamVector& source, double tau) {
  if (!(target.spec == source.spec) || target.values.size() != source.values.size())
    throw InputError("polyak_blend: target and source specs differ");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("polyak_blend: tau must be in [0, 1]");
  if (tau == 0.0) return;
  if (tau == 1.0) {
    target.values = source.values;
    return;
  }
  for (std::size_t k = 0; k < target.values.size(); ++k)
    target.values[k] = (1.0 - tau) * target.values[k] + tau * source.values[k];
}

ParamVector polyak_blend(const ParamVector& target, const ParamVector& source, double tau) {
  ParamVector out = target;
  polyak_blend_inplace(out, source, tau);
  return out;
}

}  // namespace quadlab::net
