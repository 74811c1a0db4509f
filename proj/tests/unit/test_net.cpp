#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "quadlab/errors.hpp"
#include "quadlab/net.hpp"
#include "support.hpp"

namespace quadlab::net {
namespace {

using quadlab::testing::finite_difference;
using quadlab::testing::random_small_spec;
using quadlab::testing::random_vector;
using quadlab::testing::relative_error;

ParamVector scalar_net(double w, double b, Activation act = Activation::linear) {
  NetworkSpec spec{{LayerSpec{1, 1, act, 1.0}}};
  return unflatten(spec, std::vector<double>{w, b});
}

// Plain nested-loop evaluation, written without the library's layout helpers.
std::vector<double> reference_forward(const ParamVector& p, std::vector<double> x) {
  std::size_t offset = 0;
  for (const auto& layer : p.spec.layers) {
    std::vector<double> y(layer.output_size);
    const std::size_t bias_at = offset + layer.input_size * layer.output_size;
    for (std::size_t o = 0; o < layer.output_size; ++o) {
      double z = p.values[bias_at + o];
      for (std::size_t i = 0; i < layer.input_size; ++i)
        z += p.values[offset + o * layer.input_size + i] * x[i];
      switch (layer.activation) {
        case Activation::tanh: y[o] = std::tanh(z); break;
        case Activation::linear: y[o] = z; break;
        case Activation::scaled_tanh: y[o] = layer.bound * std::tanh(z); break;
      }
    }
    offset = bias_at + layer.output_size;
    x = std::move(y);
  }
  return x;
}

TEST(NetInit, BiasesZeroAndWeightsInsideFanInBound) {
  NetworkSpec spec{{LayerSpec{2, 1, Activation::linear, 1.0}}};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = init_network(spec, seed);
    EXPECT_EQ(p.biases(0)[0], 0.0);
    for (const double w : p.weights(0)) EXPECT_LE(std::abs(w), 0.7072);
  }
}

TEST(NetInit, DeterministicPerSeed) {
  const auto spec = make_mlp(4, {8}, 2, Activation::tanh);
  EXPECT_EQ(init_network(spec, 9), init_network(spec, 9));
  EXPECT_NE(init_network(spec, 9).values, init_network(spec, 10).values);
}

TEST(NetInit, ParameterCount) {
  const auto spec = make_mlp(4, {8}, 2, Activation::tanh);
  EXPECT_EQ(spec.parameter_count(), 4u * 8 + 8 + 8 * 2 + 2);
  EXPECT_EQ(init_network(spec, 1).values.size(), 58u);
}

TEST(NetSpec, IncompatibleChainIsRejected) {
  NetworkSpec spec{{LayerSpec{3, 4, Activation::tanh, 1.0}, LayerSpec{5, 1, Activation::linear, 1.0}}};
  EXPECT_THROW(init_network(spec, 0), SpecError);
  EXPECT_THROW(init_network(NetworkSpec{}, 0), SpecError);
  NetworkSpec bad_bound{{LayerSpec{1, 1, Activation::scaled_tanh, 0.0}}};
  EXPECT_THROW(init_network(bad_bound, 0), SpecError);
}

TEST(NetForward, ZeroParamsGiveZeroOutput) {
  const auto p = zeros(make_mlp(3, {5, 4}, 2, Activation::tanh));
  for (const double y : forward(p, std::vector<double>{1.0, -2.0, 3.0})) EXPECT_EQ(y, 0.0);
}

TEST(NetForward, AffineIdentity) {
  EXPECT_EQ(forward(scalar_net(2.0, 1.0), std::vector<double>{3.0})[0], 7.0);
}

TEST(NetForward, MatchesIndependentEvaluation) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_small_spec(rng, 200);
    const auto p = unflatten(spec, random_vector(rng, spec.parameter_count()));
    const auto x = random_vector(rng, spec.input_size(), 2.0);
    const auto got = forward(p, x);
    const auto want = reference_forward(p, x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
  }
}

TEST(NetForward, BatchMatchesSingle) {
  Rng rng(4);
  const auto spec = make_mlp(5, {7, 6}, 3, Activation::scaled_tanh, 0.7);
  const auto p = init_network(spec, 4);
  const std::size_t batch = 9;
  const auto inputs = random_vector(rng, batch * 5, 2.0);
  const auto tape = forward_batch(p, inputs, batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto single = forward(p, std::span<const double>(inputs).subspan(b * 5, 5));
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(tape.output()[b * 3 + k], single[k]);
  }
}

TEST(NetForward, DimensionMismatchThrows) {
  const auto p = init_network(make_mlp(3, {4}, 1, Activation::linear), 0);
  EXPECT_THROW(forward(p, std::vector<double>{1.0, 2.0}), InputError);
}

TEST(NetForward, ScaledTanhOutputStaysInBound) {
  Rng rng(5);
  const auto spec = make_mlp(48, {16}, 8, Activation::scaled_tanh, 0.7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = unflatten(spec, random_vector(rng, spec.parameter_count(), 5.0));
    for (const double a : forward(p, random_vector(rng, 48, 10.0))) {
      EXPECT_LE(a, 0.7);
      EXPECT_GE(a, -0.7);
    }
  }
}

TEST(NetBackward, LinearScalarByHand) {
  const auto g = backward(scalar_net(1.5, -0.5), std::vector<double>{2.0}, std::vector<double>{1.0});
  EXPECT_EQ(g.params, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(g.input, (std::vector<double>{1.5}));
}

TEST(NetBackward, ZeroUpstreamGivesZeroGradients) {
  Rng rng(6);
  const auto spec = make_mlp(6, {16}, 4, Activation::tanh);
  const auto p = init_network(spec, 6);
  const auto g = backward(p, random_vector(rng, 6), std::vector<double>(4, 0.0));
  for (const double v : g.params) EXPECT_EQ(v, 0.0);
  for (const double v : g.input) EXPECT_EQ(v, 0.0);
}

TEST(NetBackward, FiniteDifferenceOracle6x16x4) {
  Rng rng(7);
  const auto spec = make_mlp(6, {16}, 4, Activation::tanh);
  const auto p = init_network(spec, 7);
  const auto x = random_vector(rng, 6);
  const auto upstream = random_vector(rng, 4);
  const auto objective = [&](const ParamVector& q, const std::vector<double>& in) {
    const auto y = forward(q, in);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += upstream[k] * y[k];
    return s;
  };
  const auto g = backward(p, x, upstream);
  const auto fd_params = finite_difference(
      [&](const std::vector<double>& v) { return objective(unflatten(spec, v), x); }, p.values);
  const auto fd_input =
      finite_difference([&](const std::vector<double>& in) { return objective(p, in); }, x);
  double worst = 0.0;
  for (std::size_t k = 0; k < fd_params.size(); ++k)
    worst = std::max(worst, relative_error(g.params[k], fd_params[k]));
  for (std::size_t k = 0; k < fd_input.size(); ++k)
    worst = std::max(worst, relative_error(g.input[k], fd_input[k]));
  EXPECT_LT(worst, 1e-4);
}

TEST(NetBackward, BatchAccumulatesSumOfSingles) {
  Rng rng(8);
  const auto spec = make_mlp(4, {5}, 2, Activation::scaled_tanh, 0.7);
  const auto p = init_network(spec, 8);
  const std::size_t batch = 6;
  const auto inputs = random_vector(rng, batch * 4);
  const auto upstream = random_vector(rng, batch * 2);
  const auto tape = forward_batch(p, inputs, batch);
  std::vector<double> param_grad(spec.parameter_count(), 0.0);
  std::vector<double> input_grad;
  backward_batch(p, tape, upstream, param_grad, &input_grad);

  std::vector<double> expected(spec.parameter_count(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto g = backward(p, std::span<const double>(inputs).subspan(b * 4, 4),
                            std::span<const double>(upstream).subspan(b * 2, 2));
    for (std::size_t k = 0; k < expected.size(); ++k) expected[k] += g.params[k];
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(input_grad[b * 4 + k], g.input[k], 1e-14);
  }
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(param_grad[k], expected[k], 1e-13);
}

TEST(NetAdam, FirstStepIsSignedLearningRate) {
  auto p = unflatten(NetworkSpec{{LayerSpec{1, 2, Activation::linear, 1.0}}},
                     std::vector<double>{0.5, -0.25, 1.0, 2.0});
  const auto before = p.values;
  const std::vector<double> g = {0.3, -2.0, 1e-3, 0.0};
  auto state = AdamState::for_size(4);
  const double lr = 0.01;
  adam_step(p, g, state, lr);
  for (std::size_t k = 0; k < 4; ++k) {
    const double expected = -lr * g[k] / (std::abs(g[k]) + state.epsilon);
    EXPECT_NEAR(p.values[k] - before[k], expected, 1e-15);
  }
  EXPECT_EQ(state.step_count, 1u);
}

TEST(NetAdam, ZeroGradientLeavesParamsAndCountsStep) {
  auto p = init_network(make_mlp(3, {4}, 2, Activation::tanh), 1);
  const auto before = p;
  auto state = AdamState::for_size(p.values.size());
  adam_step(p, std::vector<double>(p.values.size(), 0.0), state, 0.1);
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step_count, 1u);
}

TEST(NetAdam, TwoStepsMatchHandRecurrence) {
  auto p = scalar_net(0.4, -0.1);
  auto state = AdamState::for_size(2);
  const std::vector<double> g = {0.7, -0.2};
  const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  adam_step(p, g, state, lr);
  adam_step(p, g, state, lr);
  for (std::size_t k = 0; k < 2; ++k) {
    double x = k == 0 ? 0.4 : -0.1, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
      m = b1 * m + (1 - b1) * g[k];
      v = b2 * v + (1 - b2) * g[k] * g[k];
      const double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
      x -= lr * mh / (std::sqrt(vh) + eps);
    }
    EXPECT_NEAR(p.values[k], x, 1e-12);
  }
}

TEST(NetAdam, NanGradientRefused) {
  auto p = scalar_net(1.0, 2.0);
  const auto before = p;
  auto state = AdamState::for_size(2);
  EXPECT_THROW(adam_step(p, std::vector<double>{std::nan(""), 0.0}, state, 0.1), NumericalError);
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step_count, 0u);
  EXPECT_EQ(state.first_moment, (std::vector<double>{0.0, 0.0}));
}

TEST(NetPolyak, EndpointsAndFormula) {
  const auto target = scalar_net(1.0, 1.0);
  const auto source = scalar_net(0.0, 0.0);
  EXPECT_EQ(polyak_blend(target, source, 0.0), target);
  EXPECT_EQ(polyak_blend(target, source, 1.0), source);
  EXPECT_NEAR(polyak_blend(target, source, 0.005).values[0], 0.995, 1e-15);
}

TEST(NetPolyak, RepeatedBlendingApproachesSourceMonotonically) {
  Rng rng(9);
  const auto spec = make_mlp(3, {4}, 2, Activation::tanh);
  auto target = unflatten(spec, random_vector(rng, spec.parameter_count()));
  const auto source = unflatten(spec, random_vector(rng, spec.parameter_count()));
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    polyak_blend_inplace(target, source, 0.05);
    double dist = 0.0;
    for (std::size_t k = 0; k < spec.parameter_count(); ++k)
      dist = std::max(dist, std::abs(target.values[k] - source.values[k]));
    EXPECT_LE(dist, previous);
    previous = dist;
  }
}

TEST(NetPolyak, SpecMismatchAndBadTau) {
  const auto a = init_network(make_mlp(3, {4}, 2, Activation::tanh), 0);
  const auto b = init_network(make_mlp(3, {5}, 2, Activation::tanh), 0);
  EXPECT_THROW(polyak_blend(a, b, 0.5), InputError);
  EXPECT_THROW(polyak_blend(a, a, 1.5), InputError);
}

TEST(NetFlatten, RoundTripIsBitExact) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = random_small_spec(rng, 500);
    std::vector<double> v = random_vector(rng, spec.parameter_count(), 1e3);
    v[0] = std::nextafter(v[0], 1e9);
    const auto p = unflatten(spec, v);
    EXPECT_EQ(flatten(p), v);
    EXPECT_EQ(unflatten(spec, flatten(p)), p);
  }
}

TEST(NetFlatten, DocumentedOrderAndLengthCheck) {
  EXPECT_EQ(flatten(scalar_net(2.0, 3.0)), (std::vector<double>{2.0, 3.0}));
  const auto spec = make_mlp(2, {3}, 1, Activation::linear);
  EXPECT_EQ(layer_offset(spec, 1), 2u * 3 + 3);
  EXPECT_THROW(unflatten(spec, std::vector<double>(spec.parameter_count() + 1)), InputError);
}

}  // namespace
}  // namespace quadlab::net
