#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "quadlab/net.hpp"
#include "quadlab/random.hpp"

namespace quadlab::testing {

// |a - b| relative to |a| + |b|, ignoring differences below abs_tol.
inline double relative_error(double a, double b, double abs_tol = 1e-9) {
  const double num = std::max(0.0, std::abs(a - b) - abs_tol);
  return num / (std::abs(a) + std::abs(b) + abs_tol);
}

// Random MLP with at most max_params parameters, random depth and activations.
inline net::NetworkSpec random_small_spec(Rng& rng, std::size_t max_params) {
  for (;;) {
    net::NetworkSpec spec;
    std::size_t in = 1 + rng.index(5);
    const std::size_t depth = 1 + rng.index(3);
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t out = 1 + rng.index(5);
      net::LayerSpec layer{in, out, net::Activation::tanh, 1.0};
      const auto pick = rng.index(3);
      layer.activation = pick == 0   ? net::Activation::tanh
                         : pick == 1 ? net::Activation::linear
                                     : net::Activation::scaled_tanh;
      layer.bound = 0.3 + rng.uniform();
      spec.layers.push_back(layer);
      in = out;
    }
    if (spec.parameter_count() <= max_params) return spec;
  }
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

// Central differences of a scalar function of a vector.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double keep = x[k];
    x[k] = keep + h;
    const double up = f(x);
    x[k] = keep - h;
    const double down = f(x);
    x[k] = keep;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("quadlab_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace quadlab::testing
