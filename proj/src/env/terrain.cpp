#include "quadlab/env/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "quadlab/errors.hpp"
#include "quadlab/random.hpp"

namespace quadlab::env {

std::string to_string(TerrainKind kind) { return kind == TerrainKind::flat ? "flat" : "rough"; }

TerrainKind terrain_kind_from_string(const std::string& name) {
  if (name == "flat") return TerrainKind::flat;
  if (name == "rough") return TerrainKind::rough;
  throw InputError("unknown terrain kind '" + name + "'");
}

Terrain::Terrain(TerrainKind kind, std::uint64_t seed, double amplitude, double cell_size,
                 std::size_t rows, std::size_t cols, std::vector<double> heights)
    : kind_(kind),
      seed_(seed),
      amplitude_(amplitude),
      cell_size_(cell_size),
      rows_(rows),
      cols_(cols),
      heights_(std::move(heights)) {
  if (!(cell_size_ > 0.0)) throw InputError("terrain cell_size must be positive");
  if (!(amplitude_ >= 0.0)) throw InputError("terrain amplitude must be non-negative");
  if (kind_ == TerrainKind::rough) {
    if (rows_ < 2 || cols_ < 2) throw InputError("rough terrain needs at least a 2x2 grid");
    if (heights_.size() != rows_ * cols_) throw InputError("terrain grid size mismatch");
  }
}

double Terrain::height(double x, double y) const {
  if (kind_ == TerrainKind::flat) return 0.0;
  const double u = x / cell_size_ + 0.5 * static_cast<double>(cols_ - 1);
  const double v = y / cell_size_ + 0.5 * static_cast<double>(rows_ - 1);
  const double uc = std::clamp(u, 0.0, static_cast<double>(cols_ - 1));
  const double vc = std::clamp(v, 0.0, static_cast<double>(rows_ - 1));
  const auto c0 = std::min(static_cast<std::size_t>(uc), cols_ - 2);
  const auto r0 = std::min(static_cast<std::size_t>(vc), rows_ - 2);
  const double fu = uc - static_cast<double>(c0);
  const double fv = vc - static_cast<double>(r0);
  const double h00 = heights_[r0 * cols_ + c0];
  const double h01 = heights_[r0 * cols_ + c0 + 1];
  const double h10 = heights_[(r0 + 1) * cols_ + c0];
  const double h11 = heights_[(r0 + 1) * cols_ + c0 + 1];
  const double low = h00 + fu * (h01 - h00);
  const double high = h10 + fu * (h11 - h10);
  return low + fv * (high - low);
}

Terrain make_terrain(TerrainKind kind, std::uint64_t seed, double amplitude, double cell_size,
                     std::size_t rows, std::size_t cols) {
  if (!(cell_size > 0.0)) throw InputError("terrain cell_size must be positive");
  if (!(amplitude >= 0.0)) throw InputError("terrain amplitude must be non-negative");
  if (kind == TerrainKind::flat) return Terrain(kind, 0, 0.0, cell_size, 0, 0, {});

  Rng rng(derive_seed(seed, {0x7e44a1}));
  std::vector<double> heights(rows * cols);
  for (double& h : heights) h = std::clamp(amplitude * (2.0 * rng.uniform() - 1.0), -amplitude, amplitude);
  return Terrain(kind, seed, amplitude, cell_size, rows, cols, std::move(heights));
}

void save_terrain(const Terrain& terrain, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write terrain file " + path.string());
  out << "kind " << to_string(terrain.kind()) << '\n'
      << "seed " << terrain.seed() << '\n'
      << std::setprecision(17) << "amplitude " << terrain.amplitude() << '\n'
      << "cell_size " << terrain.cell_size() << '\n'
      << "rows " << terrain.rows() << '\n'
      << "cols " << terrain.cols() << '\n';
  for (std::size_t r = 0; r < terrain.rows(); ++r) {
    for (std::size_t c = 0; c < terrain.cols(); ++c) {
      if (c > 0) out << ' ';
      out << terrain.heights()[r * terrain.cols() + c];
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing terrain file " + path.string());
}

namespace {

template <typename T>
T read_field(std::istream& in, const std::string& key) {
  std::string name;
  T value{};
  if (!(in >> name) || name != key || !(in >> value))
    throw LoadError("terrain file: expected '" + key + "' field");
  return value;
}

}  // namespace

Terrain load_terrain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open terrain file " + path.string());
  const auto kind_name = read_field<std::string>(in, "kind");
  TerrainKind kind;
  try {
    kind = terrain_kind_from_string(kind_name);
  } catch (const InputError& e) {
    throw LoadError(std::string("terrain file: ") + e.what());
  }
  const auto seed = read_field<std::uint64_t>(in, "seed");
  const auto amplitude = read_field<double>(in, "amplitude");
  const auto cell_size = read_field<double>(in, "cell_size");
  const auto rows = read_field<std::size_t>(in, "rows");
  const auto cols = read_field<std::size_t>(in, "cols");
  std::vector<double> heights(rows * cols);
  for (double& h : heights)
    if (!(in >> h)) throw LoadError("terrain file: truncated height grid");
  try {
    return Terrain(kind, seed, amplitude, cell_size, rows, cols, std::move(heights));
  } catch (const InputError& e) {
    throw LoadError(std::string("terrain file: ") + e.what());
  }
}

}  // namespace quadlab::env
