#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace quadlab::env {

enum class TerrainKind { flat, rough };

std::string to_string(TerrainKind kind);
TerrainKind terrain_kind_from_string(const std::string& name);

// Heightfield ground. Rough terrain is a grid of node heights centred on the
// world origin: node (r, c) sits at
//   x = (c - (cols - 1) / 2) * cell_size,  y = (r - (rows - 1) / 2) * cell_size
// and heights are bilinearly interpolated between nodes. Queries outside the
// grid are clamped to the border.
class Terrain {
 public:
  static constexpr std::size_t kDefaultRows = 201;  // y in [-5, 5] m at 0.05 m
  static constexpr std::size_t kDefaultCols = 801;  // x in [-20, 20] m at 0.05 m

  Terrain() = default;
  Terrain(TerrainKind kind, std::uint64_t seed, double amplitude, double cell_size,
          std::size_t rows, std::size_t cols, std::vector<double> heights);

  TerrainKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  double amplitude() const { return amplitude_; }
  double cell_size() const { return cell_size_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& heights() const { return heights_; }

  double height(double x, double y) const;

 private:
  TerrainKind kind_ = TerrainKind::flat;
  std::uint64_t seed_ = 0;
  double amplitude_ = 0.0;
  double cell_size_ = 0.05;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> heights_;
};

// Flat ignores seed and amplitude. Rough draws every node uniformly in
// [-amplitude, amplitude] from the seeded stream (lattice value noise).
Terrain make_terrain(TerrainKind kind, std::uint64_t seed, double amplitude, double cell_size,
                     std::size_t rows = Terrain::kDefaultRows,
                     std::size_t cols = Terrain::kDefaultCols);

// Plain-text grid:
//   kind <flat|rough>
//   seed <n>
//   amplitude <m>
//   cell_size <m>
//   rows <n>
//   cols <n>
// followed by rows*cols heights, row-major, whitespace separated.
void save_terrain(const Terrain& terrain, const std::filesystem::path& path);
Terrain load_terrain(const std::filesystem::path& path);

}  // namespace quadlab::env
