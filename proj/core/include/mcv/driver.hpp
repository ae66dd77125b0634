#pragma once

// The sequential level loop.
//
// Starting from the singleton partition, every level visits the pixels in a
// fixed permutation. A pixel whose (x + W0) ∩ X window carries two or more
// labels is a boundary pixel; the image in (x + W_i) ∩ X is then tested for
// homogeneity and, when accepted, the partition is merged at x with window Psi_i.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcv/geometry.hpp"
#include "mcv/imageio.hpp"
#include "mcv/mrf.hpp"
#include "mcv/partition.hpp"
#include "mcv/pyramid.hpp"

namespace mcv {

enum class PermutationKind { raster, random, file };
enum class EvalMode { direct, pyramid };

struct McvConfig {
  int max_level = 9;
  PermutationKind permutation = PermutationKind::random;
  std::uint64_t seed = 0;
  /// Used when permutation == file: row-major 0-based pixel indices.
  std::vector<std::uint32_t> permutation_indices;
  bool reshuffle_per_level = false;

  Window w0 = nine_neighborhood();
  /// Homogeneity model. Its neighbourhood is also the structuring element that
  /// generates the evaluation windows W_i = dilate(g, i).
  MrfModel model = MrfModel::uniform(nine_neighborhood(), Metric::euclidean, 1.0, 100.0);
  /// When set, ρ is replaced before the run by a Metropolis estimate of the mean
  /// per-pixel energy on W_1 over the image's value grid.
  bool rho_auto = false;
  std::size_t calibration_samples = 2000;

  EvalMode eval_mode = EvalMode::direct;
  unsigned workers = 1;

  /// Optional overrides: square evaluation windows of these radii / square merge
  /// windows of these radii, one entry per level.
  std::vector<int> eval_radii;
  std::vector<int> merge_radii;
};

struct LevelStats {
  int level = 0;
  std::size_t evaluations = 0;
  std::size_t accepted = 0;
  std::size_t regions = 0;
};

struct PartitionSequence {
  /// levels[0] is the singleton partition; levels[i] the canonical partition after level i.
  std::vector<LabelImage> levels;
  std::vector<LevelStats> stats;
  McvConfig config;
};

/// Raster: row-major. Random: Fisher-Yates over the raster order driven by Rng(seed).
std::vector<Pixel> make_permutation(PermutationKind kind, const Lattice& lat, std::uint64_t seed);

/// One 0-based row-major pixel index per line; blank lines are ignored.
std::vector<std::uint32_t> parse_permutation_file(std::string_view text);
/// Validates that `indices` is a permutation of the lattice (ConfigError otherwise).
std::vector<Pixel> permutation_from_indices(std::span<const std::uint32_t> indices,
                                            const Lattice& lat);

class Segmenter {
 public:
  /// Validates the configuration; throws ConfigError.
  explicit Segmenter(McvConfig config);

  const McvConfig& config() const noexcept { return config_; }
  const Window& eval_window(int level) const;
  const Window& merge_window(int level) const;

  /// One pass over `order` at `level`, mutating `p` in place.
  LevelStats run_level(Partition& p, const ImageBuffer& image, int level,
                       std::span<const Pixel> order) const;

  PartitionSequence run(const ImageBuffer& image) const;

 private:
  bool accept(const ImageBuffer& image, Pixel x, int level) const;

  McvConfig config_;
  std::vector<Window> eval_windows_;
  std::vector<Window> merge_windows_;
  std::optional<PyramidEvaluator> pyramid_;
};

PartitionSequence run_mcv(const ImageBuffer& image, const McvConfig& config);

/// Merge passes touching at least this many pixels are split across workers.
inline constexpr std::size_t kParallelMergeMinPixels = 1 << 14;

}  // namespace mcv
