#include "mcv/driver.hpp"

#include <algorithm>
#include <string>

#include "mcv/random.hpp"

namespace mcv {

std::vector<Pixel> make_permutation(PermutationKind kind, const Lattice& lat, std::uint64_t seed) {
  if (kind == PermutationKind::file)
    throw DomainError("file permutations are built with permutation_from_indices");
  std::vector<Pixel> order(lat.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = lat.pixel(i);
  if (kind == PermutationKind::random) {
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

std::vector<std::uint32_t> parse_permutation_file(std::string_view text) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::size_t a = pos;
    std::size_t b = eol;
    while (a < b && (text[a] == ' ' || text[a] == '\t' || text[a] == '\r')) ++a;
    while (b > a && (text[b - 1] == ' ' || text[b - 1] == '\t' || text[b - 1] == '\r')) --b;
    if (a < b) {
      std::uint64_t v = 0;
      for (std::size_t k = a; k < b; ++k) {
        if (text[k] < '0' || text[k] > '9')
          throw ParseError("permutation: expected a pixel index", k);
        v = v * 10 + static_cast<std::uint64_t>(text[k] - '0');
        if (v > 0xFFFFFFFFull) throw ParseError("permutation: index too large", k);
      }
      out.push_back(static_cast<std::uint32_t>(v));
    }
    pos = eol + 1;
  }
  return out;
}

std::vector<Pixel> permutation_from_indices(std::span<const std::uint32_t> indices,
                                            const Lattice& lat) {
  if (indices.size() != lat.size())
    throw ConfigError("permutation has " + std::to_string(indices.size()) + " entries, lattice has " +
                      std::to_string(lat.size()) + " pixels");
  std::vector<std::uint8_t> seen(lat.size(), 0);
  std::vector<Pixel> order;
  order.reserve(indices.size());
  for (std::uint32_t i : indices) {
    if (i >= lat.size() || seen[i]) throw ConfigError("permutation is not a bijection of the lattice");
    seen[i] = 1;
    order.push_back(lat.pixel(i));
  }
  return order;
}

Segmenter::Segmenter(McvConfig config) : config_(std::move(config)) {
  const int levels = config_.max_level;
  if (levels < 1 || levels > 30) throw ConfigError("max_level must be in [1, 30]");
  if (config_.workers < 1) throw ConfigError("workers must be >= 1");
  if (config_.rho_auto && config_.calibration_samples < 1)
    throw ConfigError("calibration_samples must be >= 1");

  const auto check_radii = [&](const std::vector<int>& radii, const char* name) {
    if (radii.empty()) return;
    if (radii.size() != static_cast<std::size_t>(levels))
      throw ConfigError(std::string(name) + " needs one radius per level");
    for (int r : radii)
      if (r < 0) throw ConfigError(std::string(name) + " radii must be nonnegative");
  };
  check_radii(config_.eval_radii, "eval_radii");
  check_radii(config_.merge_radii, "merge_radii");

  const Window& g = config_.model.neighborhood();
  for (int i = 1; i <= levels; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    eval_windows_.push_back(config_.eval_radii.empty() ? dilate(g, i)
                                                       : square_window(config_.eval_radii[k]));
    merge_windows_.push_back(square_window(config_.merge_radii.empty() ? (1 << i)
                                                                       : config_.merge_radii[k]));
  }
  for (std::size_t k = 1; k < eval_windows_.size(); ++k) {
    if (!is_subset(eval_windows_[k - 1], eval_windows_[k]))
      throw ConfigError("evaluation windows must be nested");
    if (!is_subset(merge_windows_[k - 1], merge_windows_[k]))
      throw ConfigError("merge windows must be nested");
  }

  if (config_.eval_mode == EvalMode::pyramid) {
    if (!config_.eval_radii.empty())
      throw ConfigError("pyramid evaluation uses W_i = dilate(g, i); eval_radii must be unset");
    pyramid_.emplace(g, config_.model, levels);
  }
}

const Window& Segmenter::eval_window(int level) const {
  if (level < 1 || level > config_.max_level) throw DomainError("level out of range");
  return eval_windows_[static_cast<std::size_t>(level - 1)];
}

const Window& Segmenter::merge_window(int level) const {
  if (level < 1 || level > config_.max_level) throw DomainError("level out of range");
  return merge_windows_[static_cast<std::size_t>(level - 1)];
}

bool Segmenter::accept(const ImageBuffer& image, Pixel x, int level) const {
  const Window& w = eval_window(level);
  if (pyramid_) return pyramid_->evaluate(extract_patch(image, x, w), level);
  return evaluate(extract_patch(image, x, w), config_.model);
}

namespace {

bool bounds_two_labels(const Partition& p, Pixel x, const Window& w0) {
  const Label own = p.at(x);
  bool other = false;
  w0.for_each_clipped(x, p.lattice(), [&](Pixel y) { other = other || p.at(y) != own; });
  return other;
}

std::size_t clipped_area(const Window& w, Pixel x, const Lattice& lat) {
  if (!w.is_box()) return w.size();
  const Box& b = w.bounds();
  const auto cols = std::min(lat.width(), x.col + b.max_dx) - std::max(1, x.col + b.min_dx) + 1;
  const auto rows = std::min(lat.height(), x.row + b.max_dy) - std::max(1, x.row + b.min_dy) + 1;
  return static_cast<std::size_t>(std::max(cols, 0)) * static_cast<std::size_t>(std::max(rows, 0));
}

}  // namespace

LevelStats Segmenter::run_level(Partition& p, const ImageBuffer& image, int level,
                                std::span<const Pixel> order) const {
  if (!(p.lattice() == image.lattice)) throw DomainError("partition and image lattices differ");
  const Window& psi = merge_window(level);
  LevelStats stats;
  stats.level = level;
  for (const Pixel& x : order) {
    if (!bounds_two_labels(p, x, config_.w0)) continue;
    ++stats.evaluations;
    if (!accept(image, x, level)) continue;
    ++stats.accepted;
    if (config_.workers > 1 && clipped_area(psi, x, p.lattice()) >= kParallelMergeMinPixels)
      merge_step_parallel_inplace(p, x, config_.w0, psi, config_.workers);
    else
      merge_step_inplace(p, x, config_.w0, psi);
  }
  stats.regions = p.region_count();
  return stats;
}

PartitionSequence Segmenter::run(const ImageBuffer& image) const {
  if (image.samples.size() != image.lattice.size() * static_cast<std::size_t>(image.bands))
    throw DomainError("image sample count does not match its lattice");

  if (config_.rho_auto) {
    const Window& w1 = eval_window(1);
    Patch shape(w1.bounds(), image.bands);
    for (const Offset& o : w1.offsets()) shape.set_present(shape.cell(o), true);
    const ValueSet values =
        ValueSet::grid(image.bands, static_cast<std::uint32_t>(image.max_value) + 1);
    McvConfig resolved = config_;
    resolved.rho_auto = false;
    resolved.model = config_.model.with_rho(calibrate_rho(
        shape, values, config_.model, config_.calibration_samples, config_.seed ^ 0x5EEDCA11B8A7Eull));
    PartitionSequence seq = Segmenter(std::move(resolved)).run(image);
    seq.config.rho_auto = true;
    return seq;
  }

  const Lattice& lat = image.lattice;
  std::vector<Pixel> order =
      config_.permutation == PermutationKind::file
          ? permutation_from_indices(config_.permutation_indices, lat)
          : make_permutation(config_.permutation, lat, config_.seed);
  Rng reshuffler(config_.seed ^ 0x9E3779B97F4A7C15ull);

  PartitionSequence seq;
  seq.config = config_;
  Partition p = singletons(lat);
  seq.levels.push_back(p.labels);
  for (int level = 1; level <= config_.max_level; ++level) {
    if (level > 1 && config_.reshuffle_per_level && config_.permutation == PermutationKind::random)
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[reshuffler.below(i)]);
    seq.stats.push_back(run_level(p, image, level, order));
    p = canonicalize(p);
    seq.levels.push_back(p.labels);
  }
  return seq;
}

PartitionSequence run_mcv(const ImageBuffer& image, const McvConfig& config) {
  return Segmenter(config).run(image);
}

}  // namespace mcv
