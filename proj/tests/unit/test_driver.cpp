#include "doctest.h"
#include "mcv/driver.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mcv/metrics.hpp"
#include "mcv/pyramid.hpp"
#include "oracles.hpp"

using namespace mcv;

namespace {

McvConfig base_config(double rho, int levels = 9) {
  McvConfig c;
  c.max_level = levels;
  c.model = MrfModel::uniform(nine_neighborhood(), Metric::euclidean, 1.0, rho);
  return c;
}

ImageBuffer quadrants(int size, double a, double b, double c, double d) {
  const int half = size / 2;
  return oracle::grey_image(size, size, [&](int col, int row) {
    if (row <= half) return col <= half ? a : b;
    return col <= half ? c : d;
  });
}

// Max over blocks of (max - min) pixel value inside the block.
double worst_block_range(const LabelImage& labels, const ImageBuffer& img) {
  std::map<Label, std::pair<double, double>> range;
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const double v = img.samples[i];
    auto [it, fresh] = range.try_emplace(labels.labels[i], v, v);
    it->second.first = std::min(it->second.first, v);
    it->second.second = std::max(it->second.second, v);
  }
  double worst = 0.0;
  for (const auto& [l, r] : range) worst = std::max(worst, r.second - r.first);
  return worst;
}

}  // namespace

TEST_CASE("permutations") {
  const Lattice lat(2, 2);
  CHECK(make_permutation(PermutationKind::raster, lat, 0) ==
        std::vector<Pixel>{{1, 1}, {2, 1}, {1, 2}, {2, 2}});
  const Lattice l3(3, 3);
  const auto a = make_permutation(PermutationKind::random, l3, 42);
  CHECK(a == make_permutation(PermutationKind::random, l3, 42));
  CHECK(a != make_permutation(PermutationKind::random, l3, 43));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end(), [](Pixel p, Pixel q) {
    return std::make_pair(p.row, p.col) < std::make_pair(q.row, q.col);
  });
  CHECK(sorted == make_permutation(PermutationKind::raster, l3, 0));
}

TEST_CASE("permutation files") {
  CHECK(parse_permutation_file("3\n0\n\n2\r\n1\n") == std::vector<std::uint32_t>{3, 0, 2, 1});
  CHECK_THROWS_AS(parse_permutation_file("1\nx\n"), ParseError);
  const Lattice lat(2, 2);
  const std::vector<std::uint32_t> ok{3, 0, 2, 1};
  CHECK(permutation_from_indices(ok, lat) == std::vector<Pixel>{{2, 2}, {1, 1}, {1, 2}, {2, 1}});
  const std::vector<std::uint32_t> dup{0, 0, 1, 2};
  const std::vector<std::uint32_t> short_list{0, 1, 2};
  const std::vector<std::uint32_t> out_of_range{0, 1, 2, 4};
  CHECK_THROWS_AS(permutation_from_indices(dup, lat), ConfigError);
  CHECK_THROWS_AS(permutation_from_indices(short_list, lat), ConfigError);
  CHECK_THROWS_AS(permutation_from_indices(out_of_range, lat), ConfigError);
}

TEST_CASE("config validation happens before any work") {
  McvConfig c = base_config(1.0);
  c.max_level = 0;
  CHECK_THROWS_AS(Segmenter{c}, ConfigError);
  c = base_config(1.0);
  c.workers = 0;
  CHECK_THROWS_AS(Segmenter{c}, ConfigError);
  c = base_config(1.0, 3);
  c.eval_radii = {1, 2};
  CHECK_THROWS_AS(Segmenter{c}, ConfigError);
  c.eval_radii = {2, 1, 3};
  CHECK_THROWS_AS(Segmenter{c}, ConfigError);
  c.eval_radii = {};
  c.merge_radii = {4, 2, 8};
  CHECK_THROWS_AS(Segmenter{c}, ConfigError);
  c.merge_radii = {};
  c.eval_radii = {1, 2, 3};
  c.eval_mode = EvalMode::pyramid;
  CHECK_THROWS_AS(Segmenter{c}, ConfigError);
}

TEST_CASE("default windows") {
  const Segmenter s(base_config(1.0));
  for (int i = 1; i <= 9; ++i) {
    CHECK(s.eval_window(i) == square_window(i));
    CHECK(s.merge_window(i) == square_window(1 << i));
    if (i > 1) {
      CHECK(is_subset(s.eval_window(i - 1), s.eval_window(i)));
      CHECK(is_subset(s.merge_window(i - 1), s.merge_window(i)));
    }
  }
}

TEST_CASE("run_level on a constant image accepts every evaluation") {
  const ImageBuffer img = oracle::grey_image(8, 8, [](int, int) { return 50.0; });
  const Segmenter s(base_config(1.0));
  Partition p = singletons(img.lattice);
  const auto order = make_permutation(PermutationKind::random, img.lattice, 1);
  const LevelStats st = s.run_level(p, img, 1, order);
  CHECK(st.evaluations > 0);
  CHECK(st.accepted == st.evaluations);
  CHECK(st.regions < img.lattice.size());
}

TEST_CASE("run_level never mixes two tones") {
  const ImageBuffer img = oracle::grey_image(12, 10, [](int c, int) { return c <= 6 ? 0.0 : 255.0; });
  const Segmenter s(base_config(1.0));
  Partition p = singletons(img.lattice);
  const auto order = make_permutation(PermutationKind::random, img.lattice, 5);
  for (int level = 1; level <= 9; ++level) {
    s.run_level(p, img, level, order);
    CHECK(worst_block_range(p.labels, img) == 0.0);
  }
}

TEST_CASE("rho = 0 on noise accepts nothing") {
  Rng rng(12);
  const ImageBuffer img = oracle::grey_image(16, 16, [&](int, int) { return static_cast<double>(rng.below(256)); });
  const Segmenter s(base_config(0.0));
  Partition p = singletons(img.lattice);
  const auto order = make_permutation(PermutationKind::raster, img.lattice, 0);
  const LevelStats st = s.run_level(p, img, 1, order);
  CHECK(st.evaluations == img.lattice.size());
  CHECK(st.accepted == 0);
  CHECK(p.labels == singletons(img.lattice).labels);
}

TEST_CASE("run_mcv small cases") {
  const ImageBuffer one = oracle::grey_image(1, 1, [](int, int) { return 3.0; });
  const PartitionSequence s1 = run_mcv(one, base_config(1.0));
  CHECK(s1.levels.size() == 10);
  for (const auto& lv : s1.levels) CHECK(lv.labels == std::vector<Label>{0});

  const ImageBuffer flat = oracle::grey_image(16, 16, [](int, int) { return 9.0; });
  const PartitionSequence s2 = run_mcv(flat, base_config(1.0));
  CHECK(s2.levels.front() == singletons(flat.lattice).labels);
  CHECK(s2.stats.back().regions == 1);
}

// Reference driver: same visit rule, merges evaluated on explicit block sets.
std::vector<LabelImage> oracle_levels(const ImageBuffer& img, const Segmenter& s,
                                      const std::vector<Pixel>& order, bool pyramid = false) {
  const McvConfig& c = s.config();
  LabelImage lab = singletons(img.lattice).labels;
  std::vector<LabelImage> out{lab};
  for (int level = 1; level <= c.max_level; ++level) {
    for (const Pixel& x : order) {
      std::set<Label> seen;
      for (const Pixel& y : clip(c.w0, x, img.lattice)) seen.insert(lab.at(y));
      if (seen.size() < 2) continue;
      const Patch patch = extract_patch(img, x, s.eval_window(level));
      const std::vector<double> theta(c.model.neighborhood().size(), 1.0);
      if (!(pyramid ? evaluate_by_composition(patch, level, c.model.neighborhood(), theta, c.model)
                    : evaluate(patch, c.model)))
        continue;
      lab = oracle::labels_of(
          oracle::set_form_merge(oracle::blocks_of(lab), img.lattice, x, c.w0, s.merge_window(level)),
          img.lattice);
    }
    out.push_back(canonicalize(lab));
  }
  return out;
}

TEST_CASE("driver matches the set-form reference on four quadrants") {
  const ImageBuffer img = quadrants(32, 0, 80, 160, 240);
  for (PermutationKind kind : {PermutationKind::random, PermutationKind::raster}) {
    McvConfig c = base_config(1.0);
    c.permutation = kind;
    const Segmenter s(c);
    const PartitionSequence seq = s.run(img);
    CHECK(seq.levels == oracle_levels(img, s, make_permutation(kind, img.lattice, c.seed)));
    for (const auto& lv : seq.levels) CHECK(worst_block_range(lv, img) == 0.0);
  }
}

TEST_CASE("region count does not grow across a level when Psi covers W and W0") {
  Rng rng(70);
  const ImageBuffer img = oracle::grey_image(40, 40, [&](int c, int r) {
    return (c < 20 ? 40.0 : 160.0) + (r > 25 ? 60.0 : 0.0) + static_cast<double>(rng.below(3));
  });
  McvConfig c = base_config(4.0);
  const Segmenter s(c);
  const PartitionSequence seq = s.run(img);
  std::size_t previous = img.lattice.size();
  for (const LevelStats& st : seq.stats) {
    REQUIRE(is_subset(s.eval_window(st.level), s.merge_window(st.level)));
    CHECK(st.regions <= previous);
    previous = st.regions;
  }
}

TEST_CASE("determinism across runs and worker counts") {
  Rng rng(19);
  const ImageBuffer img = oracle::grey_image(48, 40, [&](int c, int r) {
    return (c + r < 40 ? 30.0 : 200.0) + static_cast<double>(rng.below(5));
  });
  McvConfig c = base_config(6.0, 7);
  c.seed = 77;
  const PartitionSequence a = run_mcv(img, c);
  const PartitionSequence b = run_mcv(img, c);
  CHECK(a.levels == b.levels);
  for (unsigned workers : {2u, 5u}) {
    c.workers = workers;
    CHECK(run_mcv(img, c).levels == a.levels);
  }
}

TEST_CASE("parallel merges engage on large windows without changing results") {
  const ImageBuffer img = oracle::grey_image(160, 160, [](int c, int r) { return c < 80 || r < 40 ? 10.0 : 90.0; });
  McvConfig c = base_config(1.0, 8);
  c.permutation = PermutationKind::raster;
  const PartitionSequence one = run_mcv(img, c);
  c.workers = 4;
  CHECK(run_mcv(img, c).levels == one.levels);
  for (const auto& lv : one.levels) CHECK(worst_block_range(lv, img) == 0.0);
  CHECK(one.stats.back().regions < one.stats.front().regions);
}

TEST_CASE("pyramid evaluation mode") {
  const ImageBuffer img = quadrants(24, 0, 100, 200, 50);
  McvConfig c = base_config(1.0, 6);
  c.eval_mode = EvalMode::pyramid;
  const PartitionSequence seq = run_mcv(img, c);
  for (const auto& lv : seq.levels) CHECK(worst_block_range(lv, img) == 0.0);
  const Segmenter s(c);
  CHECK(seq.levels == oracle_levels(img, s, make_permutation(c.permutation, img.lattice, c.seed), true));
}

TEST_CASE("file permutation and reshuffling") {
  const ImageBuffer img = quadrants(8, 0, 50, 100, 150);
  McvConfig c = base_config(1.0, 4);
  c.permutation = PermutationKind::file;
  for (std::uint32_t i = 0; i < 64; ++i) c.permutation_indices.push_back(63 - i);
  const PartitionSequence f = run_mcv(img, c);
  CHECK(f.stats.back().regions == 4);
  c.permutation_indices.pop_back();
  CHECK_THROWS_AS(run_mcv(img, c), ConfigError);

  McvConfig r = base_config(1.0, 4);
  r.reshuffle_per_level = true;
  CHECK(run_mcv(img, r).levels == run_mcv(img, r).levels);
}

TEST_CASE("automatic rho calibration") {
  const ImageBuffer img = quadrants(16, 0, 100, 200, 50);
  McvConfig c = base_config(0.0, 5);
  c.rho_auto = true;
  c.calibration_samples = 300;
  const PartitionSequence seq = run_mcv(img, c);
  CHECK(seq.config.rho_auto);
  CHECK(seq.config.model.rho() > 0.0);
  McvConfig fixed = base_config(seq.config.model.rho(), 5);
  CHECK(run_mcv(img, fixed).levels == seq.levels);
}
