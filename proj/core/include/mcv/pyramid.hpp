#pragma once

// Multiresolution evaluation over the window sequence W_i = G^(i).
//
// A patch on W_{i+1} is viewed on W_i by replacing every value with the
// θ-weighted average of its G-neighbours (clipped to the present cells and
// renormalized). Evaluating a level-i patch means reducing it i - 1 times and
// running the energy threshold on the W_1 result. PyramidEvaluator hardwires
// those reductions as fixed connection lists, one per layer.

#include <span>
#include <vector>

#include "mcv/geometry.hpp"
#include "mcv/mrf.hpp"

namespace mcv {

/// One reduction step from a patch on a window's fine neighbour to `coarse`.
/// `theta` aligns with g.offsets() and includes the origin's weight. The fine
/// patch box must contain coarse.bounds() ⊕ g.bounds() (DomainError otherwise).
Patch downsample(const Patch& fine, const Window& coarse, const Window& g,
                 std::span<const double> theta);

class PyramidEvaluator {
 public:
  /// Uniform θ over `g` (origin included); W_i = dilate(g, i) for i in [1, max_level].
  PyramidEvaluator(Window g, MrfModel base, int max_level);
  PyramidEvaluator(Window g, std::vector<double> theta, MrfModel base, int max_level);

  int max_level() const noexcept { return static_cast<int>(windows_.size()); }
  const Window& window(int level) const;
  const MrfModel& model() const noexcept { return base_; }

  /// Applies layers level-1, ..., 1. `patch` must be laid out on W_level's box.
  Patch reduce(const Patch& patch, int level) const;
  bool evaluate(const Patch& patch, int level) const;

 private:
  struct Node {
    std::size_t out_cell;
    std::size_t self_cell;  // same offset in the input box; decides presence
    std::size_t first;      // [first, last) into connections
    std::size_t last;
  };
  struct Connection {
    std::size_t in_cell;
    double weight;
  };
  struct Layer {
    Box in_box;
    Box out_box;
    std::vector<Node> nodes;
    std::vector<Connection> connections;
  };

  Patch apply(const Layer& layer, const Patch& in) const;

  Window g_;
  std::vector<double> theta_;
  MrfModel base_;
  std::vector<Window> windows_;  // windows_[i - 1] = W_i
  std::vector<Layer> layers_;    // layers_[i - 1] maps W_{i+1} -> W_i
};

/// evaluate(patch, level) with the reductions done by repeated downsample();
/// the reference composition the evaluator's layers must reproduce.
bool evaluate_by_composition(const Patch& patch, int level, const Window& g,
                             std::span<const double> theta, const MrfModel& model);

}  // namespace mcv
