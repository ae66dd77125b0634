#include "mcv/pyramid.hpp"

#include <string>

namespace mcv {

namespace {

bool box_contains(const Box& outer, const Box& inner) {
  return outer.min_dx <= inner.min_dx && outer.max_dx >= inner.max_dx &&
         outer.min_dy <= inner.min_dy && outer.max_dy >= inner.max_dy;
}

Box sum_box(const Box& a, const Box& b) {
  return {a.min_dx + b.min_dx, a.max_dx + b.max_dx, a.min_dy + b.min_dy, a.max_dy + b.max_dy};
}

std::vector<double> uniform_theta(const Window& g) { return std::vector<double>(g.size(), 1.0); }

}  // namespace

Patch downsample(const Patch& fine, const Window& coarse, const Window& g,
                 std::span<const double> theta) {
  const std::vector<Offset> taps = g.offsets();
  if (theta.size() != taps.size()) throw DomainError("downsample: theta does not match g");
  if (!box_contains(fine.box(), sum_box(coarse.bounds(), g.bounds())))
    throw DomainError("downsample: fine patch does not cover the dilated coarse window");

  const int bands = fine.bands();
  Patch out(coarse.bounds(), bands);
  for (const Offset& o : coarse.offsets()) {
    if (!fine.present(o)) continue;
    const std::size_t oc = out.cell(o);
    auto acc = out.value(oc);
    double wsum = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k) {
      const Offset q = o + taps[k];
      if (!fine.present(q)) continue;
      const auto v = fine.value(fine.cell(q));
      wsum += theta[k];
      for (int b = 0; b < bands; ++b) acc[static_cast<std::size_t>(b)] += theta[k] * v[static_cast<std::size_t>(b)];
    }
    for (double& a : acc) a /= wsum;
    out.set_present(oc, true);
  }
  return out;
}

PyramidEvaluator::PyramidEvaluator(Window g, MrfModel base, int max_level)
    : PyramidEvaluator(g, uniform_theta(g), std::move(base), max_level) {}

PyramidEvaluator::PyramidEvaluator(Window g, std::vector<double> theta, MrfModel base,
                                   int max_level)
    : g_(std::move(g)), theta_(std::move(theta)), base_(std::move(base)) {
  if (max_level < 1) throw DomainError("pyramid needs at least one level");
  const std::vector<Offset> taps = g_.offsets();
  if (theta_.size() != taps.size()) throw DomainError("pyramid: theta does not match g");
  for (double t : theta_)
    if (!(t >= 0.0)) throw DomainError("pyramid: weights must be nonnegative");

  for (int i = 1; i <= max_level; ++i) windows_.push_back(dilate(g_, i));

  for (int i = 1; i < max_level; ++i) {
    const Window& coarse = windows_[static_cast<std::size_t>(i - 1)];
    const Window& fine = windows_[static_cast<std::size_t>(i)];
    Layer layer;
    layer.in_box = fine.bounds();
    layer.out_box = coarse.bounds();
    const Patch in_shape(layer.in_box, 1);
    const Patch out_shape(layer.out_box, 1);
    for (const Offset& o : coarse.offsets()) {
      Node node{out_shape.cell(o), in_shape.cell(o), layer.connections.size(), 0};
      for (std::size_t k = 0; k < taps.size(); ++k)
        layer.connections.push_back({in_shape.cell(o + taps[k]), theta_[k]});
      node.last = layer.connections.size();
      layer.nodes.push_back(node);
    }
    layers_.push_back(std::move(layer));
  }
}

const Window& PyramidEvaluator::window(int level) const {
  if (level < 1 || level > max_level())
    throw DomainError("pyramid level " + std::to_string(level) + " out of range");
  return windows_[static_cast<std::size_t>(level - 1)];
}

Patch PyramidEvaluator::apply(const Layer& layer, const Patch& in) const {
  const int bands = in.bands();
  Patch out(layer.out_box, bands);
  for (const Node& node : layer.nodes) {
    if (!in.present(node.self_cell)) continue;
    auto acc = out.value(node.out_cell);
    double wsum = 0.0;
    for (std::size_t k = node.first; k < node.last; ++k) {
      const Connection& c = layer.connections[k];
      if (!in.present(c.in_cell)) continue;
      const auto v = in.value(c.in_cell);
      wsum += c.weight;
      for (int b = 0; b < bands; ++b) acc[static_cast<std::size_t>(b)] += c.weight * v[static_cast<std::size_t>(b)];
    }
    for (double& a : acc) a /= wsum;
    out.set_present(node.out_cell, true);
  }
  return out;
}

Patch PyramidEvaluator::reduce(const Patch& patch, int level) const {
  const Window& w = window(level);
  if (!(patch.box() == w.bounds()))
    throw DomainError("patch is not laid out on the level-" + std::to_string(level) + " window");
  Patch current = patch;
  for (int i = level - 1; i >= 1; --i) current = apply(layers_[static_cast<std::size_t>(i - 1)], current);
  return current;
}

bool PyramidEvaluator::evaluate(const Patch& patch, int level) const {
  return mcv::evaluate(reduce(patch, level), base_);
}

bool evaluate_by_composition(const Patch& patch, int level, const Window& g,
                             std::span<const double> theta, const MrfModel& model) {
  if (level < 1) throw DomainError("level must be >= 1");
  Patch current = patch;
  for (int i = level - 1; i >= 1; --i) current = downsample(current, dilate(g, i), g, theta);
  return evaluate(current, model);
}

}  // namespace mcv
