#include "mcv/partition.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

namespace mcv {

Partition::Partition(LabelImage image) : labels(std::move(image)) {
  Label max_label = 0;
  bool any = false;
  for (Label l : labels.labels) {
    if (l == kAbsent) continue;
    max_label = std::max(max_label, l);
    any = true;
  }
  if (any && max_label == kAbsent - 1) throw CapacityError("label space exhausted");
  next_label = any ? max_label + 1 : 0;
}

std::size_t Partition::region_count() const {
  std::vector<Label> present;
  present.reserve(labels.labels.size());
  for (Label l : labels.labels)
    if (l != kAbsent) present.push_back(l);
  std::sort(present.begin(), present.end());
  return static_cast<std::size_t>(std::unique(present.begin(), present.end()) - present.begin());
}

Partition singletons(const PixelSet& set) {
  const Lattice& lat = set.lattice();
  LabelImage image(lat, kAbsent);
  Label next = 0;
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (set.contains_index(i)) image.labels[i] = next++;
  Partition p;
  p.labels = std::move(image);
  p.next_label = next;
  return p;
}

Partition singletons(const Lattice& lat) { return singletons(PixelSet::full(lat)); }

namespace {

// Distinct labels of the present pixels of (x + w0) ∩ X; at most |w0| entries.
template <typename Accept>
void gather_labels(const Partition& p, Pixel x, const Window& w0, Accept&& accept,
                   std::vector<Label>& out) {
  out.clear();
  w0.for_each_clipped(x, p.lattice(), [&](Pixel y) {
    const Label l = p.at(y);
    if (l == kAbsent || !accept(y)) return;
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  });
}

bool contains_label(const std::vector<Label>& set, Label l) {
  return std::find(set.begin(), set.end(), l) != set.end();
}

// Algorithm 1 over the present pixels of `p`, with adjacency further restricted
// by `linked(x, y)`. Fusing keeps the larger member list's label, which yields
// the same blocks as always keeping label(x) but bounds the relabel work.
template <typename Linked>
void fuse_components(Partition& p, const Window& w0, std::span<const Pixel> order,
                     Linked&& linked) {
  const Lattice& lat = p.lattice();
  std::vector<std::vector<std::uint32_t>> members(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (p.labels.labels[i] != kAbsent) {
      p.labels.labels[i] = static_cast<Label>(i);
      members[i].push_back(static_cast<std::uint32_t>(i));
    }

  std::vector<Label> touched;
  for (const Pixel& x : order) {
    gather_labels(p, x, w0, [&](Pixel y) { return linked(x, y); }, touched);
    Label target = p.at(x);
    for (Label l : touched) {
      if (l == target) continue;
      Label from = l;
      if (members[from].size() > members[target].size()) std::swap(from, target);
      for (std::uint32_t idx : members[from]) p.labels.labels[idx] = target;
      auto& dst = members[target];
      dst.insert(dst.end(), members[from].begin(), members[from].end());
      members[from].clear();
      members[from].shrink_to_fit();
    }
  }
}

}  // namespace

Partition m_step(Pixel x, const Partition& p, const Window& w0) {
  p.lattice().require(x);
  if (!p.present(x)) throw DomainError("m_step: pixel is not in the partitioned set");
  std::vector<Label> touched;
  gather_labels(p, x, w0, [](Pixel) { return true; }, touched);
  Partition out = p;
  const Label target = p.at(x);
  for (Label& l : out.labels.labels)
    if (l != kAbsent && contains_label(touched, l)) l = target;
  return out;
}

Partition connected_components(const PixelSet& set, const Window& w0,
                               std::span<const Pixel> order) {
  const Lattice& lat = set.lattice();
  if (order.size() != set.count())
    throw DomainError("connected_components: order is not a permutation of the set");
  std::vector<std::uint8_t> seen(lat.size(), 0);
  for (const Pixel& x : order) {
    if (!set.contains(x))
      throw DomainError("connected_components: order visits a pixel outside the set");
    auto& s = seen[lat.index(x)];
    if (s) throw DomainError("connected_components: order visits a pixel twice");
    s = 1;
  }
  Partition p = singletons(set);
  fuse_components(p, w0, order, [](Pixel, Pixel) { return true; });
  return canonicalize(p);
}

Partition connected_components(const PixelSet& set, const Window& w0) {
  const std::vector<Pixel> order = set.pixels();
  return connected_components(set, w0, order);
}

Partition components_by_class(const ClassMap& classes, const Window& w0) {
  const Lattice& lat = classes.lattice;
  if (classes.classes.size() != lat.size())
    throw DomainError("components_by_class: class count does not match lattice");
  // For x of class c the admissible set is γ^{-1}(c), so restricting adjacency to
  // equal classes runs Algorithm 1 on every class simultaneously.
  Partition p = singletons(lat);
  std::vector<Pixel> order(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) order[i] = lat.pixel(i);
  fuse_components(p, w0, order, [&](Pixel x, Pixel y) {
    return classes.classes[lat.index(x)] == classes.classes[lat.index(y)];
  });
  return canonicalize(p);
}

namespace {

Label take_fresh_label(Partition& p) {
  if (p.next_label == kAbsent) throw CapacityError("label space exhausted; canonicalize first");
  return p.next_label++;
}

void merge_targets(const Partition& p, Pixel x, const Window& w0, std::vector<Label>& targets) {
  p.lattice().require(x);
  gather_labels(p, x, w0, [](Pixel) { return true; }, targets);
  bool total = true;
  w0.for_each_clipped(x, p.lattice(), [&](Pixel y) { total = total && p.present(y); });
  if (!total) throw DomainError("merge_step: partition must cover the lattice");
}

}  // namespace

std::size_t merge_step_inplace(Partition& p, Pixel x, const Window& w0, const Window& psi) {
  std::vector<Label> targets;
  merge_targets(p, x, w0, targets);
  const Label fresh = take_fresh_label(p);
  std::size_t changed = 0;
  auto& labels = p.labels.labels;
  const Lattice& lat = p.lattice();
  psi.for_each_clipped(x, lat, [&](Pixel y) {
    Label& l = labels[lat.index(y)];
    if (contains_label(targets, l)) {
      l = fresh;
      ++changed;
    }
  });
  return changed;
}

Partition merge_step(Pixel x, const Partition& p, const Window& w0, const Window& psi) {
  Partition out = p;
  merge_step_inplace(out, x, w0, psi);
  return out;
}

std::size_t merge_step_parallel_inplace(Partition& p, Pixel x, const Window& w0,
                                        const Window& psi, unsigned workers) {
  if (workers == 0) throw DomainError("merge_step_parallel: workers must be >= 1");
  // Target set is fixed before the pass; each worker owns a disjoint slice and
  // reads only the labels it writes, so no synchronization is needed.
  std::vector<Label> targets;
  merge_targets(p, x, w0, targets);
  const Label fresh = take_fresh_label(p);
  auto& labels = p.labels.labels;
  const Lattice& lat = p.lattice();

  std::vector<std::size_t> changed(workers, 0);
  auto run = [&](unsigned part) {
    psi.for_each_clipped_part(x, lat, part, workers, [&](Pixel y) {
      Label& l = labels[lat.index(y)];
      if (contains_label(targets, l)) {
        l = fresh;
        ++changed[part];
      }
    });
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned part = 1; part < workers; ++part) pool.emplace_back(run, part);
    run(0);
  }
  std::size_t total = 0;
  for (std::size_t c : changed) total += c;
  return total;
}

Partition merge_step_parallel(Pixel x, const Partition& p, const Window& w0, const Window& psi,
                              unsigned workers) {
  Partition out = p;
  merge_step_parallel_inplace(out, x, w0, psi, workers);
  return out;
}

LabelImage canonicalize(const LabelImage& labels) {
  LabelImage out(labels.lattice, kAbsent);
  std::unordered_map<Label, Label> remap;
  remap.reserve(1024);
  Label next = 0;
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const Label l = labels.labels[i];
    if (l == kAbsent) continue;
    const auto [it, inserted] = remap.try_emplace(l, next);
    if (inserted) ++next;
    out.labels[i] = it->second;
  }
  return out;
}

Partition canonicalize(const Partition& p) {
  Partition out;
  out.labels = canonicalize(p.labels);
  Label max_plus_one = 0;
  for (Label l : out.labels.labels)
    if (l != kAbsent) max_plus_one = std::max(max_plus_one, l + 1);
  out.next_label = max_plus_one;
  return out;
}

}  // namespace mcv
