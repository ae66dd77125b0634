#include "mcv/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <unordered_map>

namespace mcv {

namespace {

std::uint64_t pairs(std::uint64_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

}  // namespace

double rand_index(const LabelImage& a, const LabelImage& b) {
  if (!(a.lattice == b.lattice)) throw DomainError("rand_index: lattices differ");
  const LabelImage ca = canonicalize(a);
  const LabelImage cb = canonicalize(b);
  const std::size_t n = ca.labels.size();

  std::unordered_map<std::uint64_t, std::uint64_t> joint;
  std::unordered_map<Label, std::uint64_t> rows;
  std::unordered_map<Label, std::uint64_t> cols;
  for (std::size_t i = 0; i < n; ++i) {
    const Label la = ca.labels[i];
    const Label lb = cb.labels[i];
    if (la == kAbsent || lb == kAbsent) throw DomainError("rand_index: partitions must be total");
    ++joint[(static_cast<std::uint64_t>(la) << 32) | lb];
    ++rows[la];
    ++cols[lb];
  }

  const std::uint64_t total = pairs(n);
  if (total == 0) return 1.0;
  std::uint64_t both = 0;
  std::uint64_t in_a = 0;
  std::uint64_t in_b = 0;
  for (const auto& [key, count] : joint) both += pairs(count);
  for (const auto& [key, count] : rows) in_a += pairs(count);
  for (const auto& [key, count] : cols) in_b += pairs(count);
  // together-in-both + apart-in-both = total - (in_a - both) - (in_b - both)
  const std::uint64_t agree = total + 2 * both - in_a - in_b;
  return static_cast<double>(agree) / static_cast<double>(total);
}

double rand_index(const Partition& a, const Partition& b) { return rand_index(a.labels, b.labels); }

std::vector<std::size_t> region_size_histogram(const LabelImage& labels, bool sorted_descending) {
  const LabelImage canon = canonicalize(labels);
  std::vector<std::size_t> sizes;
  for (Label l : canon.labels) {
    if (l == kAbsent) continue;
    if (l >= sizes.size()) sizes.resize(l + 1, 0);
    ++sizes[l];
  }
  if (sorted_descending) std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

std::vector<std::size_t> region_size_histogram(const Partition& p, bool sorted_descending) {
  return region_size_histogram(p.labels, sorted_descending);
}

}  // namespace mcv
