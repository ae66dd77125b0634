#pragma once

#include <cstddef>
#include <vector>

#include "mcv/partition.hpp"

namespace mcv {

/// Plain (unadjusted) Rand index: the fraction of pixel pairs on which the two
/// partitions agree, co-clustered in both or separated in both. Computed from
/// the sparse label contingency table. Returns 1 for a single-pixel lattice.
/// Throws DomainError on lattice mismatch or absent pixels.
double rand_index(const LabelImage& a, const LabelImage& b);
double rand_index(const Partition& a, const Partition& b);

/// Block sizes (present pixels only), descending when `sorted_descending`,
/// otherwise in first-occurrence order.
std::vector<std::size_t> region_size_histogram(const LabelImage& labels,
                                               bool sorted_descending = true);
std::vector<std::size_t> region_size_histogram(const Partition& p, bool sorted_descending = true);

}  // namespace mcv
