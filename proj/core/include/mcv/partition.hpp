#pragma once

// Partitions of a pixel lattice, stored as dense label maps.
//
// Two families of operations live here:
//  * connected-component labelling by repeated application of the merge
//    operator M (every block meeting S ∩ (x + W0) is fused), and
//  * the windowed merge used by the segmentation driver, in which blocks
//    meeting x + W0 are cut to x + Psi and fused while their residues remain.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mcv/geometry.hpp"
#include "mcv/imageio.hpp"

namespace mcv {

/// Marks pixels outside the subset a partition is defined on.
inline constexpr Label kAbsent = std::numeric_limits<Label>::max();

struct Partition {
  LabelImage labels;
  /// Strictly greater than every label in use; merge_step hands it out.
  Label next_label = 0;

  Partition() = default;
  /// Adopts an existing label map; next_label becomes max present label + 1.
  explicit Partition(LabelImage image);

  const Lattice& lattice() const noexcept { return labels.lattice; }
  Label at(Pixel p) const { return labels.at(p); }
  bool present(Pixel p) const { return labels.at(p) != kAbsent; }

  /// Number of distinct present labels.
  std::size_t region_count() const;
};

/// Per-pixel class assignment (a pixel classifier evaluated on the lattice).
struct ClassMap {
  Lattice lattice;
  std::vector<std::uint32_t> classes;
};

/// Each pixel of `set` becomes its own block; other pixels are absent.
Partition singletons(const PixelSet& set);
/// Singletons over the full lattice.
Partition singletons(const Lattice& lat);

/// One application of M at x: all blocks meeting S ∩ (x + W0) are fused, where
/// S is the set of present pixels. Throws DomainError when x is not present.
Partition m_step(Pixel x, const Partition& p, const Window& w0);

/// Exact w0-connected components of `set`, visiting pixels in `order`.
/// `order` must be a permutation of the set (DomainError otherwise).
Partition connected_components(const PixelSet& set, const Window& w0, std::span<const Pixel> order);
/// Convenience: raster visiting order.
Partition connected_components(const PixelSet& set, const Window& w0);

/// Union over classes of the components of each class's pixel set; canonical labels.
Partition components_by_class(const ClassMap& classes, const Window& w0);

/// In-place windowed merge at x. Every pixel of (x + psi) ∩ X whose label occurs
/// in (x + w0) ∩ X receives a fresh label, so the fused block is exactly the
/// union of those blocks cut to the merge window and the cut-off residues keep
/// their old labels. Returns the number of relabelled pixels.
std::size_t merge_step_inplace(Partition& p, Pixel x, const Window& w0, const Window& psi);

Partition merge_step(Pixel x, const Partition& p, const Window& w0, const Window& psi);

/// Same result as merge_step_inplace, with the relabel pass split by rows across
/// `workers` threads. Throws DomainError when workers == 0.
std::size_t merge_step_parallel_inplace(Partition& p, Pixel x, const Window& w0,
                                        const Window& psi, unsigned workers);

Partition merge_step_parallel(Pixel x, const Partition& p, const Window& w0, const Window& psi,
                              unsigned workers);

/// Labels renumbered 0, 1, 2, ... by first occurrence in raster order; absent stays absent.
Partition canonicalize(const Partition& p);
LabelImage canonicalize(const LabelImage& labels);

}  // namespace mcv
