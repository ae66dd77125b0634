#pragma once

// Integer lattice geometry: pixels, windows (finite offset sets around the
// origin), clipping against the image lattice, dilation and the boundary test.
//
// Pixel coordinates are 1-based: col in [1, width], row in [1, height].
// Linear indices are 0-based row-major: (row - 1) * width + (col - 1).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcv/errors.hpp"

namespace mcv {

struct Pixel {
  int col = 1;
  int row = 1;
  friend constexpr auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct Offset {
  int dx = 0;
  int dy = 0;
  // Row-major ordering (dy first) so sorted offsets scan like an image.
  friend constexpr std::strong_ordering operator<=>(const Offset& a, const Offset& b) {
    if (auto c = a.dy <=> b.dy; c != 0) return c;
    return a.dx <=> b.dx;
  }
  friend constexpr bool operator==(const Offset&, const Offset&) = default;
};

constexpr Pixel operator+(Pixel p, Offset o) { return {p.col + o.dx, p.row + o.dy}; }
constexpr Offset operator+(Offset a, Offset b) { return {a.dx + b.dx, a.dy + b.dy}; }

class Lattice {
 public:
  Lattice() = default;
  Lattice(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  bool contains(Pixel p) const noexcept {
    return p.col >= 1 && p.col <= width_ && p.row >= 1 && p.row <= height_;
  }
  std::size_t index(Pixel p) const noexcept {
    return static_cast<std::size_t>(p.row - 1) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(p.col - 1);
  }
  Pixel pixel(std::size_t index) const noexcept {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)) + 1,
            static_cast<int>(index / static_cast<std::size_t>(width_)) + 1};
  }

  // Throws DomainError when p is off the lattice.
  void require(Pixel p) const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  int width_ = 1;
  int height_ = 1;
};

/// Inclusive bounding box of a set of offsets.
struct Box {
  int min_dx = 0;
  int max_dx = 0;
  int min_dy = 0;
  int max_dy = 0;

  int width() const noexcept { return max_dx - min_dx + 1; }
  int height() const noexcept { return max_dy - min_dy + 1; }
  bool contains(Offset o) const noexcept {
    return o.dx >= min_dx && o.dx <= max_dx && o.dy >= min_dy && o.dy <= max_dy;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

/// Finite, deduplicated set of integer offsets containing the origin.
///
/// A window whose offsets fill their bounding box is kept in box form and never
/// materialized; merge windows grow as (2*2^i + 1)^2 so this matters.
class Window {
 public:
  /// The origin alone.
  Window();
  /// Deduplicates; throws DomainError if the origin is missing.
  explicit Window(std::vector<Offset> offsets);

  static Window box(Box b);

  bool is_box() const noexcept { return is_box_; }
  const Box& bounds() const noexcept { return bounds_; }
  std::size_t size() const noexcept;
  bool contains(Offset o) const noexcept;

  /// Sorted (row-major) offsets. Materializes box windows.
  std::vector<Offset> offsets() const;

  /// Calls f(Pixel) for every pixel of (x + W) ∩ lattice, in row-major order.
  template <typename F>
  void for_each_clipped(Pixel x, const Lattice& lat, F&& f) const {
    if (is_box_) {
      const int c0 = std::max(1, x.col + bounds_.min_dx);
      const int c1 = std::min(lat.width(), x.col + bounds_.max_dx);
      const int r0 = std::max(1, x.row + bounds_.min_dy);
      const int r1 = std::min(lat.height(), x.row + bounds_.max_dy);
      for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) f(Pixel{c, r});
      return;
    }
    for (const Offset& o : list_) {
      const Pixel y = x + o;
      if (lat.contains(y)) f(y);
    }
  }

  /// Like for_each_clipped, restricted to slice `part` of `parts` (rows for box
  /// windows, offset ranges otherwise). The slices partition (x + W) ∩ lattice.
  template <typename F>
  void for_each_clipped_part(Pixel x, const Lattice& lat, unsigned part, unsigned parts,
                             F&& f) const {
    if (is_box_) {
      const int c0 = std::max(1, x.col + bounds_.min_dx);
      const int c1 = std::min(lat.width(), x.col + bounds_.max_dx);
      const int r0 = std::max(1, x.row + bounds_.min_dy);
      const int r1 = std::min(lat.height(), x.row + bounds_.max_dy);
      if (r1 < r0) return;
      const auto rows = static_cast<unsigned>(r1 - r0 + 1);
      const int begin = r0 + static_cast<int>(rows * part / parts);
      const int end = r0 + static_cast<int>(rows * (part + 1) / parts);
      for (int r = begin; r < end; ++r)
        for (int c = c0; c <= c1; ++c) f(Pixel{c, r});
      return;
    }
    const std::size_t n = list_.size();
    const std::size_t begin = n * part / parts;
    const std::size_t end = n * (part + 1) / parts;
    for (std::size_t k = begin; k < end; ++k) {
      const Pixel y = x + list_[k];
      if (lat.contains(y)) f(y);
    }
  }

  friend bool operator==(const Window& a, const Window& b);

 private:
  void normalize();

  bool is_box_ = true;
  Box bounds_{};
  std::vector<Offset> list_;  // empty when is_box_
};

/// The 3x3 block around and including the origin.
Window nine_neighborhood();
/// The origin plus its four edge neighbours.
Window five_neighborhood();

/// (x + w) ∩ lat as a row-major pixel list; always contains x.
std::vector<Pixel> clip(const Window& w, Pixel x, const Lattice& lat);

/// Dense membership mask over a lattice.
class PixelSet {
 public:
  explicit PixelSet(Lattice lat) : lattice_(lat), member_(lat.size(), 0) {}
  static PixelSet full(Lattice lat);

  const Lattice& lattice() const noexcept { return lattice_; }
  bool contains(Pixel p) const noexcept {
    return lattice_.contains(p) && member_[lattice_.index(p)] != 0;
  }
  bool contains_index(std::size_t i) const noexcept { return member_[i] != 0; }
  void insert(Pixel p) { member_[lattice_.index(p)] = 1; }
  void erase(Pixel p) { member_[lattice_.index(p)] = 0; }
  std::size_t count() const noexcept;
  std::vector<Pixel> pixels() const;

 private:
  Lattice lattice_;
  std::vector<std::uint8_t> member_;
};

/// True iff (x + w0) ∩ lat meets the region and also meets lat \ region.
/// Off-lattice positions never count as outside the region.
bool boundary_point(Pixel x, const PixelSet& region, const Window& w0, const Lattice& lat);

/// Minkowski power: dilate(g, 1) = g, dilate(g, i + 1) = g ⊕ dilate(g, i).
Window dilate(const Window& g, int times);

/// a ⊆ b as offset sets.
bool is_subset(const Window& a, const Window& b);

/// All offsets with |dx| <= r and |dy| <= r.
Window square_window(int radius);

}  // namespace mcv
