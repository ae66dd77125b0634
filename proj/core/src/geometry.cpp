#include "mcv/geometry.hpp"

#include <algorithm>
#include <string>

namespace mcv {

Lattice::Lattice(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw DomainError("lattice dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
}

void Lattice::require(Pixel p) const {
  if (!contains(p))
    throw DomainError("pixel (" + std::to_string(p.col) + "," + std::to_string(p.row) +
                      ") is outside the " + std::to_string(width_) + "x" +
                      std::to_string(height_) + " lattice");
}

Window::Window() = default;

Window::Window(std::vector<Offset> offsets) : is_box_(false), list_(std::move(offsets)) {
  std::sort(list_.begin(), list_.end());
  list_.erase(std::unique(list_.begin(), list_.end()), list_.end());
  if (!std::binary_search(list_.begin(), list_.end(), Offset{0, 0}))
    throw DomainError("window must contain the origin");
  normalize();
}

Window Window::box(Box b) {
  if (!b.contains(Offset{0, 0})) throw DomainError("window must contain the origin");
  Window w;
  w.bounds_ = b;
  return w;
}

void Window::normalize() {
  Box b{list_.front().dx, list_.front().dx, list_.front().dy, list_.front().dy};
  for (const Offset& o : list_) {
    b.min_dx = std::min(b.min_dx, o.dx);
    b.max_dx = std::max(b.max_dx, o.dx);
    b.min_dy = std::min(b.min_dy, o.dy);
    b.max_dy = std::max(b.max_dy, o.dy);
  }
  bounds_ = b;
  const auto area = static_cast<std::size_t>(b.width()) * static_cast<std::size_t>(b.height());
  if (area == list_.size()) {
    is_box_ = true;
    list_.clear();
    list_.shrink_to_fit();
  }
}

std::size_t Window::size() const noexcept {
  if (is_box_)
    return static_cast<std::size_t>(bounds_.width()) * static_cast<std::size_t>(bounds_.height());
  return list_.size();
}

bool Window::contains(Offset o) const noexcept {
  if (is_box_) return bounds_.contains(o);
  return std::binary_search(list_.begin(), list_.end(), o);
}

std::vector<Offset> Window::offsets() const {
  if (!is_box_) return list_;
  std::vector<Offset> out;
  out.reserve(size());
  for (int dy = bounds_.min_dy; dy <= bounds_.max_dy; ++dy)
    for (int dx = bounds_.min_dx; dx <= bounds_.max_dx; ++dx) out.push_back({dx, dy});
  return out;
}

bool operator==(const Window& a, const Window& b) {
  // normalize() guarantees a set that fills its bounding box is always in box form.
  if (a.is_box_ != b.is_box_) return false;
  if (a.is_box_) return a.bounds_ == b.bounds_;
  return a.list_ == b.list_;
}

Window nine_neighborhood() { return Window::box({-1, 1, -1, 1}); }

Window five_neighborhood() { return Window({{0, -1}, {-1, 0}, {0, 0}, {1, 0}, {0, 1}}); }

std::vector<Pixel> clip(const Window& w, Pixel x, const Lattice& lat) {
  lat.require(x);
  std::vector<Pixel> out;
  w.for_each_clipped(x, lat, [&](Pixel y) { out.push_back(y); });
  return out;
}

PixelSet PixelSet::full(Lattice lat) {
  PixelSet s(lat);
  std::fill(s.member_.begin(), s.member_.end(), std::uint8_t{1});
  return s;
}

std::size_t PixelSet::count() const noexcept {
  return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), std::uint8_t{1}));
}

std::vector<Pixel> PixelSet::pixels() const {
  std::vector<Pixel> out;
  for (std::size_t i = 0; i < member_.size(); ++i)
    if (member_[i]) out.push_back(lattice_.pixel(i));
  return out;
}

bool boundary_point(Pixel x, const PixelSet& region, const Window& w0, const Lattice& lat) {
  lat.require(x);
  bool inside = false;
  bool outside = false;
  w0.for_each_clipped(x, lat, [&](Pixel y) {
    if (region.contains(y))
      inside = true;
    else
      outside = true;
  });
  return inside && outside;
}

Window dilate(const Window& g, int times) {
  if (times < 1) throw DomainError("dilation count must be >= 1");
  if (!g.contains({0, 0})) throw DomainError("structuring element must contain the origin");
  if (g.is_box()) {
    const Box& b = g.bounds();
    return Window::box({b.min_dx * times, b.max_dx * times, b.min_dy * times, b.max_dy * times});
  }
  const std::vector<Offset> base = g.offsets();
  std::vector<Offset> current = base;
  for (int i = 1; i < times; ++i) {
    std::vector<Offset> next;
    next.reserve(current.size() * base.size());
    for (const Offset& a : base)
      for (const Offset& b : current) next.push_back(a + b);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    current = std::move(next);
  }
  return Window(std::move(current));
}

bool is_subset(const Window& a, const Window& b) {
  if (b.is_box()) {
    const Box& ab = a.bounds();
    const Box& bb = b.bounds();
    return bb.min_dx <= ab.min_dx && bb.max_dx >= ab.max_dx && bb.min_dy <= ab.min_dy &&
           bb.max_dy >= ab.max_dy;
  }
  if (a.size() > b.size()) return false;
  for (const Offset& o : a.offsets())
    if (!b.contains(o)) return false;
  return true;
}

Window square_window(int radius) {
  if (radius < 0) throw DomainError("square window radius must be nonnegative");
  return Window::box({-radius, radius, -radius, radius});
}

}  // namespace mcv
