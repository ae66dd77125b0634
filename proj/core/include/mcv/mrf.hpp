#pragma once

// Autoregressive Gaussian Markov random field image model.
//
// For an image patch ω on a region R the energy is
//   U(ω) = Σ_{x∈R} d(ω(x), Σ_{y∈G_x} θ(y) ω(y))²
// where G_x are the in-region neighbours of x and θ is renormalized over them.
// A patch is acceptable when its per-pixel energy U/|R| is at most ρ, which is
// the same acceptance set as thresholding the Gibbs probability exp(-U/T)/Z at
// τ = exp(-ρ/T)/Z.

#include <cstdint>
#include <span>
#include <vector>

#include "mcv/geometry.hpp"
#include "mcv/imageio.hpp"

namespace mcv {

enum class Metric {
  euclidean,     // d(u, v) = sqrt(Σ (v_i - u_i)²)
  per_band_abs,  // d(u, v) = Σ |v_i - u_i|
};

struct WeightedOffset {
  Offset offset;
  double weight = 1.0;
};

class MrfModel {
 public:
  /// 9-neighbourhood, uniform weights, euclidean, T = 1, ρ = 0.
  MrfModel();
  /// `weights` aligns with neighborhood.offsets(); the origin's entry is ignored.
  MrfModel(Window neighborhood, std::vector<double> weights, Metric metric, double temperature,
           double rho);

  static MrfModel uniform(Window neighborhood, Metric metric = Metric::euclidean,
                          double temperature = 1.0, double rho = 0.0);

  const Window& neighborhood() const noexcept { return neighborhood_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// Neighbour offsets (origin removed) paired with their weights.
  std::span<const WeightedOffset> terms() const noexcept { return terms_; }
  Metric metric() const noexcept { return metric_; }
  double temperature() const noexcept { return temperature_; }
  double rho() const noexcept { return rho_; }

  MrfModel with_rho(double rho) const;
  MrfModel with_temperature(double temperature) const;
  MrfModel with_metric(Metric metric) const;

 private:
  void build();

  Window neighborhood_;
  std::vector<double> weights_;
  std::vector<WeightedOffset> terms_;
  Metric metric_ = Metric::euclidean;
  double temperature_ = 1.0;
  double rho_ = 0.0;
};

/// Image values on a subset of a rectangular offset box. Cells outside the
/// region are absent and never read.
class Patch {
 public:
  Patch(Box box, int bands);

  /// Fully present rectangle anchored at offset (0, 0); values row-major, bands interleaved.
  static Patch from_rows(int width, int height, int bands, std::vector<double> values);

  const Box& box() const noexcept { return box_; }
  int width() const noexcept { return box_.width(); }
  int height() const noexcept { return box_.height(); }
  int bands() const noexcept { return bands_; }
  std::size_t cell_count() const noexcept { return present_.size(); }

  bool in_box(Offset o) const noexcept { return box_.contains(o); }
  std::size_t cell(Offset o) const noexcept {
    return static_cast<std::size_t>(o.dy - box_.min_dy) * static_cast<std::size_t>(width()) +
           static_cast<std::size_t>(o.dx - box_.min_dx);
  }
  Offset offset(std::size_t cell) const noexcept {
    return {box_.min_dx + static_cast<int>(cell % static_cast<std::size_t>(width())),
            box_.min_dy + static_cast<int>(cell / static_cast<std::size_t>(width()))};
  }

  bool present(std::size_t cell) const noexcept { return present_[cell] != 0; }
  bool present(Offset o) const noexcept { return in_box(o) && present_[cell(o)] != 0; }
  std::span<const double> value(std::size_t cell) const {
    return {values_.data() + cell * static_cast<std::size_t>(bands_),
            static_cast<std::size_t>(bands_)};
  }
  std::span<double> value(std::size_t cell) {
    return {values_.data() + cell * static_cast<std::size_t>(bands_),
            static_cast<std::size_t>(bands_)};
  }
  void set_present(std::size_t cell, bool on) { present_[cell] = on ? 1 : 0; }
  void set(Offset o, std::span<const double> v);

  /// |R|: number of present cells.
  std::size_t region_size() const noexcept;

  /// Adds c to every band of every present cell.
  Patch shifted(double c) const;
  /// Multiplies every sample of every present cell by a.
  Patch scaled(double a) const;

 private:
  Box box_;
  int bands_;
  std::vector<double> values_;
  std::vector<std::uint8_t> present_;
};

/// ω restricted to (x + w) ∩ X, laid out on w's bounding box.
Patch extract_patch(const ImageBuffer& image, Pixel x, const Window& w);

/// Contribution of one present cell to U; zero when it has no present neighbour.
double pixel_energy(const Patch& patch, std::size_t cell, const MrfModel& model);

/// U(ω). Throws DomainError for an empty region.
double energy(const Patch& patch, const MrfModel& model);

/// 1 iff U(ω)/|R| <= ρ.
bool evaluate(const Patch& patch, const MrfModel& model);

/// Finite value set V ⊂ R^b, either listed or the integer grid {0..levels-1}^b.
class ValueSet {
 public:
  static ValueSet list(std::vector<std::vector<double>> values);
  static ValueSet scalars(std::vector<double> values);
  static ValueSet grid(int bands, std::uint32_t levels);

  int bands() const noexcept { return bands_; }
  std::uint64_t size() const noexcept;
  void value(std::uint64_t index, std::span<double> out) const;

 private:
  int bands_ = 1;
  std::uint32_t levels_ = 0;
  std::vector<std::vector<double>> list_;
};

/// Every configuration of V on the present cells of a shape patch, with its
/// energy and Gibbs probability exp(-U/T)/Z.
struct GibbsTable {
  std::size_t sites = 0;
  std::uint64_t value_count = 0;
  std::vector<double> energies;
  std::vector<double> probabilities;
  double min_energy = 0.0;
  /// Σ exp(-(U - min_energy)/T); Z = exp(-min_energy/T) * scaled_partition.
  double scaled_partition = 0.0;
  double temperature = 1.0;

  /// Per-site value indices of state k (present cells in raster order).
  std::vector<std::uint64_t> state(std::uint64_t k) const;
  /// τ = exp(-ρ/T)/Z, evaluated in the same scaled form as `probabilities`.
  double tau_for_rho(double rho) const;
  /// Σ π(ω) U(ω).
  double expected_energy() const;
};

inline constexpr std::uint64_t kMaxGibbsStates = std::uint64_t{1} << 20;

/// Throws CapacityError when |V|^|R| exceeds kMaxGibbsStates.
GibbsTable gibbs_distribution(const Patch& shape, const ValueSet& values, const MrfModel& model);

/// True iff {π(ω) >= τ} and {U(ω) <= ρ} coincide over Ω(R), with ρ = model.rho().
bool tau_rho_consistency(const Patch& shape, const ValueSet& values, const MrfModel& model);

struct MetropolisEstimate {
  double mean = 0.0;       // sample mean of U/|R|
  double std_error = 0.0;  // batch-means standard error of the mean
  double acceptance_rate = 0.0;
  std::size_t samples = 0;
};

/// Random-scan Metropolis chain on Ω(R) targeting the Gibbs distribution.
/// Proposals pick a site uniformly and a value uniformly from V; a sample is
/// recorded after every sweep of |R| proposals, following `burn_in_sweeps`.
MetropolisEstimate metropolis_energy(const Patch& shape, const ValueSet& values,
                                     const MrfModel& model, std::size_t samples,
                                     std::uint64_t seed, std::size_t burn_in_sweeps = 100);

/// ρ = Metropolis estimate of the mean per-pixel energy.
double calibrate_rho(const Patch& shape, const ValueSet& values, const MrfModel& model,
                     std::size_t samples, std::uint64_t seed);

/// G^(2): the neighbourhood system under which U is a Gibbs energy.
Window neighborhood_squared(const Window& g);

}  // namespace mcv
