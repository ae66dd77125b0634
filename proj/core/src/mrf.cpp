#include "mcv/mrf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mcv/random.hpp"

namespace mcv {

MrfModel::MrfModel() : MrfModel(uniform(nine_neighborhood())) {}

MrfModel::MrfModel(Window neighborhood, std::vector<double> weights, Metric metric,
                   double temperature, double rho)
    : neighborhood_(std::move(neighborhood)),
      weights_(std::move(weights)),
      metric_(metric),
      temperature_(temperature),
      rho_(rho) {
  build();
}

MrfModel MrfModel::uniform(Window neighborhood, Metric metric, double temperature, double rho) {
  std::vector<double> weights(neighborhood.size(), 1.0);
  return MrfModel(std::move(neighborhood), std::move(weights), metric, temperature, rho);
}

void MrfModel::build() {
  if (!(temperature_ > 0.0) || !std::isfinite(temperature_))
    throw DomainError("temperature must be positive and finite");
  if (!(rho_ >= 0.0)) throw DomainError("energy threshold must be nonnegative");
  const std::vector<Offset> offsets = neighborhood_.offsets();
  if (weights_.size() != offsets.size())
    throw DomainError("expected " + std::to_string(offsets.size()) + " weights, got " +
                      std::to_string(weights_.size()));
  terms_.clear();
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (!(weights_[k] >= 0.0) || !std::isfinite(weights_[k]))
      throw DomainError("weights must be finite and nonnegative");
    if (offsets[k] == Offset{0, 0}) continue;
    terms_.push_back({offsets[k], weights_[k]});
  }
}

MrfModel MrfModel::with_rho(double rho) const {
  MrfModel m = *this;
  m.rho_ = rho;
  m.build();
  return m;
}

MrfModel MrfModel::with_temperature(double temperature) const {
  MrfModel m = *this;
  m.temperature_ = temperature;
  m.build();
  return m;
}

MrfModel MrfModel::with_metric(Metric metric) const {
  MrfModel m = *this;
  m.metric_ = metric;
  return m;
}

Patch::Patch(Box box, int bands)
    : box_(box),
      bands_(bands),
      values_(static_cast<std::size_t>(box.width()) * static_cast<std::size_t>(box.height()) *
                  static_cast<std::size_t>(bands),
              0.0),
      present_(static_cast<std::size_t>(box.width()) * static_cast<std::size_t>(box.height()), 0) {
  if (bands < 1) throw DomainError("patch must have at least one band");
}

Patch Patch::from_rows(int width, int height, int bands, std::vector<double> values) {
  if (width < 1 || height < 1) throw DomainError("patch dimensions must be positive");
  Patch p(Box{0, width - 1, 0, height - 1}, bands);
  if (values.size() != p.values_.size()) throw DomainError("patch value count mismatch");
  p.values_ = std::move(values);
  std::fill(p.present_.begin(), p.present_.end(), std::uint8_t{1});
  return p;
}

void Patch::set(Offset o, std::span<const double> v) {
  if (!in_box(o)) throw DomainError("offset outside patch box");
  if (v.size() != static_cast<std::size_t>(bands_)) throw DomainError("band count mismatch");
  const std::size_t c = cell(o);
  std::copy(v.begin(), v.end(), value(c).begin());
  present_[c] = 1;
}

std::size_t Patch::region_size() const noexcept {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

Patch Patch::shifted(double c) const {
  Patch out = *this;
  for (std::size_t k = 0; k < cell_count(); ++k)
    if (present(k))
      for (double& v : out.value(k)) v += c;
  return out;
}

Patch Patch::scaled(double a) const {
  Patch out = *this;
  for (std::size_t k = 0; k < cell_count(); ++k)
    if (present(k))
      for (double& v : out.value(k)) v *= a;
  return out;
}

Patch extract_patch(const ImageBuffer& image, Pixel x, const Window& w) {
  image.lattice.require(x);
  Patch patch(w.bounds(), image.bands);
  w.for_each_clipped(x, image.lattice, [&](Pixel y) {
    patch.set(Offset{y.col - x.col, y.row - x.row}, image.pixel(y));
  });
  return patch;
}

double pixel_energy(const Patch& patch, std::size_t cell, const MrfModel& model) {
  if (!patch.present(cell)) return 0.0;
  constexpr int kInlineBands = 8;
  const int bands = patch.bands();
  std::array<double, kInlineBands> inline_dev{};
  std::vector<double> heap_dev;
  double* dev = inline_dev.data();
  if (bands > kInlineBands) {
    heap_dev.assign(static_cast<std::size_t>(bands), 0.0);
    dev = heap_dev.data();
  }

  // The deviation is accumulated from pairwise differences ω(x) - ω(y) so that
  // adding a constant to the patch leaves every intermediate unchanged.
  const Offset x = patch.offset(cell);
  const auto vx = patch.value(cell);
  double wsum = 0.0;
  for (const WeightedOffset& t : model.terms()) {
    const Offset y = x + t.offset;
    if (!patch.present(y)) continue;
    const auto vy = patch.value(patch.cell(y));
    wsum += t.weight;
    for (int b = 0; b < bands; ++b) dev[b] += t.weight * (vx[b] - vy[b]);
  }
  if (wsum == 0.0) return 0.0;

  if (model.metric() == Metric::euclidean) {
    double sq = 0.0;
    for (int b = 0; b < bands; ++b) {
      const double d = dev[b] / wsum;
      sq += d * d;
    }
    return sq;
  }
  double l1 = 0.0;
  for (int b = 0; b < bands; ++b) l1 += std::abs(dev[b] / wsum);
  return l1 * l1;
}

double energy(const Patch& patch, const MrfModel& model) {
  double u = 0.0;
  bool any = false;
  for (std::size_t c = 0; c < patch.cell_count(); ++c) {
    if (!patch.present(c)) continue;
    any = true;
    u += pixel_energy(patch, c, model);
  }
  if (!any) throw DomainError("energy of an empty region");
  return u;
}

bool evaluate(const Patch& patch, const MrfModel& model) {
  const double u = energy(patch, model);
  return u / static_cast<double>(patch.region_size()) <= model.rho();
}

ValueSet ValueSet::list(std::vector<std::vector<double>> values) {
  if (values.empty()) throw DomainError("value set must be nonempty");
  ValueSet v;
  v.bands_ = static_cast<int>(values.front().size());
  if (v.bands_ < 1) throw DomainError("values must have at least one band");
  for (const auto& e : values)
    if (e.size() != values.front().size()) throw DomainError("values must share a band count");
  v.list_ = std::move(values);
  return v;
}

ValueSet ValueSet::scalars(std::vector<double> values) {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (double s : values) rows.push_back({s});
  return list(std::move(rows));
}

ValueSet ValueSet::grid(int bands, std::uint32_t levels) {
  if (bands < 1 || levels < 1) throw DomainError("grid value set must be nonempty");
  ValueSet v;
  v.bands_ = bands;
  v.levels_ = levels;
  return v;
}

std::uint64_t ValueSet::size() const noexcept {
  if (!list_.empty()) return list_.size();
  std::uint64_t n = 1;
  for (int b = 0; b < bands_; ++b) {
    if (n > std::numeric_limits<std::uint64_t>::max() / levels_)
      return std::numeric_limits<std::uint64_t>::max();
    n *= levels_;
  }
  return n;
}

void ValueSet::value(std::uint64_t index, std::span<double> out) const {
  if (!list_.empty()) {
    std::copy(list_[index].begin(), list_[index].end(), out.begin());
    return;
  }
  for (int b = bands_ - 1; b >= 0; --b) {
    out[static_cast<std::size_t>(b)] = static_cast<double>(index % levels_);
    index /= levels_;
  }
}

namespace {

std::vector<std::size_t> present_cells(const Patch& shape) {
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < shape.cell_count(); ++c)
    if (shape.present(c)) cells.push_back(c);
  return cells;
}

void check_bands(const Patch& shape, const ValueSet& values) {
  if (shape.bands() != values.bands())
    throw DomainError("value set band count does not match patch");
}

}  // namespace

std::vector<std::uint64_t> GibbsTable::state(std::uint64_t k) const {
  std::vector<std::uint64_t> digits(sites);
  for (std::size_t s = 0; s < sites; ++s) {
    digits[s] = k % value_count;
    k /= value_count;
  }
  return digits;
}

double GibbsTable::tau_for_rho(double rho) const {
  return std::exp(-(rho - min_energy) / temperature) / scaled_partition;
}

double GibbsTable::expected_energy() const {
  double e = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) e += probabilities[k] * energies[k];
  return e;
}

GibbsTable gibbs_distribution(const Patch& shape, const ValueSet& values, const MrfModel& model) {
  check_bands(shape, values);
  const std::vector<std::size_t> cells = present_cells(shape);
  if (cells.empty()) throw DomainError("gibbs_distribution: empty region");
  const std::uint64_t v = values.size();
  std::uint64_t states = 1;
  for (std::size_t s = 0; s < cells.size(); ++s) {
    if (states > kMaxGibbsStates / v)
      throw CapacityError("gibbs_distribution: state space exceeds 2^20 configurations");
    states *= v;
  }

  GibbsTable table;
  table.sites = cells.size();
  table.value_count = v;
  table.temperature = model.temperature();
  table.energies.resize(states);
  table.probabilities.resize(states);

  Patch work = shape;
  for (std::uint64_t k = 0; k < states; ++k) {
    std::uint64_t rest = k;
    for (std::size_t c : cells) {
      values.value(rest % v, work.value(c));
      rest /= v;
    }
    table.energies[k] = energy(work, model);
  }

  table.min_energy = *std::min_element(table.energies.begin(), table.energies.end());
  double z = 0.0;
  for (std::uint64_t k = 0; k < states; ++k) {
    table.probabilities[k] = std::exp(-(table.energies[k] - table.min_energy) / table.temperature);
    z += table.probabilities[k];
  }
  for (double& p : table.probabilities) p /= z;
  table.scaled_partition = z;
  return table;
}

bool tau_rho_consistency(const Patch& shape, const ValueSet& values, const MrfModel& model) {
  const GibbsTable table = gibbs_distribution(shape, values, model);
  const double rho = model.rho();
  // π(ω) >= τ tested as log(π(ω)/τ) = (ρ - U(ω))/T >= 0. Comparing π and τ directly
  // underflows to 0 >= 0 once the energy range exceeds ~745·T, and rounding the two
  // exponents separately can tie energies that differ in the last bit.
  for (std::size_t k = 0; k < table.energies.size(); ++k) {
    const bool by_probability = (rho - table.energies[k]) / table.temperature >= 0.0;
    const bool by_energy = table.energies[k] <= rho;
    if (by_probability != by_energy) return false;
  }
  return true;
}

MetropolisEstimate metropolis_energy(const Patch& shape, const ValueSet& values,
                                     const MrfModel& model, std::size_t samples,
                                     std::uint64_t seed, std::size_t burn_in_sweeps) {
  if (samples < 1) throw DomainError("metropolis_energy: need at least one sample");
  check_bands(shape, values);
  const std::vector<std::size_t> cells = present_cells(shape);
  if (cells.empty()) throw DomainError("metropolis_energy: empty region");

  Rng rng(seed);
  const std::uint64_t v = values.size();
  Patch state = shape;
  for (std::size_t c : cells) values.value(rng.below(v), state.value(c));

  const auto bands = static_cast<std::size_t>(shape.bands());
  std::vector<double> saved(bands);
  std::vector<std::size_t> affected;
  auto local_energy = [&](std::size_t c) {
    // Terms that read cell c: c itself and every cell having c as a neighbour.
    affected.clear();
    affected.push_back(c);
    const Offset at = state.offset(c);
    for (const WeightedOffset& t : model.terms()) {
      const Offset y{at.dx - t.offset.dx, at.dy - t.offset.dy};
      if (state.present(y)) affected.push_back(state.cell(y));
    }
    double e = 0.0;
    for (std::size_t a : affected) e += pixel_energy(state, a, model);
    return e;
  };

  const double size = static_cast<double>(cells.size());
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  auto sweep = [&] {
    for (std::size_t step = 0; step < cells.size(); ++step) {
      const std::size_t c = cells[rng.below(cells.size())];
      const std::uint64_t proposal = rng.below(v);
      const double before = local_energy(c);
      auto cur = state.value(c);
      std::copy(cur.begin(), cur.end(), saved.begin());
      values.value(proposal, cur);
      const double delta = local_energy(c) - before;
      ++proposals;
      if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / model.temperature())) {
        ++accepted;
      } else {
        std::copy(saved.begin(), saved.end(), cur.begin());
      }
    }
  };

  for (std::size_t s = 0; s < burn_in_sweeps; ++s) sweep();
  proposals = 0;
  accepted = 0;

  std::vector<double> trace(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    sweep();
    trace[s] = energy(state, model) / size;
  }

  MetropolisEstimate est;
  est.samples = samples;
  double sum = 0.0;
  for (double t : trace) sum += t;
  est.mean = sum / static_cast<double>(samples);
  est.acceptance_rate = proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;

  const std::size_t batches = samples >= 40 ? 20 : samples;
  const std::size_t batch_len = samples / batches;
  if (batches >= 2) {
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t k = 0; k < batch_len; ++k) means[b] += trace[b * batch_len + k];
      means[b] /= static_cast<double>(batch_len);
    }
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(batches);
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(batches - 1);
    est.std_error = std::sqrt(var / static_cast<double>(batches));
  }
  return est;
}

double calibrate_rho(const Patch& shape, const ValueSet& values, const MrfModel& model,
                     std::size_t samples, std::uint64_t seed) {
  return metropolis_energy(shape, values, model, samples, seed).mean;
}

Window neighborhood_squared(const Window& g) { return dilate(g, 2); }

}  // namespace mcv
