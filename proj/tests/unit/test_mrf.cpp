#include "doctest.h"
#include "mcv/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles.hpp"

using namespace mcv;

namespace {

Patch row(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return Patch::from_rows(n, 1, 1, std::move(v));
}

MrfModel model8(double rho = 0.0, Metric m = Metric::euclidean) {
  return MrfModel::uniform(nine_neighborhood(), m, 1.0, rho);
}

Patch random_patch(Rng& rng, int w, int h, int bands, unsigned levels) {
  std::vector<double> v(static_cast<std::size_t>(w * h * bands));
  for (double& s : v) s = static_cast<double>(rng.below(levels));
  return Patch::from_rows(w, h, bands, std::move(v));
}

}  // namespace

TEST_CASE("energy ground truths") {
  CHECK(energy(Patch::from_rows(4, 3, 1, std::vector<double>(12, 17.0)), model8()) == 0.0);
  CHECK(energy(row({0, 1, 0}), model8()) == 3.0);
  CHECK(energy(row({0, 1, 2, 3}), model8()) == 2.0);
  CHECK(energy(row({5}), model8()) == 0.0);  // isolated pixel
  CHECK_THROWS_AS(energy(Patch(Box{0, 2, 0, 0}, 1), model8()), DomainError);
}

TEST_CASE("energy matches the scalar oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(7));
    const int h = 1 + static_cast<int>(rng.below(7));
    Patch p = random_patch(rng, w, h, 1, 256);
    std::vector<bool> present(static_cast<std::size_t>(w * h), true);
    std::vector<double> values(static_cast<std::size_t>(w * h));
    for (std::size_t c = 0; c < p.cell_count(); ++c) {
      values[c] = p.value(c)[0];
      if (rng.below(5) == 0) {
        present[c] = false;
        p.set_present(c, false);
      }
    }
    if (p.region_size() == 0) continue;
    const double want = oracle::scalar_energy(values, w, h, present);
    CHECK(energy(p, model8()) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("metrics on multi-band patches") {
  const Patch rgb = Patch::from_rows(2, 1, 3, {0, 0, 0, 1, 2, 2});
  CHECK(energy(rgb, model8(0, Metric::euclidean)) == 18.0);
  CHECK(energy(rgb, model8(0, Metric::per_band_abs)) == 50.0);
  // Single band: both metrics coincide.
  Rng rng(2);
  const Patch grey = random_patch(rng, 5, 5, 1, 50);
  CHECK(energy(grey, model8(0, Metric::euclidean)) == energy(grey, model8(0, Metric::per_band_abs)));
}

TEST_CASE("energy invariants") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int bands = rng.below(2) ? 3 : 1;
    const Patch p = random_patch(rng, 2 + static_cast<int>(rng.below(6)), 2 + static_cast<int>(rng.below(6)), bands, 256);
    for (Metric m : {Metric::euclidean, Metric::per_band_abs}) {
      const MrfModel model = model8(0, m);
      const double u = energy(p, model);
      CHECK(u >= 0.0);
      const double c = static_cast<double>(rng.below(1000)) - 500.0;
      CHECK(energy(p.shifted(c), model) == u);
    }
    if (bands == 1) {
      const double a = 0.25 + rng.uniform01() * 7.0;
      const double u = energy(p, model8());
      CHECK(energy(p.scaled(a), model8()) == doctest::Approx(a * a * u).epsilon(1e-9));
    }
  }
}

TEST_CASE("weights are renormalized over in-region neighbours") {
  // Non-uniform weights: the left neighbour counts 3x the right one.
  const Window g({{-1, 0}, {0, 0}, {1, 0}});
  const MrfModel m(g, {3.0, 0.0, 1.0}, Metric::euclidean, 1.0, 0.0);
  // Centre predicts (3*0 + 1*4)/4 = 1 -> (2-1)^2; ends see one neighbour each.
  CHECK(energy(row({0, 2, 4}), m) == doctest::Approx(4.0 + 1.0 + 4.0));
  CHECK_THROWS_AS(MrfModel(g, {1.0, 1.0}, Metric::euclidean, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(MrfModel(g, {1.0, -1.0, 1.0}, Metric::euclidean, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(MrfModel::uniform(g, Metric::euclidean, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(MrfModel::uniform(g, Metric::euclidean, 1.0, -1.0), DomainError);
}

TEST_CASE("evaluate") {
  CHECK(evaluate(row({9, 9, 9}), model8(0.0)));
  std::vector<double> alt(9);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 255.0 : 0.0;
  // Per-pixel energy 65025 from the independent 1-D calculation.
  CHECK(energy(row(alt), model8()) / 9.0 == 65025.0);
  CHECK_FALSE(evaluate(row(alt), model8(100.0)));
  CHECK(evaluate(row(alt), model8(std::numeric_limits<double>::max())));

  Rng rng(9);
  const Patch p = random_patch(rng, 5, 5, 1, 30);
  bool previous = false;
  for (double rho = 0.0; rho < 400.0; rho += 3.0) {
    const bool now = evaluate(p, model8(rho));
    CHECK((!previous || now));
    previous = now;
  }
}

TEST_CASE("extract_patch clips to the lattice") {
  ImageBuffer img(Lattice(4, 4), 1, 255);
  for (std::size_t i = 0; i < img.samples.size(); ++i) img.samples[i] = static_cast<double>(i);
  const Patch p = extract_patch(img, {1, 1}, square_window(1));
  CHECK(p.region_size() == 4);
  CHECK(p.value(p.cell({0, 0}))[0] == 0.0);
  CHECK(p.value(p.cell({1, 1}))[0] == 5.0);
  CHECK_FALSE(p.present(Offset{-1, 0}));
}

TEST_CASE("gibbs_distribution") {
  const ValueSet bits = ValueSet::scalars({0, 1});
  const GibbsTable single = gibbs_distribution(row({0}), ValueSet::scalars({0, 1, 2}), model8());
  for (double p : single.probabilities) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const GibbsTable t = gibbs_distribution(row({0, 0}), bits, model8());
  // States in mixed radix, first site fastest: 00, 10, 01, 11 with U = 0, 2, 2, 0.
  CHECK(t.energies == std::vector<double>{0, 2, 2, 0});
  const double z = 2.0 + 2.0 * std::exp(-2.0);
  CHECK(t.probabilities[0] == doctest::Approx(1.0 / z).epsilon(1e-15));
  CHECK(t.probabilities[1] == doctest::Approx(std::exp(-2.0) / z).epsilon(1e-15));
  CHECK(t.probabilities[0] == t.probabilities[3]);
  CHECK(t.probabilities[1] == t.probabilities[2]);
  CHECK(t.probabilities[0] > t.probabilities[1]);

  // Doubling values scales U by 4; a 4x temperature gives the same table.
  const GibbsTable scaled =
      gibbs_distribution(row({0, 0}), ValueSet::scalars({0, 2}), model8().with_temperature(4.0));
  for (std::size_t k = 0; k < 4; ++k) CHECK(scaled.probabilities[k] == doctest::Approx(t.probabilities[k]).epsilon(1e-15));

  double sum = 0.0;
  const GibbsTable big = gibbs_distribution(Patch::from_rows(4, 2, 1, std::vector<double>(8)),
                                            ValueSet::scalars({0, 1, 3, 4}), model8());
  for (double p : big.probabilities) sum += p;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  for (std::size_t i = 0; i < big.energies.size(); ++i)
    for (std::size_t j = 0; j < big.energies.size(); j += 37)
      if (big.energies[i] < big.energies[j]) CHECK(big.probabilities[i] > big.probabilities[j]);

  CHECK_THROWS_AS(gibbs_distribution(Patch::from_rows(21, 1, 1, std::vector<double>(21)), bits, model8()),
                  CapacityError);
}

TEST_CASE("tau_rho_consistency") {
  const ValueSet bits = ValueSet::scalars({0, 1});
  const Patch shape = Patch::from_rows(2, 2, 1, std::vector<double>(4));
  const GibbsTable t = gibbs_distribution(shape, bits, model8());

  // ρ = 0 accepts exactly the zero-energy states.
  const double tau0 = t.tau_for_rho(0.0);
  for (std::size_t k = 0; k < t.energies.size(); ++k)
    CHECK((t.probabilities[k] >= tau0) == (t.energies[k] == 0.0));
  CHECK(tau_rho_consistency(shape, bits, model8(0.0)));

  const double umax = *std::max_element(t.energies.begin(), t.energies.end());
  const double taumax = t.tau_for_rho(umax);
  for (double p : t.probabilities) CHECK(p >= taumax);
  CHECK(tau_rho_consistency(shape, bits, model8(umax)));

  std::vector<double> sorted = t.energies;
  std::sort(sorted.begin(), sorted.end());
  CHECK(tau_rho_consistency(shape, bits, model8(sorted[sorted.size() / 2])));
  CHECK(tau_rho_consistency(row({0, 0}), bits, model8(1.0)));
}

TEST_CASE("Metropolis calibration") {
  CHECK(calibrate_rho(row({0, 0, 0}), ValueSet::scalars({4}), model8(), 100, 1) == 0.0);

  const ValueSet bits = ValueSet::scalars({0, 1});
  CHECK(calibrate_rho(row({0, 0}), bits, model8(), 500, 7) ==
        calibrate_rho(row({0, 0}), bits, model8(), 500, 7));

  const GibbsTable t = gibbs_distribution(row({0, 0}), bits, model8());
  const double exact = t.expected_energy() / 2.0;
  CHECK(exact == doctest::Approx(0.11920292202211755).epsilon(1e-14));
  const MetropolisEstimate est = metropolis_energy(row({0, 0}), bits, model8(), 20000, 99);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
  CHECK(est.acceptance_rate > 0.0);
  CHECK(est.acceptance_rate <= 1.0);
  CHECK_THROWS_AS(metropolis_energy(row({0, 0}), bits, model8(), 0, 1), DomainError);
}

TEST_CASE("Metropolis on a larger enumerable model") {
  const Patch shape = Patch::from_rows(3, 2, 1, std::vector<double>(6));
  const ValueSet vals = ValueSet::scalars({0, 1, 2});
  const MrfModel m = model8().with_temperature(2.0);
  const double exact = gibbs_distribution(shape, vals, m).expected_energy() / 6.0;
  const MetropolisEstimate est = metropolis_energy(shape, vals, m, 20000, 5);
  CHECK(std::abs(est.mean - exact) <= 4.0 * est.std_error);
}

TEST_CASE("neighborhood_squared") {
  CHECK(neighborhood_squared(nine_neighborhood()) == square_window(2));
  CHECK(neighborhood_squared(Window()) == Window());
  const Window pair({{-1, 0}, {0, 0}, {1, 0}});
  CHECK(neighborhood_squared(pair) == Window::box({-2, 2, 0, 0}));
}

TEST_CASE("ValueSet grid decoding") {
  const ValueSet rgb = ValueSet::grid(3, 4);
  CHECK(rgb.size() == 64);
  std::vector<double> v(3);
  rgb.value(4 * 4 * 1 + 4 * 2 + 3, v);
  CHECK(v == std::vector<double>{1, 2, 3});
}
