#include <cmath>
#include <random>

#include "doctest.h"
#include "fujita/errors.hpp"
#include "fujita/heat.hpp"

using namespace fujita;

namespace {

double gaussian_kernel(int n, double t, double r) {
  return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-r * r / (4.0 * t));
}

RadialField gaussian_field(std::shared_ptr<const RadialGrid> g, int n, double t0) {
  RadialField f = zero_field(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    f.values[i] = gaussian_kernel(n, t0, g->centers[i]);
  }
  f.time_stamp = t0;
  return f;
}

}  // namespace

TEST_CASE("grid: weights reproduce ball volumes within 0.5%") {
  VolumeFamily fam{{4.0}, 1.0, 3.0};
  const auto m = ModelManifold::power_log(2, fam, 1.0, 256.0);
  const auto g = build_radial_grid(m, 1024);
  double cum = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    cum += g->weights[i];
    const double v = m.volume(g->faces[i + 1]);
    CHECK(cum == doctest::Approx(v).epsilon(0.005));
  }
  CHECK(g->centers[0] == doctest::Approx(0.5 * g->faces[1]));
  // grading ratio bounded
  for (std::size_t i = 2; i < g->size(); ++i) {
    const double w0 = g->faces[i] - g->faces[i - 1];
    const double w1 = g->faces[i + 1] - g->faces[i];
    CHECK(w1 / w0 <= 1.0501);
  }
}

TEST_CASE("evolve: zero and constants are preserved") {
  const auto m = ModelManifold::euclidean(2, 32.0);
  const auto g = build_radial_grid(m, 512);
  RadialField z = zero_field(g);
  const RadialField z2 = evolve(m, z, 1.0);
  for (double v : z2.values) CHECK(v == 0.0);

  RadialField one = zero_field(g);
  for (auto& v : one.values) v = 1.0;
  const RadialField o2 = evolve(m, one, 0.1);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (g->centers[i] < 16.0) CHECK(o2.values[i] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("evolve: Euclidean n=1 Gaussian flow oracle within 1% at N=4096") {
  const auto m = ModelManifold::euclidean(1, 32.0);
  const auto g = build_radial_grid(m, 4096);
  RadialField u = gaussian_field(g, 1, 0.25);
  const RadialField v = evolve(m, u, 0.75);
  const double sup_exact = gaussian_kernel(1, 1.0, 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    err = std::max(err, std::fabs(v.values[i] - gaussian_kernel(1, 1.0, g->centers[i])));
  }
  CHECK(err / sup_exact < 0.01);
}

TEST_CASE("kernel_at_origin: mass and on-diagonal oracle") {
  for (int n : {1, 2, 3}) {
    const auto m = ModelManifold::euclidean(n, 24.0);
    const auto g = build_radial_grid(m, 4096);
    for (double t : {0.25, 1.0, 4.0}) {
      const RadialField k = kernel_at_origin(m, g, t);
      CHECK(k.mass() <= 1.0 + 1e-6);
      CHECK(k.values[0] ==
            doctest::Approx(gaussian_kernel(n, t, g->centers[0])).epsilon(0.02));
      for (double v : k.values) CHECK(v >= 0.0);
    }
    // small t: mass still ~1
    const RadialField ks = kernel_at_origin(m, g, 1e-3);
    CHECK(ks.mass() == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("verify_condition_H: Euclidean ratios constant ~ phase-space factor") {
  const auto m = ModelManifold::euclidean(2, 32.0);
  const auto g = build_radial_grid(m, 2048);
  const auto rep = verify_condition_H(m, g, {0.25, 1.0, 4.0, 16.0});
  CHECK(rep.bounded);
  for (double r : rep.ratios) CHECK(r == doctest::Approx(0.25).epsilon(0.03));
  CHECK(rep.C1 == doctest::Approx(0.25).epsilon(0.03));
  for (double mm : rep.masses) CHECK(mm <= 1.0 + 1e-6);
}

TEST_CASE("verify_condition_H: V=r^4 manifold ratios bounded over two decades") {
  VolumeFamily fam{{4.0}, 1.0, 3.0};
  const auto m = ModelManifold::power_log(2, fam, 1.0, 400.0);
  const auto g = build_radial_grid(m, 2048);
  const auto rep = verify_condition_H(m, g, {0.5, 2.0, 8.0, 32.0, 50.0});
  CHECK(rep.bounded);
  CHECK(rep.C1 < 10.0);
}

TEST_CASE("kernel guards") {
  const auto m = ModelManifold::euclidean(2, 12.0);
  const auto g = build_radial_grid(m, 256);
  CHECK_THROWS_AS(kernel_at_origin(m, g, 9.0), ValidationError);  // sqrt(t) > R/6
  CHECK_THROWS_AS(kernel_at_origin(m, g, 0.0), ValidationError);
}

TEST_CASE("semigroup defect: small, symmetric, vanishing as s -> 0") {
  const auto m = ModelManifold::euclidean(2, 24.0);
  const auto g = build_radial_grid(m, 4096);
  const double sup2 = kernel_at_origin(m, g, 2.0).sup();
  const double d11 = semigroup_defect(m, g, 1.0, 1.0);
  CHECK(d11 <= 1e-3 * sup2);
  const double d_sym = std::fabs(semigroup_defect(m, g, 0.5, 1.5) -
                                 semigroup_defect(m, g, 1.5, 0.5));
  CHECK(d_sym <= 2e-3 * sup2);
  const double d_small = semigroup_defect(m, g, 1.0, 1e-4);
  CHECK(d_small <= 1e-4 * kernel_at_origin(m, g, 1.0).sup());
}

TEST_CASE("convergence: error vs Gaussian oracle shrinks >= 3.5x per doubling") {
  const auto m = ModelManifold::euclidean(2, 16.0);
  std::vector<double> errs;
  for (int N : {512, 1024, 2048}) {
    const auto g = build_radial_grid(m, N);
    EvolveControls c;
    c.eta = 0.01 * std::pow(512.0 / N, 2.0);
    const RadialField k = kernel_at_origin(m, g, 1.0, c);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      err = std::max(err, std::fabs(k.values[i] - gaussian_kernel(2, 1.0, g->centers[i])));
    }
    errs.push_back(err);
  }
  CHECK(errs[0] / errs[1] >= 3.5);
  CHECK(errs[1] / errs[2] >= 3.5);
}

TEST_CASE("positivity, mass monotonicity, comparison") {
  VolumeFamily fam{{3.0}, 1.0, 3.0};
  const auto m = ModelManifold::power_log(2, fam, 1.0, 64.0);
  const auto g = build_radial_grid(m, 1024);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  RadialField u = zero_field(g), v = zero_field(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    u.values[i] = uni(rng);
    v.values[i] = u.values[i] + uni(rng);  // v >= u
  }
  RadialField ue = u, ve = v;
  double mass_prev = ue.mass();
  for (int step = 0; step < 5; ++step) {
    ue = evolve(m, ue, 0.3);
    ve = evolve(m, ve, 0.3);
    CHECK(ue.min_before_clamp >= -1e-12);
    const double mass_now = ue.mass();
    CHECK(mass_now <= mass_prev * (1.0 + 1e-12));
    mass_prev = mass_now;
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(ue.values[i] <= ve.values[i] + 1e-12);
    }
  }
}
