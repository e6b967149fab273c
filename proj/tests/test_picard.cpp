#include <cmath>
#include <random>

#include "doctest.h"
#include "fujita/errors.hpp"
#include "fujita/picard.hpp"

using namespace fujita;

namespace {

const ModelManifold& plane() {
  static const ModelManifold m = ModelManifold::euclidean(2, 384.0);
  return m;
}

BallParams ball(double p, BallOptions opts = {}) { return make_ball_params(plane(), p, 2.0, opts); }

double theory_bound(double p, const BallParams& b) {
  return p * std::pow(b.lambda * b.C1, p - 1.0) * b.C4;
}

}  // namespace

TEST_CASE("estimate_C4: closed-form oracle and divergence guards") {
  // int_0^inf (pi (s+2))^{-2} ds = 1/(2 pi^2)
  CHECK(estimate_C4(plane(), 3.0, 2.0) ==
        doctest::Approx(1.0 / (2.0 * M_PI * M_PI)).epsilon(1e-4));
  CHECK_THROWS_AS(estimate_C4(ModelManifold::euclidean(1, 64.0), 2.0, 2.0), DivergentIntegral);
  CHECK_THROWS_AS(estimate_C4(plane(), 2.0, 2.0), DivergentIntegral);  // p = p* exactly
  CHECK_THROWS_AS(estimate_C4(plane(), 3.0, 0.5), ValidationError);
}

TEST_CASE("estimate_C4: decreases to zero as delta grows") {
  double prev = 1e300;
  for (double delta : {2.0, 8.0, 32.0, 128.0}) {
    const double v = estimate_C4(plane(), 3.0, delta);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
  // works on a spliced family too: V ~ r^4, p = 2 > p* = 1.5
  VolumeFamily fam{{4.0}, 1.0, 3.0};
  const auto m4 = ModelManifold::power_log(2, fam, 1.0, 288.0);
  const double v4 = estimate_C4(m4, 2.0, 2.0);
  CHECK(v4 > 0.0);
  CHECK(v4 < 10.0);
}

TEST_CASE("ball parameters satisfy both smallness constraints") {
  for (double p : {2.5, 3.0, 4.0}) {
    const BallParams b = ball(p);
    CHECK(b.lambda > 0.0);
    const double base = std::pow(b.lambda * b.C1, p - 1.0) * b.C4;
    CHECK(base <= 0.5);
    CHECK(p * base < 1.0);
    CHECK(b.C1 == doctest::Approx(0.25).epsilon(0.03));  // Euclidean n=2 phase factor
  }
}

TEST_CASE("context kernel slices agree with directly computed kernels") {
  const BallParams b = ball(3.0);
  const auto& ts = b.ctx->times();
  for (std::size_t j : {std::size_t(0), ts.size() / 2, ts.size() - 1}) {
    const RadialField direct = kernel_at_origin(plane(), b.ctx->grid(), ts[j] + b.delta);
    const auto& slice = b.ctx->kernel_slice(j);
    const double sup = direct.sup();
    double err = 0.0;
    for (std::size_t i = 0; i < slice.size(); ++i) {
      err = std::max(err, std::fabs(slice[i] - direct.values[i]));
    }
    CHECK(err <= 0.01 * sup);
  }
}

TEST_CASE("apply_T: zero field gives the pure heat term; zero data gives zero") {
  const BallParams b = ball(3.0);
  const auto u0 = InitialData::gaussian(0.05, 1.0);
  const SpaceTimeField zero_field_st = b.ctx->empty_field();

  SpaceTimeField heat_only = apply_T(plane(), 3.0, u0, zero_field_st, b);
  const auto& ts = b.ctx->times();
  // against an independently scheduled evolution of the same data
  RadialField ref = u0.realize(b.ctx->grid());
  const RadialField evolved = evolve(plane(), ref, ts.back());
  double err = 0.0;
  for (std::size_t i = 0; i < evolved.values.size(); ++i) {
    err = std::max(err, std::fabs(heat_only.values.back()[i] - evolved.values[i]));
  }
  CHECK(err <= 0.02 * evolved.sup());

  const auto zero_data = InitialData::gaussian(0.0, 1.0);
  SpaceTimeField all_zero = apply_T(plane(), 3.0, zero_data, zero_field_st, b);
  CHECK(all_zero.sup() == 0.0);
}

TEST_CASE("apply_T maps the envelope to at most half the envelope (Duhamel part)") {
  const BallParams b = ball(3.0);
  const SpaceTimeField env = b.envelope();
  const auto zero_data = InitialData::gaussian(0.0, 1.0);
  const SpaceTimeField duhamel = apply_T(plane(), 3.0, zero_data, env, b);
  for (std::size_t j = 0; j < env.values.size(); ++j) {
    for (std::size_t i = 0; i < env.values[j].size(); ++i) {
      CHECK(duhamel.values[j][i] <= 0.5 * env.values[j][i] * (1.0 + 1e-6) + 1e-30);
    }
  }
}

TEST_CASE("apply_T rejects out-of-ball inputs") {
  const BallParams b = ball(3.0);
  SpaceTimeField too_big = b.envelope();
  for (auto& slice : too_big.values) {
    for (auto& v : slice) v *= 1.1;
  }
  CHECK_THROWS_AS(apply_T(plane(), 3.0, InitialData::gaussian(0.0, 1.0), too_big, b),
                  EnvelopeViolation);
  // u0 above (lambda/2) K_delta
  const double k_sup = 1.0 / (8.0 * M_PI);  // K_2(0,0) on the plane
  const auto big_u0 = InitialData::gaussian(b.lambda * k_sup, 1.0);
  CHECK_THROWS_AS(apply_T(plane(), 3.0, big_u0, b.ctx->empty_field(), b), EnvelopeViolation);
}

TEST_CASE("fixed point: trivial data, monotone convergence, contraction bound") {
  const BallParams b = ball(3.0);
  auto trivial = iterate_to_fixed_point(plane(), 3.0, InitialData::gaussian(0.0, 1.0), b);
  CHECK(trivial.solution.sup() == 0.0);
  CHECK(trivial.iterations == 1);

  const auto u0 = InitialData::gaussian(0.05, 1.0);
  auto res = iterate_to_fixed_point(plane(), 3.0, u0, b, 1e-10);
  CHECK(res.final_residual <= 2e-10);
  CHECK(res.solution.sup() > 0.0);
  const double bound = theory_bound(3.0, b);
  for (double f : res.contraction_history) CHECK(f <= bound + 0.05);
  // positive wherever the heat evolution of u0 is positive: interior nodes
  const auto& last = res.solution.values.back();
  for (std::size_t i = 0; i < last.size() / 2; ++i) CHECK(last[i] > 0.0);
}

TEST_CASE("fixed point matches the direct solver within 5% on t <= 10") {
  const BallParams b = ball(3.0);
  const auto u0 = InitialData::gaussian(0.05, 1.0);
  auto res = iterate_to_fixed_point(plane(), 3.0, u0, b, 1e-10);

  SimControls c;
  c.eta = 0.005;
  c.horizon = 11.0;
  const auto& ts = b.ctx->times();
  for (double t : ts) {
    if (t > 0.0 && t <= 10.0) c.record_times.push_back(t);
  }
  auto sim = simulate_on_grid(plane(), 3.0, u0, b.ctx->grid(), c);
  REQUIRE(sim.snapshot_times.size() >= 8);
  for (std::size_t s = 0; s < sim.snapshot_times.size(); ++s) {
    const double t = sim.snapshot_times[s];
    const std::size_t j =
        static_cast<std::size_t>(std::find(ts.begin(), ts.end(), t) - ts.begin());
    REQUIRE(j < ts.size());
    const double sup_sim = sim.snapshots[s].sup();
    double sup_fix = 0.0;
    for (double v : res.solution.values[j]) sup_fix = std::max(sup_fix, v);
    CHECK(std::fabs(sup_sim - sup_fix) <= 0.05 * sup_sim);
  }
}

TEST_CASE("contraction factors: guards, Monte Carlo bound, lambda scaling") {
  BallOptions opts;
  opts.cells = 1024;
  const BallParams b = ball(3.0, opts);
  const SpaceTimeField env = b.envelope();

  CHECK_THROWS_AS(contraction_factor(plane(), 3.0, env, env, b), ZeroDistance);

  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double bound = theory_bound(3.0, b);
  const auto draw = [&] {
    SpaceTimeField u = b.ctx->empty_field();
    for (std::size_t j = 0; j < u.values.size(); ++j) {
      const auto& k = b.ctx->kernel_slice(j);
      for (std::size_t i = 0; i < u.values[j].size(); ++i) {
        u.values[j][i] = uni(rng) * b.lambda * k[i];
      }
    }
    return u;
  };

  int ok = 0;
  const int draws = 200;
  std::vector<double> factors;
  for (int d = 0; d < draws; ++d) {
    const SpaceTimeField u1 = draw(), u2 = draw();
    const double f = contraction_factor(plane(), 3.0, u1, u2, b);
    factors.push_back(f);
    if (f <= bound + 0.05) ++ok;
  }
  CHECK(ok >= 198);  // >= 99%

  // Halving lambda scales the bound by 2^{-(p-1)}; empirical factors of
  // correspondingly shrunk pairs track that scaling.
  BallParams half = b;
  half.lambda *= 0.5;
  std::mt19937 rng2(2026);
  const auto redraw_half = [&] {
    SpaceTimeField u = b.ctx->empty_field();
    for (std::size_t j = 0; j < u.values.size(); ++j) {
      const auto& k = b.ctx->kernel_slice(j);
      for (std::size_t i = 0; i < u.values[j].size(); ++i) {
        u.values[j][i] = uni(rng2) * half.lambda * k[i];
      }
    }
    return u;
  };
  for (int d = 0; d < 20; ++d) {
    const SpaceTimeField u1 = redraw_half(), u2 = redraw_half();
    const double f = contraction_factor(plane(), 3.0, u1, u2, half);
    const double expect = factors[d] * std::pow(0.5, 2.0);  // p - 1 = 2
    CHECK(f == doctest::Approx(expect).epsilon(0.25));
  }
}
