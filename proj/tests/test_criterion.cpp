#include <cmath>

#include "doctest.h"
#include "fujita/criterion.hpp"
#include "fujita/errors.hpp"

using namespace fujita;

TEST_CASE("integral_tail closed forms") {
  // V(t) = t^2, p = 2: integrand 1/t, integral over [1, e] is 1.
  CHECK(integral_tail([](double t) { return t * t; }, 2.0, 1.0, M_E) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // V(t) = t, p = 2: integrand 1, integral over [1, 10] is 9.
  CHECK(integral_tail([](double t) { return t; }, 2.0, 1.0, 10.0) ==
        doctest::Approx(9.0).epsilon(1e-9));
  // V(t) = t^3, p = 2: integrand t^-2, integral to infinity is 1.
  CHECK(integral_tail([](double t) { return t * t * t; }, 2.0, 1.0, 1e9) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integral_tail guards") {
  CHECK_THROWS_AS(integral_tail([](double) { return 0.0; }, 2.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(integral_tail([](double t) { return t; }, 1.0, 1.0, 2.0), ValidationError);
  CHECK_THROWS_AS(integral_tail([](double t) { return t; }, 2.0, 2.0, 1.0), ValidationError);
}

TEST_CASE("classify: paper borderline cases") {
  // Euclidean n, p = 1 + 2/n: alpha1 (p-1) = 2 exactly -> divergent
  for (int n : {1, 2, 3}) {
    VolumeFamily fam{{static_cast<double>(n)}, sphere_area(n) / n, 3.0};
    const double p = 1.0 + 2.0 / n;
    CHECK(classify(fam, p).kind == VerdictKind::Divergent);
  }
  // alpha1 = 2/(p-1), alpha2 = 1/(p-1) -> divergent for any p
  for (double p : {1.5, 2.0, 3.0}) {
    VolumeFamily fam{{2.0 / (p - 1.0), 1.0 / (p - 1.0)}, 1.0, 5.0};
    CHECK(classify(fam, p).kind == VerdictKind::Divergent);
  }
  // alpha1(p-1) = 2, alpha2(p-1) = 1.5 -> convergent
  {
    const double p = 2.0;
    VolumeFamily fam{{2.0, 1.5}, 1.0, 5.0};
    CHECK(classify(fam, p).kind == VerdictKind::Convergent);
  }
  // three borderline factors -> still divergent
  {
    const double p = 2.0;
    VolumeFamily fam{{2.0, 1.0, 1.0}, 1.0, 20.0};
    CHECK(classify(fam, p).kind == VerdictKind::Divergent);
  }
}

TEST_CASE("classify: scale invariance and monotonicity in p") {
  VolumeFamily fam{{3.0}, 1.0, 3.0};
  for (double p : {1.3, 5.0 / 3.0, 2.5}) {
    for (double c : {1e-6, 1.0, 1e6}) {
      VolumeFamily scaled = fam;
      scaled.constant = c;
      CHECK(classify(scaled, p).kind == classify(fam, p).kind);
    }
  }
  bool seen_convergent = false;
  for (double p = 1.1; p < 4.0; p += 0.1) {
    const auto k = classify(fam, p).kind;
    if (seen_convergent) CHECK(k == VerdictKind::Convergent);
    if (k == VerdictKind::Convergent) seen_convergent = true;
  }
  CHECK(seen_convergent);
}

TEST_CASE("fujita_exponent") {
  CHECK(fujita_exponent(VolumeFamily{{3.0}, 1.0, 3.0}) == doctest::Approx(5.0 / 3.0));
  CHECK(fujita_exponent(VolumeFamily{{2.0}, 1.0, 3.0}) == doctest::Approx(2.0));
  // oracle: classify flips across p* = 1.5 for alpha1 = 4
  VolumeFamily fam{{4.0}, 1.0, 3.0};
  CHECK(fujita_exponent(fam) == doctest::Approx(1.5));
  CHECK(classify(fam, 1.49).kind == VerdictKind::Divergent);
  CHECK(classify(fam, 1.51).kind == VerdictKind::Convergent);
}

TEST_CASE("classify_numeric: Euclidean verdicts") {
  const auto m1 = ModelManifold::euclidean(1, 1 << 14);
  const auto m2 = ModelManifold::euclidean(2, 1 << 14);
  CHECK(classify_numeric(m2, 2.0, 1.0).kind == VerdictKind::Divergent);
  CHECK(classify_numeric(m2, 3.0, 1.0).kind == VerdictKind::Convergent);
  CHECK(classify_numeric(m1, 2.0, 1.0).kind == VerdictKind::Divergent);
}

TEST_CASE("classify_numeric agrees with classify at p* and p* +/- 0.2") {
  struct Case {
    int n;
    std::vector<double> exps;
  };
  // Euclidean n = 2, 3 realized as power-log manifolds, plus V = r^3, r^4.
  const std::vector<Case> cases = {{2, {2.0}}, {3, {3.0}}, {2, {3.0}}, {2, {4.0}}};
  for (const auto& c : cases) {
    VolumeFamily fam{c.exps, 1.0, 3.0};
    const auto m = ModelManifold::power_log(c.n, fam, 1.0, 1 << 15);
    const double ps = fujita_exponent(fam);
    for (double p : {ps - 0.2, ps, ps + 0.2}) {
      const auto sym = classify(fam, p).kind;
      const auto num = classify_numeric(m, p, 16.0).kind;
      CAPTURE(c.exps[0]);
      CAPTURE(p);
      CHECK(num == sym);
    }
  }
}

TEST_CASE("classify_numeric: r0 invariance") {
  const auto m = ModelManifold::euclidean(2, 1 << 14);
  for (double p : {1.6, 2.0, 2.6}) {
    const auto base = classify_numeric(m, p, 1.0).kind;
    for (double r0 : {0.5, 4.0, 32.0}) {
      CHECK(classify_numeric(m, p, r0).kind == base);
    }
  }
}

TEST_CASE("classify_numeric range guard") {
  const auto m = ModelManifold::euclidean(2, 100.0);
  CHECK_THROWS_AS(classify_numeric(m, 2.0, 10.0), InsufficientRange);
}
