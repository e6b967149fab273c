#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fujita/manifold.hpp"

namespace fujita {

enum class VerdictKind { Divergent, Convergent, Inconclusive };

struct CriterionVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  // numeric mode: partial integrals I(R_j) over doubling R_j and a fitted
  // log-exponent of the tail increments
  std::vector<double> radii;
  std::vector<double> partials;
  double fitted_log_exponent = 0.0;
  // symbolic mode: the comparison that decided
  std::string witness;
};

const char* to_string(VerdictKind k);

// Partial integral int_{r0}^{R} t / V(t)^{p-1} dt.
double integral_tail(const std::function<double(double)>& V, double p, double r0, double R);

// Exact iterated-log integral test on the exponent sequence alpha_j (p-1)
// against the borderline (2, 1, 1, ...).
CriterionVerdict classify(const VolumeFamily& family, double p);

// Numeric fallback: partial integrals over doubling radii with a dead band
// for the slow log-divergent regime.
CriterionVerdict classify_numeric(const ModelManifold& m, double p, double r0);

// p* = 1 + 2/alpha1.
double fujita_exponent(const VolumeFamily& family);

void validate_exponent(double p);

}  // namespace fujita
