#pragma once

#include <vector>

#include "fujita/manifold.hpp"
#include "fujita/picard.hpp"

namespace fujita {

// Radial cutoff: 1 on [0,1], quintic smoothstep down on [1,2], 0 beyond.
// C2 at the knots, strictly decreasing on (1,2).
struct Cutoff {
  double C1_h = 0.0;          // certified bound: -C1_h <= h' <= 0, |h''| <= C1_h
  double max_abs_deriv = 0.0;   // exact extremum of |h'| (15/8)
  double max_abs_deriv2 = 0.0;  // exact extremum of |h''| (10/sqrt(3))

  double operator()(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
};

Cutoff build_cutoff();

// The nonexistence test function: phi = 1 on Q_0 = B(r0) x [0, r0^2),
// shell k adds a * (r_k - r_{k-1})^2 / V(r_k)^{p-1} * h(r/r_{k-1}) h(t/r_{k-1}^2)
// on top of the telescoped offset T_k, and phi = 0 outside Q_i.
class Certificate {
public:
  Certificate(const ModelManifold& m, double p, double r0, int shells);

  double p() const { return p_; }
  double q() const { return p_ / (p_ - 1.0); }
  double r0() const { return r0_; }
  int shells() const { return shells_; }
  double a() const { return a_; }
  const std::vector<double>& radii() const { return radii_; }     // r_0 .. r_i
  const std::vector<double>& offsets() const { return T_; }       // T_1 .. T_i at [1..i]
  const ModelManifold& manifold() const { return m_; }
  const Cutoff& cutoff() const { return h_; }

  // Shell index at (r, t): 0 inside Q_0, k for Q_k \ Q_{k-1}, shells()+1 outside Q_i.
  int shell_of(double r, double t) const;

  double phi(double r, double t) const;
  double phi_r(double r, double t) const;
  double phi_rr(double r, double t) const;
  double phi_t(double r, double t) const;
  // Delta phi = phi_rr + (n-1) (psi'/psi) phi_r, radial Laplacian on M.
  double laplacian(double r, double t) const;

private:
  ModelManifold m_;
  Cutoff h_;
  double p_;
  double r0_;
  int shells_;
  double a_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> amp_;  // a * (r_k-r_{k-1})^2 / V(r_k)^{p-1}, index 1..i
  std::vector<double> T_;
};

Certificate build_certificate(const ModelManifold& m, double p, double r0, int shells);

struct ShellConstants {
  double C_r = 0.0;       // (-phi_r) * V_k^{p-1} / (a * (r_k - r_{k-1}))
  double C_rr = 0.0;      // |phi_rr| * V_k^{p-1} / a
  double C_delta = 0.0;   // (-Delta phi)_+ * V_k^{p-1} / a
  double C_t = 0.0;       // (-phi_t)_+ * V_k^{p-1} / a
};

struct VerifyReport {
  std::vector<ShellConstants> per_shell;  // index 0 = shell 1
  double C_r = 0.0, C_rr = 0.0, C_delta = 0.0, C_t = 0.0;  // maxima over shells
  bool monotone_r = true;  // phi_r <= 0 at every sample
  bool monotone_t = true;  // phi_t <= 0 at every sample
  double condition_G_C0 = 0.0;
};

// Samples each shell (radii x times, log-spaced) and measures the smallest
// constants making the paper-shaped bounds hold there.
VerifyReport verify_bounds(const Certificate& cert, int radial_samples = 64,
                           int time_samples = 16);

struct ADecayTable {
  std::vector<int> shell_counts;
  std::vector<double> a_values;
  std::vector<double> tail_products;  // a(i) * int_{2 r0}^{r_i} r / V^{p-1}
  int first_small = -1;               // first i with a(i) <= 1/r0
  bool range_exceeded = false;        // table truncated at R_max
};

ADecayTable a_decay(const ModelManifold& m, double p, double r0,
                    const std::vector<int>& shell_counts);

struct PairingResult {
  double lhs = 0.0;  // (iint u^p phi^q dmu dt)^{(p-1)/p}
  double rhs = 0.0;  // C * a^{1/p}, C from the measured bound constants
  double C = 0.0;
  bool holds = false;
  bool clipped = false;  // u's time range did not cover [0, r_i^2]
};

PairingResult pairing(const Certificate& cert, const SpaceTimeField& u);

}  // namespace fujita
