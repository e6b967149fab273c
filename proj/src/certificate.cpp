#include "fujita/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fujita/criterion.hpp"
#include "fujita/errors.hpp"

namespace fujita {

namespace {

// quintic smoothstep on [0,1]: S(0)=0, S(1)=1, S' and S'' vanish at both ends
double smooth5(double y) { return y * y * y * (10.0 + y * (-15.0 + 6.0 * y)); }
double smooth5_d(double y) { return 30.0 * y * y * (1.0 - y) * (1.0 - y); }
double smooth5_dd(double y) { return 60.0 * y * (1.0 - y) * (1.0 - 2.0 * y); }

}  // namespace

double Cutoff::operator()(double x) const {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  // clamp away the roundoff of 1 - S near the support edge; a sign flip
  // there would break the h >= 0, h' <= 0 product signs downstream
  return std::clamp(1.0 - smooth5(x - 1.0), 0.0, 1.0);
}

double Cutoff::deriv(double x) const {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return -smooth5_d(x - 1.0);
}

double Cutoff::deriv2(double x) const {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return -smooth5_dd(x - 1.0);
}

Cutoff build_cutoff() {
  Cutoff h;
  // |h'| peaks at the midpoint, |h''| at y = (3 +- sqrt(3))/6
  h.max_abs_deriv = 15.0 / 8.0;
  h.max_abs_deriv2 = 10.0 / std::sqrt(3.0);
  h.C1_h = std::max(h.max_abs_deriv, h.max_abs_deriv2);
  return h;
}

Certificate::Certificate(const ModelManifold& m, double p, double r0, int shells)
    : m_(m), h_(build_cutoff()), p_(p), r0_(r0), shells_(shells) {
  validate_exponent(p);
  if (!(r0 > 0.0)) throw ValidationError("certificate: r0 must be positive");
  if (shells < 2) throw ValidationError("certificate: need at least 2 shells");

  radii_.resize(shells + 1);
  for (int k = 0; k <= shells; ++k) radii_[k] = std::ldexp(r0, k);
  if (radii_.back() > m.R_max())
    throw RangeExceeded("certificate: outer shell radius " + std::to_string(radii_.back()) +
                        " exceeds the manifold range " + std::to_string(m.R_max()));

  // shell term (r_k - r_{k-1})^2 / V(r_k)^{p-1}; a normalizes their sum to 1
  std::vector<double> term(shells + 1, 0.0);
  double sum = 0.0;
  for (int k = 1; k <= shells; ++k) {
    const double dr = radii_[k] - radii_[k - 1];
    term[k] = dr * dr * std::pow(m_.volume(radii_[k]), 1.0 - p);
    sum += term[k];
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw StabilityFailure("certificate: degenerate shell sum");
  a_ = 1.0 / sum;

  amp_.assign(shells + 1, 0.0);
  T_.assign(shells + 1, 0.0);
  for (int k = 1; k <= shells; ++k) amp_[k] = a_ * term[k];
  for (int k = shells - 1; k >= 1; --k) T_[k] = T_[k + 1] + amp_[k + 1];
}

Certificate build_certificate(const ModelManifold& m, double p, double r0, int shells) {
  return Certificate(m, p, r0, shells);
}

int Certificate::shell_of(double r, double t) const {
  if (r < 0.0 || t < 0.0) throw OutOfRange("certificate: negative coordinate");
  for (int k = 0; k <= shells_; ++k)
    if (r < radii_[k] && t < radii_[k] * radii_[k]) return k;
  return shells_ + 1;
}

double Certificate::phi(double r, double t) const {
  const int k = shell_of(r, t);
  if (k == 0) return 1.0;
  if (k > shells_) return 0.0;
  const double s = radii_[k - 1];
  return amp_[k] * h_(r / s) * h_(t / (s * s)) + T_[k];
}

double Certificate::phi_r(double r, double t) const {
  const int k = shell_of(r, t);
  if (k == 0 || k > shells_) return 0.0;
  const double s = radii_[k - 1];
  return amp_[k] * (h_.deriv(r / s) / s) * h_(t / (s * s));
}

double Certificate::phi_rr(double r, double t) const {
  const int k = shell_of(r, t);
  if (k == 0 || k > shells_) return 0.0;
  const double s = radii_[k - 1];
  return amp_[k] * (h_.deriv2(r / s) / (s * s)) * h_(t / (s * s));
}

double Certificate::phi_t(double r, double t) const {
  const int k = shell_of(r, t);
  if (k == 0 || k > shells_) return 0.0;
  const double s = radii_[k - 1];
  return amp_[k] * h_(r / s) * (h_.deriv(t / (s * s)) / (s * s));
}

double Certificate::laplacian(double r, double t) const {
  const double pr = phi_r(r, t);
  // the drift term only matters where h' is active, i.e. r > r_{k-1} > 0
  if (pr == 0.0) return phi_rr(r, t);
  return phi_rr(r, t) + m_.radial_drift(r) * pr;
}

VerifyReport verify_bounds(const Certificate& cert, int radial_samples, int time_samples) {
  if (radial_samples < 4 || time_samples < 2)
    throw ValidationError("verify_bounds: sampling too sparse");
  const ModelManifold& m = cert.manifold();
  const auto& radii = cert.radii();

  const auto g = m.check_condition_G(cert.r0(), radii.back());
  if (!g.holds)
    throw ConditionGViolation("verify_bounds: r * drift still climbing at r = " +
                              std::to_string(g.witness_r) + " (C0 so far " +
                              std::to_string(g.C0) + ")");

  VerifyReport rep;
  rep.condition_G_C0 = g.C0;
  rep.per_shell.resize(cert.shells());

  const double a = cert.a();
  const double pm1 = cert.p() - 1.0;
  for (int k = 1; k <= cert.shells(); ++k) {
    ShellConstants& sc = rep.per_shell[k - 1];
    const double rk = radii[k];
    const double dk = radii[k] - radii[k - 1];
    const double scale = std::pow(m.volume(rk), pm1) / a;

    // log-spaced samples across the dyadic box, windows scaled to the shell
    // so every shell sees the same relative phases; the membership filter
    // removes the inner cylinder Q_{k-1}
    const double r_hi = rk * (1.0 - 1e-9), r_lo = r_hi / 512.0;
    const double t_hi = rk * rk * (1.0 - 1e-9), t_lo = t_hi / 512.0;
    for (int a_i = 0; a_i < radial_samples; ++a_i) {
      const double fr = static_cast<double>(a_i) / (radial_samples - 1);
      const double r = r_lo * std::pow(r_hi / r_lo, fr);
      for (int b_i = 0; b_i < time_samples; ++b_i) {
        const double ft = static_cast<double>(b_i) / (time_samples - 1);
        const double t = t_lo * std::pow(t_hi / t_lo, ft);
        if (cert.shell_of(r, t) != k) continue;
        const double pr = cert.phi_r(r, t);
        const double pt = cert.phi_t(r, t);
        if (pr > 0.0) rep.monotone_r = false;
        if (pt > 0.0) rep.monotone_t = false;
        sc.C_r = std::max(sc.C_r, -pr * scale / dk);
        sc.C_rr = std::max(sc.C_rr, std::fabs(cert.phi_rr(r, t)) * scale);
        sc.C_delta = std::max(sc.C_delta, std::max(0.0, -cert.laplacian(r, t)) * scale);
        sc.C_t = std::max(sc.C_t, std::max(0.0, -pt) * scale);
      }
    }
    rep.C_r = std::max(rep.C_r, sc.C_r);
    rep.C_rr = std::max(rep.C_rr, sc.C_rr);
    rep.C_delta = std::max(rep.C_delta, sc.C_delta);
    rep.C_t = std::max(rep.C_t, sc.C_t);
  }
  return rep;
}

ADecayTable a_decay(const ModelManifold& m, double p, double r0,
                    const std::vector<int>& shell_counts) {
  validate_exponent(p);
  if (!(r0 > 0.0)) throw ValidationError("a_decay: r0 must be positive");
  if (shell_counts.empty()) throw ValidationError("a_decay: empty shell list");
  for (std::size_t j = 0; j < shell_counts.size(); ++j) {
    if (shell_counts[j] < 2) throw ValidationError("a_decay: shell counts must be >= 2");
    if (j > 0 && shell_counts[j] <= shell_counts[j - 1])
      throw ValidationError("a_decay: shell counts must be strictly increasing");
  }
  if (std::ldexp(r0, shell_counts.front()) > m.R_max())
    throw RangeExceeded("a_decay: even the smallest requested certificate needs r = " +
                        std::to_string(std::ldexp(r0, shell_counts.front())) +
                        " beyond the manifold range " + std::to_string(m.R_max()));

  const auto V = [&m](double r) { return m.volume(r); };
  ADecayTable tab;
  double sum = 0.0;
  int done = 0;  // shell terms accumulated so far
  for (int i : shell_counts) {
    const double ri = std::ldexp(r0, i);
    if (ri > m.R_max()) {  // report what fits and flag the truncation
      tab.range_exceeded = true;
      break;
    }
    for (int k = done + 1; k <= i; ++k) {
      const double dr = std::ldexp(r0, k) - std::ldexp(r0, k - 1);
      sum += dr * dr * std::pow(m.volume(std::ldexp(r0, k)), 1.0 - p);
    }
    done = i;
    const double a = 1.0 / sum;
    tab.shell_counts.push_back(i);
    tab.a_values.push_back(a);
    tab.tail_products.push_back(a * integral_tail(V, p, 2.0 * r0, ri));
    if (tab.first_small < 0 && a <= 1.0 / r0) tab.first_small = i;
  }
  return tab;
}

PairingResult pairing(const Certificate& cert, const SpaceTimeField& u) {
  if (!u.grid || u.times.empty() || u.values.size() != u.times.size())
    throw ValidationError("pairing: malformed space-time field");
  const double ri = cert.radii().back();
  if (u.grid->R_max < ri * (1.0 - 1e-12))
    throw DomainMismatch("pairing: field grid reaches r = " + std::to_string(u.grid->R_max) +
                         " but the certificate needs r = " + std::to_string(ri));

  const double p = cert.p();
  const double q = cert.q();
  PairingResult res;
  res.clipped = u.times.back() < ri * ri * (1.0 - 1e-9);

  // iint u^p phi^q dmu dt: grid weights in space, trapezoid over the slices;
  // phi vanishes past t = r_i^2, so no explicit time clipping is needed
  const std::size_t N = u.grid->size();
  std::vector<double> slice_int(u.times.size(), 0.0);
  for (std::size_t j = 0; j < u.times.size(); ++j) {
    const double t = u.times[j];
    if (t >= ri * ri) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double c = u.grid->centers[i];
      if (c >= ri) break;
      const double ph = cert.phi(c, t);
      if (ph <= 0.0) continue;
      const double uv = std::max(0.0, u.values[j][i]);
      s += u.grid->weights[i] * std::pow(uv, p) * std::pow(ph, q);
    }
    slice_int[j] = s;
  }
  double integral = 0.0;
  for (std::size_t j = 1; j < u.times.size(); ++j)
    integral += 0.5 * (u.times[j] - u.times[j - 1]) * (slice_int[j] + slice_int[j - 1]);

  res.lhs = integral > 0.0 ? std::pow(integral, (p - 1.0) / p) : 0.0;

  // Hoelder pairing against q phi^{q-1} (-Delta phi - phi_t): the measured
  // shell constants and the dyadic box volumes give the a^{1/p} bound
  const VerifyReport rep = verify_bounds(cert);
  res.C = q * (rep.C_delta + rep.C_t) * std::pow(4.0, 1.0 / q);
  res.rhs = res.C * std::pow(cert.a(), 1.0 / p);
  res.holds = res.lhs <= res.rhs * (1.0 + 1e-9);
  return res;
}

}  // namespace fujita
