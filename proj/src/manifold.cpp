#include "fujita/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fujita/errors.hpp"
#include "fujita/quadrature.hpp"

namespace fujita {

namespace {

// Quintic smoothstep: S(0)=0, S(1)=1, S'=S''=0 at both ends.
double smooth5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}
double smooth5_deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

}  // namespace

double sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double VolumeFamily::value(double r) const {
  double lg = exponents.at(0) * std::log(r);
  double L = std::log(r);
  for (std::size_t j = 1; j < exponents.size(); ++j) {
    lg += exponents[j] * std::log(L);
    L = std::log(L);
  }
  return constant * std::exp(lg);
}

double VolumeFamily::log_deriv(double r) const {
  // d log V / dr = a1/r + sum_j a_{j+1} / (r L1 ... Lj)
  double out = exponents.at(0) / r;
  double prod = r;
  double L = std::log(r);
  for (std::size_t j = 1; j < exponents.size(); ++j) {
    prod *= L;
    out += exponents[j] / prod;
    L = std::log(L);
  }
  return out;
}

double VolumeFamily::deriv(double r) const { return value(r) * log_deriv(r); }

double VolumeFamily::deriv2(double r) const {
  // V'' = V (F'^2 + F''), F = log V
  const double F1 = log_deriv(r);
  // F'' = -a1/r^2 + sum_j d/dr [a_{j+1}/(r L1...Lj)]
  double F2 = -exponents.at(0) / (r * r);
  double prod = r;     // r L1 ... Lj
  double L = std::log(r);
  std::vector<double> logs;  // L1..Lj values
  for (std::size_t j = 1; j < exponents.size(); ++j) {
    logs.push_back(L);
    prod *= L;
    // T = a/(r L1..Lj); T' = -T/r * (1 + sum_l 1/(L1..Ll))
    double inner = 1.0;
    double lp = 1.0;
    for (double lv : logs) {
      lp *= lv;
      inner += 1.0 / lp;
    }
    F2 -= exponents[j] / prod / r * inner;
    L = std::log(L);
  }
  return value(r) * (F1 * F1 + F2);
}

ModelManifold ModelManifold::euclidean(int n, double R_max) {
  if (n < 1) throw ValidationError("dimension must be >= 1");
  if (R_max <= 0.0) throw ValidationError("R_max must be positive");
  ModelManifold m;
  m.kind_ = Kind::Euclidean;
  m.n_ = n;
  m.omega_ = sphere_area(n);
  m.r_splice_ = R_max;  // psi = r everywhere
  m.blend_lo_ = R_max;
  m.blend_hi_ = R_max;
  m.R_max_ = R_max;
  return m;
}

ModelManifold ModelManifold::power_log(int n, const VolumeFamily& family, double r_splice,
                                       double R_max) {
  if (n < 2) throw ValidationError("power-log warps need n >= 2 (n = 1 is Euclidean only)");
  if (family.exponents.empty() || family.exponents[0] <= 0.0)
    throw ValidationError("family needs a leading exponent alpha1 > 0");
  if (family.constant <= 0.0) throw ValidationError("family constant must be positive");
  if (r_splice <= 0.0) throw ValidationError("r_splice must be positive");

  ModelManifold m;
  m.kind_ = Kind::PowerLog;
  m.n_ = n;
  m.omega_ = sphere_area(n);
  m.r_splice_ = r_splice;
  m.blend_lo_ = std::max(r_splice, family.r_base);
  m.blend_hi_ = 2.0 * m.blend_lo_;
  m.R_max_ = R_max;
  m.family_ = family;
  if (m.blend_hi_ >= R_max)
    throw ValidationError("R_max must exceed twice max(r_splice, r_base)");

  // V' must stay positive on the active range.
  const double lo = m.blend_lo_, hi = R_max;
  const int probes = 1024;
  for (int i = 0; i <= probes; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / probes);
    if (!(family.deriv(r) > 0.0)) {
      throw NonmonotoneVolume("V'(r) <= 0 at r = " + std::to_string(r));
    }
  }

  // C1 check across the blend edges (one-sided derivative mismatch).
  for (double edge : {m.blend_lo_, m.blend_hi_}) {
    const double eps = 1e-7 * edge;
    const double dm = (m.warp(edge) - m.warp(edge - eps)) / eps;
    const double dp = (m.warp(edge + eps) - m.warp(edge)) / eps;
    // the warp's own slope scale keeps the test meaningful when the true
    // derivative vanishes (e.g. alpha1 = 1, constant target warp)
    const double scale = std::max({std::fabs(dm), std::fabs(dp), m.warp(edge) / edge});
    if (std::fabs(dp - dm) / scale > 1e-5) {
      throw SpliceMismatch("C1 blending failed at r = " + std::to_string(edge));
    }
  }

  m.build_volume_checkpoints();
  m.offset_ = m.chk_v_.back() - family.value(R_max);
  return m;
}

ModelManifold ModelManifold::custom(int n, std::function<double(double)> warp,
                                    std::function<double(double)> warp_deriv, double R_max) {
  if (n < 2) throw ValidationError("custom warps need n >= 2");
  ModelManifold m;
  m.kind_ = Kind::Custom;
  m.n_ = n;
  m.omega_ = sphere_area(n);
  m.r_splice_ = 0.0;
  m.blend_lo_ = 0.0;
  m.blend_hi_ = 0.0;
  m.R_max_ = R_max;
  m.custom_warp_ = std::move(warp);
  m.custom_warp_deriv_ = std::move(warp_deriv);
  m.build_volume_checkpoints();
  return m;
}

double ModelManifold::target_warp(double r) const {
  const double dv = family_->deriv(r);
  if (n_ == 2) return dv / omega_;
  return std::pow(dv / omega_, 1.0 / (n_ - 1));
}

double ModelManifold::target_warp_deriv(double r) const {
  return target_warp(r) / (n_ - 1) * family_->deriv2(r) / family_->deriv(r);
}

double ModelManifold::warp(double r) const {
  if (kind_ == Kind::Custom) return custom_warp_(r);
  if (kind_ == Kind::Euclidean || r <= blend_lo_) return r;
  if (r >= blend_hi_) return target_warp(r);
  const double w = smooth5((r - blend_lo_) / (blend_hi_ - blend_lo_));
  return (1.0 - w) * r + w * target_warp(r);
}

double ModelManifold::warp_deriv(double r) const {
  if (kind_ == Kind::Custom) return custom_warp_deriv_(r);
  if (kind_ == Kind::Euclidean || r <= blend_lo_) return 1.0;
  if (r >= blend_hi_) return target_warp_deriv(r);
  const double x = (r - blend_lo_) / (blend_hi_ - blend_lo_);
  const double w = smooth5(x);
  const double wp = smooth5_deriv(x) / (blend_hi_ - blend_lo_);
  return (1.0 - w) + w * target_warp_deriv(r) + wp * (target_warp(r) - r);
}

void ModelManifold::build_volume_checkpoints() {
  const int segments = 1024;
  chk_r_.resize(segments + 1);
  chk_v_.resize(segments + 1);
  if (kind_ == Kind::Custom) {
    chk_r_[0] = R_max_ * 1e-9;
    chk_v_[0] = integrate([this](double r) { return omega_ * std::pow(warp(r), n_ - 1); }, 0.0,
                          chk_r_[0], 1e-16);
  } else {
    chk_r_[0] = blend_lo_;
    chk_v_[0] = omega_ * std::pow(blend_lo_, n_) / n_;  // Euclidean cap
  }
  const double ratio = std::pow(R_max_ / chk_r_[0], 1.0 / segments);
  const auto density = [this](double r) { return omega_ * std::pow(warp(r), n_ - 1); };
  for (int i = 1; i <= segments; ++i) {
    chk_r_[i] = (i == segments) ? R_max_ : chk_r_[i - 1] * ratio;
    const double tol = 1e-12 * std::max(chk_v_[i - 1], 1e-30);
    chk_v_[i] = chk_v_[i - 1] + integrate(density, chk_r_[i - 1], chk_r_[i], tol);
  }
}

double ModelManifold::volume(double r) const {
  if (r < 0.0 || r > R_max_ * (1.0 + 1e-12)) {
    throw OutOfRange("volume: r = " + std::to_string(r) + " outside [0, R_max]");
  }
  r = std::min(r, R_max_);
  if (kind_ != Kind::Custom && (kind_ == Kind::Euclidean || r <= blend_lo_)) {
    return omega_ * std::pow(r, n_) / n_;
  }
  const auto density0 = [this](double s) { return omega_ * std::pow(warp(s), n_ - 1); };
  if (r <= chk_r_[0]) return integrate(density0, 0.0, r, 1e-16);
  const auto it = std::upper_bound(chk_r_.begin(), chk_r_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - chk_r_.begin()) - 1;
  const auto density = [this](double s) { return omega_ * std::pow(warp(s), n_ - 1); };
  const double tol = 1e-12 * std::max(chk_v_[i], 1e-30);
  return chk_v_[i] + integrate(density, chk_r_[i], r, tol);
}

double ModelManifold::volume_extended(double r) const {
  if (kind_ == Kind::Euclidean) {
    if (r < 0.0) throw OutOfRange("volume_extended: negative radius");
    return omega_ * std::pow(r, n_) / n_;
  }
  if (r <= R_max_) return volume(r);
  if (kind_ == Kind::Custom)
    throw OutOfRange("volume_extended: custom warp has no growth law past R_max");
  return family_->value(r) + offset_;
}

double ModelManifold::radial_drift(double r) const {
  if (r <= 0.0) throw OriginSingularity("radial_drift at r <= 0; use the origin stencil");
  if (n_ == 1) return 0.0;
  return (n_ - 1) * warp_deriv(r) / warp(r);
}

ConditionGReport ModelManifold::check_condition_G(double r_lo, double r_hi, int samples) const {
  if (!(0.0 < r_lo && r_lo < r_hi && r_hi <= R_max_))
    throw ValidationError("check_condition_G: need 0 < r_lo < r_hi <= R_max");
  ConditionGReport rep;
  double best = -1e300, best_r = r_lo;
  double at_mid = 0.0, at_end = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / samples);
    const double prod = r * radial_drift(r);
    if (prod > best) {
      best = prod;
      best_r = r;
    }
    if (i == samples / 2) at_mid = prod;
    if (i == samples) at_end = prod;
  }
  rep.C0 = best;
  rep.witness_r = best_r;
  // Diverging upward: still climbing at the outer edge of the sampled range.
  rep.holds = !(at_end > 1.1 * std::max(at_mid, 0.0) + 1e-9);
  if (!rep.holds) rep.witness_r = r_hi;
  return rep;
}

std::string ModelManifold::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Euclidean) {
    os << "euclidean(n=" << n_ << ", R_max=" << R_max_ << ")";
  } else if (kind_ == Kind::Custom) {
    os << "custom(n=" << n_ << ", R_max=" << R_max_ << ")";
  } else {
    os << "power_log(n=" << n_ << ", C=" << family_->constant << ", exponents=[";
    for (std::size_t i = 0; i < family_->exponents.size(); ++i) {
      if (i) os << ",";
      os << family_->exponents[i];
    }
    os << "], r_base=" << family_->r_base << ", r_splice=" << r_splice_ << ", R_max=" << R_max_
       << ")";
  }
  return os.str();
}

}  // namespace fujita
