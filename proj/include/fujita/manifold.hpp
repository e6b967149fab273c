#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fujita {

// Iterated power-log volume growth target: V(r) = C r^a1 (ln r)^a2 (ln ln r)^a3 ...
// valid for r >= r_base where every iterated logarithm exceeds 1.
struct VolumeFamily {
  std::vector<double> exponents;  // a1, a2, ..., ak
  double constant = 1.0;          // C
  double r_base = 3.0;

  double value(double r) const;      // V(r)
  double log_deriv(double r) const;  // d log V / dr
  double deriv(double r) const;      // V'(r)
  double deriv2(double r) const;     // V''(r)
};

struct ConditionGReport {
  bool holds = false;
  double C0 = 0.0;          // sup over samples of r * d log(volume density) / dr
  double witness_r = 0.0;   // radius attaining the sup (or where divergence was seen)
};

// Rotationally symmetric model manifold: metric dr^2 + psi(r)^2 dS^2, all
// geometry reduced to the warp psi and the dimension n. Immutable.
class ModelManifold {
public:
  static ModelManifold euclidean(int n, double R_max);

  // Splices a Euclidean cap (psi = r below the blend zone) onto the warp
  // realizing the prescribed family, psi^{n-1} = V'/omega, with a quintic
  // smoothstep blend over [s, 2s], s = max(r_splice, r_base).
  static ModelManifold power_log(int n, const VolumeFamily& family, double r_splice,
                                 double R_max);

  // Arbitrary analytic warp (psi, psi'); mainly for condition checks on
  // manifolds outside the power-log classes.
  static ModelManifold custom(int n, std::function<double(double)> warp,
                              std::function<double(double)> warp_deriv, double R_max);

  int dimension() const { return n_; }
  double omega() const { return omega_; }  // area of the unit (n-1)-sphere
  double r_splice() const { return r_splice_; }
  double R_max() const { return R_max_; }
  bool is_euclidean() const { return kind_ == Kind::Euclidean; }
  const std::optional<VolumeFamily>& family() const { return family_; }

  double warp(double r) const;        // psi(r)
  double warp_deriv(double r) const;  // psi'(r)

  // V(r) = omega * int_0^r psi^{n-1}; closed form for Euclidean, cached
  // checkpoint quadrature otherwise. Adaptive tolerance 1e-10 relative.
  double volume(double r) const;

  // Full radial drift coefficient of the Laplacian, (n-1) psi'/psi.
  double radial_drift(double r) const;

  // volume(r) extended past R_max through the analytic growth law (family
  // value plus the splice offset, or the Euclidean closed form). Custom
  // warps have no growth law: OutOfRange beyond R_max.
  double volume_extended(double r) const;

  // Reports C0 = sup over a log-spaced sample of r * (n-1) psi'/psi on
  // [r_lo, r_hi]; holds = false when the product is still climbing at r_hi.
  ConditionGReport check_condition_G(double r_lo, double r_hi, int samples = 512) const;

  std::string describe() const;

private:
  enum class Kind { Euclidean, PowerLog, Custom };

  ModelManifold() = default;
  void build_volume_checkpoints();
  double target_warp(double r) const;
  double target_warp_deriv(double r) const;

  Kind kind_ = Kind::Euclidean;
  int n_ = 2;
  double omega_ = 0.0;
  double r_splice_ = 1.0;
  double blend_lo_ = 1.0;  // s
  double blend_hi_ = 2.0;  // 2s
  double R_max_ = 4096.0;
  std::optional<VolumeFamily> family_;
  std::function<double(double)> custom_warp_;
  std::function<double(double)> custom_warp_deriv_;

  // cumulative volume on log-spaced checkpoints (immutable after build)
  std::vector<double> chk_r_;
  std::vector<double> chk_v_;
  double offset_ = 0.0;  // volume(r) - family value, constant past the blend
};

double sphere_area(int n);  // omega_{n-1}; omega_0 = 2 for n = 1

}  // namespace fujita
