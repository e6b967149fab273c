#pragma once

#include <memory>
#include <vector>

#include "fujita/heat.hpp"
#include "fujita/manifold.hpp"
#include "fujita/semilinear.hpp"

namespace fujita {

// Radial field sampled on a shared grid at a fixed set of times.
struct SpaceTimeField {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> times;                // t_0 = 0 < t_1 < ... < t_J
  std::vector<std::vector<double>> values;  // one slice per time

  double sup() const;
  // Largest nodewise distance to another field on the same grid/times.
  double distance(const SpaceTimeField& other) const;
};

// Shared discrete backbone for the fixed-point construction: geometric time
// slices, the backward-Euler substep schedule inside each gap, and the kernel
// slices K_{t_j + delta}. Every operator in this module marches with the same
// substeps, so semigroup identities hold exactly in the discrete setting.
class PicardContext {
public:
  PicardContext(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid, double delta,
                int slices = 40, double eta_gap = 0.01);

  const std::vector<double>& times() const { return times_; }
  std::shared_ptr<const RadialGrid> grid() const { return grid_; }
  double delta() const { return delta_; }

  // Kernel envelope slice j: the discrete K_{t_j + delta}(0, .).
  const std::vector<double>& kernel_slice(std::size_t j) const { return kernels_[j]; }

  // Advance a field across gap j (from t_{j-1} to t_j), in place.
  void gap_evolve(std::vector<double>& u, std::size_t j) const;

  SpaceTimeField empty_field() const;

private:
  std::shared_ptr<const RadialGrid> grid_;
  double delta_;
  std::vector<double> times_;
  std::vector<std::vector<double>> gap_dts_;  // per gap, BE substep sizes
  std::vector<std::vector<double>> kernels_;
};

struct BallParams {
  double lambda = 0.0;
  double delta = 2.0;
  double C1 = 0.0;  // sup_t sup_x P_t * V(sqrt(t)), measured on the slices
  double C4 = 0.0;  // int_0^inf V(sqrt(s+delta))^{1-p} ds
  std::shared_ptr<const PicardContext> ctx;

  // lambda * K_{t_j+delta} as a field (the ball ceiling).
  SpaceTimeField envelope() const;
};

// int_0^inf V(sqrt(s+delta))^{1-p} ds, via 2 int_{sqrt(delta)}^inf t V(t)^{1-p} dt
// with a geometric tail estimate (remainder bound <= 1% of the value).
// Throws DivergentIntegral when the volume criterion is not Convergent.
double estimate_C4(const ModelManifold& m, double p, double delta);

struct BallOptions {
  int cells = 2048;
  int slices = 40;
  double eta_gap = 0.01;
  double safety = 0.9;  // shrink lambda below the exact constraint boundary
};

// Chooses lambda so that lambda^{p-1} C1^{p-1} C4 <= 1/2 and
// p lambda^{p-1} C1^{p-1} C4 < 1, with a safety margin.
BallParams make_ball_params(const ModelManifold& m, double p, double delta = 2.0,
                            const BallOptions& opts = {});

// The fixed-point operator: (Tu)(t) = heat evolution of u0 plus the Duhamel
// integral of u^p, marched on the shared substep schedule.
// Pre: 0 <= u0 <= (lambda/2) K_delta and 0 <= u <= lambda K_{t+delta} nodewise.
// Post: result again within the envelope (up to 1e-6 relative slack).
SpaceTimeField apply_T(const ModelManifold& m, double p, const InitialData& u0,
                       const SpaceTimeField& u, const BallParams& params);

struct FixedPointResult {
  SpaceTimeField solution;
  std::vector<double> contraction_history;  // sup-distance ratios per iteration
  int iterations = 0;
  double final_residual = 0.0;
};

// Iterates u <- Tu from u = 0; monotone nondecreasing, stops when the
// successive sup-distance falls below tol.
FixedPointResult iterate_to_fixed_point(const ModelManifold& m, double p, const InitialData& u0,
                                        const BallParams& params, double tol = 1e-10,
                                        int max_iter = 200);

// ||Tu1 - Tu2|| / ||u1 - u2|| for distinct fields inside the ball; the
// u0 term of T cancels in the difference.
double contraction_factor(const ModelManifold& m, double p, const SpaceTimeField& u1,
                          const SpaceTimeField& u2, const BallParams& params);

}  // namespace fujita
