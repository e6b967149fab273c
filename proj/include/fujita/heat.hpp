#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "fujita/manifold.hpp"

namespace fujita {

// Cell-centered radial grid: uniform spacing up to r = uniform_to, then
// geometrically graded (ratio <= ratio_max) out to R_max. Conservative
// finite-volume data: cell weights are the discrete volume measure and
// face conductances encode the flux form (psi^{n-1} u_r)_r / psi^{n-1}.
struct RadialGrid {
  std::vector<double> faces;    // size N+1, faces[0] = 0, faces[N] = R_max
  std::vector<double> centers;  // size N
  std::vector<double> weights;  // omega * int_cell psi^{n-1} dr
  std::vector<double> cond;     // size N+1; cond[0] = 0 (reflective origin),
                                // cond[N] = absorbing ghost conductance
  int n_dim = 0;
  double R_max = 0.0;
  double min_spacing = 0.0;

  std::size_t size() const { return centers.size(); }
};

std::shared_ptr<const RadialGrid> build_radial_grid(const ModelManifold& m, int N,
                                                    double ratio_max = 1.05,
                                                    double uniform_to = 1.0);

struct RadialField {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> values;
  double time_stamp = 0.0;
  double min_before_clamp = 0.0;  // most negative value seen before clamping

  double sup() const;
  double mass() const;  // sum w_i u_i
};

RadialField zero_field(std::shared_ptr<const RadialGrid> grid);

struct EvolveControls {
  // Geometric time stepping anchored at absolute time: dt = max(dt_init,
  // eta * t). dt_init = 0 means 0.25 * min_spacing^2.
  double eta = 0.004;
  double dt_init = 0.0;
  double dt_max = std::numeric_limits<double>::infinity();
  long max_steps = 100000000;
};

// One backward-Euler step of the linear radial heat equation (exposed for
// the IMEX splitting in the semilinear solver).
void heat_step(const RadialGrid& g, std::vector<double>& u, double dt);

RadialField evolve(const ModelManifold& m, const RadialField& u, double dt_total,
                   const EvolveControls& c = {});

// Discrete minimal heat kernel from the origin: unit-mass delta in the first
// cell, absorbing outer boundary.
RadialField kernel_at_origin(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid,
                             double t, const EvolveControls& c = {});

struct KernelReport {
  std::vector<double> times;
  std::vector<double> sup_values;
  std::vector<double> ratios;  // sup_y P_t(0,y) * V(sqrt(t))
  std::vector<double> masses;
  double C1 = 0.0;             // max ratio over the sampled times
  bool bounded = false;        // ratios not climbing at the largest times
  std::vector<std::pair<double, double>> defect_pairs;
  std::vector<double> defects;  // sup-norm semigroup defect per pair
};

KernelReport verify_condition_H(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid,
                                const std::vector<double>& times, const EvolveControls& c = {});

double semigroup_defect(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid, double t,
                        double s, const EvolveControls& c = {});

}  // namespace fujita
