#include "fujita/heat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fujita/errors.hpp"

namespace fujita {

namespace {

// Geometric span: h * sum_{k=1..g} rho^k. Monotone increasing in rho.
double geometric_span(double h, long g, double rho) {
  if (std::fabs(rho - 1.0) < 1e-13) return h * g;
  return h * rho * (std::pow(rho, g) - 1.0) / (rho - 1.0);
}

double solve_ratio(double h, long g, double span, double rho_cap) {
  if (geometric_span(h, g, 1.0) >= span) return 1.0;
  double lo = 1.0, hi = rho_cap;
  if (geometric_span(h, g, hi) < span) return -1.0;  // cannot reach
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (geometric_span(h, g, mid) < span ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

std::shared_ptr<const RadialGrid> build_radial_grid(const ModelManifold& m, int N,
                                                    double ratio_max, double uniform_to) {
  if (N < 8) throw ValidationError("grid needs at least 8 cells");
  if (!(ratio_max > 1.0 && ratio_max <= 1.05))
    throw ValidationError("grading ratio must lie in (1, 1.05]");
  const double R = m.R_max();
  auto g = std::make_shared<RadialGrid>();
  g->n_dim = m.dimension();
  g->R_max = R;
  g->faces.reserve(N + 1);
  g->faces.push_back(0.0);

  if (R <= uniform_to * (1.0 + 1e-12)) {
    for (int i = 1; i <= N; ++i) g->faces.push_back(R * i / N);
  } else {
    // Split cells so the uniform spacing h and the relative width ln(rho) of
    // the graded tail shrink together; otherwise the tail width is pinned at
    // the ratio cap and refining N never reduces the error out there.
    const double h_eq = uniform_to * (1.0 + std::log(R / uniform_to)) / N;
    long nu_eq = std::lround(uniform_to / h_eq);
    nu_eq = std::clamp(nu_eq, 1L, static_cast<long>(N - 1));
    long best = -1;
    double best_rho = 0.0;
    {
      const double rho = solve_ratio(uniform_to / nu_eq, N - nu_eq, R - uniform_to, ratio_max);
      if (rho > 0.0) {
        best = nu_eq;
        best_rho = rho;
      }
    }
    if (best < 0) {
      // Domain too wide for equidistribution at this N: fall back to the
      // largest uniform count that still reaches R_max at the ratio cap.
      long lo = 1, hi = N - 1;
      while (lo <= hi) {
        const long nu = (lo + hi) / 2;
        const double rho = solve_ratio(uniform_to / nu, N - nu, R - uniform_to, ratio_max);
        if (rho > 0.0) {
          best = nu;
          best_rho = rho;
          lo = nu + 1;
        } else {
          hi = nu - 1;
        }
      }
    }
    if (best < 0)
      throw InsufficientRange("grid: N too small to span R_max with ratio <= " +
                              std::to_string(ratio_max));
    const double h = uniform_to / best;
    for (long i = 1; i <= best; ++i) g->faces.push_back(uniform_to * i / best);
    double w = h;
    for (long k = 0; k < N - best; ++k) {
      w *= best_rho;
      g->faces.push_back(g->faces.back() + w);
    }
    g->faces.back() = R;  // absorb bisection residue into the last cell
  }

  const int n = m.dimension();
  const double omega = m.omega();
  const auto dens = [&](double r) { return omega * std::pow(m.warp(r), n - 1); };
  g->centers.resize(N);
  g->weights.resize(N);
  g->min_spacing = R;
  for (int i = 0; i < N; ++i) {
    const double a = g->faces[i], b = g->faces[i + 1];
    g->centers[i] = 0.5 * (a + b);
    g->weights[i] = (b - a) / 6.0 * (dens(a) + 4.0 * dens(g->centers[i]) + dens(b));
    g->min_spacing = std::min(g->min_spacing, b - a);
  }
  g->cond.assign(N + 1, 0.0);
  for (int i = 1; i < N; ++i) {
    g->cond[i] = dens(g->faces[i]) / (g->centers[i] - g->centers[i - 1]);
  }
  g->cond[N] = dens(g->faces[N]) / (g->faces[N] - g->centers[N - 1]);
  return g;
}

double RadialField::sup() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, v);
  return s;
}

double RadialField::mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += grid->weights[i] * values[i];
  return s;
}

RadialField zero_field(std::shared_ptr<const RadialGrid> grid) {
  RadialField f;
  f.values.assign(grid->size(), 0.0);
  f.grid = std::move(grid);
  return f;
}

void heat_step(const RadialGrid& g, std::vector<double>& u, double dt) {
  const std::size_t N = u.size();
  static thread_local std::vector<double> piv, upper, rhs;
  piv.resize(N);
  upper.resize(N);
  rhs = u;
  // Row i of (I + dt A): diag 1 + dt(c_i + c_{i+1})/w_i, off-diagonals
  // -dt c_i/w_i and -dt c_{i+1}/w_i. Naive Thomas elimination subtracts
  // near-equal huge numbers when dt is enormous (geometric ramps reach
  // dt ~ 1e30), so we carry the pivot surplus sigma_i = piv_i - dt c_{i+1}/w_i,
  // which obeys the subtraction-free recurrence
  //   sigma_i = 1 + (dt c_i / w_i) * sigma_{i-1} / piv_{i-1}.
  double sigma = 1.0;
  piv[0] = sigma + dt * g.cond[1] / g.weights[0];
  upper[0] = -dt * g.cond[1] / g.weights[0];
  for (std::size_t i = 1; i < N; ++i) {
    const double b = dt * g.cond[i] / g.weights[i];  // |sub-diagonal|
    sigma = 1.0 + b * sigma / piv[i - 1];
    const double a = dt * g.cond[i + 1] / g.weights[i];
    piv[i] = sigma + a;
    upper[i] = -a;
    if (!(piv[i] > 0.0) || !std::isfinite(piv[i]))
      throw StabilityFailure("singular tridiagonal system");
    rhs[i] += b / piv[i - 1] * rhs[i - 1];
  }
  u[N - 1] = rhs[N - 1] / piv[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) {
    u[i] = (rhs[i] - upper[i] * u[i + 1]) / piv[i];
  }
}

RadialField evolve(const ModelManifold& m, const RadialField& u, double dt_total,
                   const EvolveControls& c) {
  (void)m;  // the grid already encodes the geometry
  if (!(dt_total > 0.0)) throw ValidationError("evolve: dt_total must be positive");
  RadialField out = u;
  const double dt0 = c.dt_init > 0.0 ? c.dt_init
                                     : 0.25 * u.grid->min_spacing * u.grid->min_spacing;
  double elapsed = 0.0;
  long steps = 0;
  double min_seen = 0.0;
  while (elapsed < dt_total) {
    double dt = std::max(dt0, c.eta * (u.time_stamp + elapsed));
    dt = std::min({dt, c.dt_max, dt_total - elapsed});
    heat_step(*out.grid, out.values, dt);
    elapsed += dt;
    if (++steps > c.max_steps) throw StabilityFailure("evolve: step budget exceeded");
  }
  for (double& v : out.values) {
    if (v < 0.0) {
      min_seen = std::min(min_seen, v);
      v = 0.0;
    }
  }
  out.min_before_clamp = min_seen;
  out.time_stamp = u.time_stamp + dt_total;
  return out;
}

RadialField kernel_at_origin(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid,
                             double t, const EvolveControls& c) {
  if (!(t > 0.0)) throw ValidationError("kernel_at_origin: t must be positive");
  if (std::sqrt(t) > m.R_max() / 6.0)
    throw ValidationError("kernel_at_origin: sqrt(t) exceeds R_max/6");
  RadialField delta = zero_field(grid);
  delta.values[0] = 1.0 / grid->weights[0];
  RadialField k = evolve(m, delta, t, c);
  double boundary_mass = 0.0;
  for (std::size_t i = 0; i < k.values.size(); ++i) {
    if (grid->centers[i] >= 0.9 * grid->R_max) boundary_mass += grid->weights[i] * k.values[i];
  }
  if (boundary_mass > 1e-5)
    throw BoundaryContamination("kernel mass near R_max = " + std::to_string(boundary_mass) +
                                "; domain too small for t = " + std::to_string(t));
  return k;
}

KernelReport verify_condition_H(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid,
                                const std::vector<double>& times, const EvolveControls& c) {
  if (times.empty()) throw ValidationError("verify_condition_H: no times given");
  KernelReport rep;
  for (double t : times) {
    const RadialField k = kernel_at_origin(m, grid, t, c);
    const double sup = k.sup();
    rep.times.push_back(t);
    rep.sup_values.push_back(sup);
    rep.ratios.push_back(sup * m.volume(std::sqrt(t)));
    rep.masses.push_back(k.mass());
  }
  rep.C1 = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  // Unbounded C1 shows up as ratios still climbing at the largest times.
  const double tail = rep.ratios.back();
  const double mid = rep.ratios[rep.ratios.size() / 2];
  rep.bounded = !(rep.ratios.size() >= 3 && tail > 1.5 * mid);
  return rep;
}

double semigroup_defect(const ModelManifold& m, std::shared_ptr<const RadialGrid> grid, double t,
                        double s, const EvolveControls& c) {
  if (!(t > 0.0 && s > 0.0)) throw ValidationError("semigroup_defect: t, s must be positive");
  const RadialField direct = kernel_at_origin(m, grid, t + s, c);
  const RadialField stepped = evolve(m, kernel_at_origin(m, grid, t, c), s, c);
  double d = 0.0;
  for (std::size_t i = 0; i < direct.values.size(); ++i) {
    d = std::max(d, std::fabs(direct.values[i] - stepped.values[i]));
  }
  return d;
}

}  // namespace fujita
