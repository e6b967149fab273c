#include "fujita/semilinear.hpp"

#include <algorithm>
#include <future>
#include <sstream>
#include <thread>

#include "fujita/criterion.hpp"
#include "fujita/errors.hpp"

namespace fujita {

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::BlowUp: return "BlowUp";
    case OutcomeKind::GlobalEvidence: return "GlobalEvidence";
    default: return "Undetermined";
  }
}

InitialData InitialData::gaussian(double amplitude, double sigma) {
  if (amplitude < 0.0 || !(sigma > 0.0))
    throw ValidationError("gaussian data needs amplitude >= 0 and sigma > 0");
  InitialData d;
  d.kind = Kind::Gaussian;
  d.amplitude = amplitude;
  d.width = sigma;
  return d;
}

InitialData InitialData::bump(double amplitude, double radius) {
  if (amplitude < 0.0 || !(radius > 0.0))
    throw ValidationError("bump data needs amplitude >= 0 and radius > 0");
  InitialData d;
  d.kind = Kind::Bump;
  d.amplitude = amplitude;
  d.width = radius;
  return d;
}

InitialData InitialData::table(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw ValidationError("table data needs matching radii/values with >= 2 entries");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw ValidationError("table radii must be increasing");
  }
  double vmax = 0.0;
  for (double v : values) {
    if (v < 0.0) throw ValidationError("table data must be nonnegative");
    vmax = std::max(vmax, v);
  }
  InitialData d;
  d.kind = Kind::Table;
  d.amplitude = vmax;
  d.width = radii.back();
  d.table_radii = std::move(radii);
  d.table_values = std::move(values);
  return d;
}

double InitialData::operator()(double r) const {
  switch (kind) {
    case Kind::Gaussian:
      return amplitude * std::exp(-r * r / (2.0 * width * width));
    case Kind::Bump: {
      if (r >= width) return 0.0;
      const double x = 1.0 - (r / width) * (r / width);
      return amplitude * x * x;
    }
    case Kind::Table: {
      if (r >= table_radii.back()) return 0.0;
      const auto it = std::upper_bound(table_radii.begin(), table_radii.end(), r);
      if (it == table_radii.begin()) return table_values.front();
      const std::size_t j = static_cast<std::size_t>(it - table_radii.begin());
      const double w = (r - table_radii[j - 1]) / (table_radii[j] - table_radii[j - 1]);
      return (1.0 - w) * table_values[j - 1] + w * table_values[j];
    }
  }
  return 0.0;
}

RadialField InitialData::realize(std::shared_ptr<const RadialGrid> grid) const {
  RadialField f = zero_field(std::move(grid));
  double total = 0.0, far = 0.0;
  const double half = 0.5 * f.grid->R_max;
  for (std::size_t i = 0; i < f.grid->size(); ++i) {
    const double v = (*this)(f.grid->centers[i]);
    if (v < 0.0) throw ValidationError("initial data must be nonnegative");
    f.values[i] = v;
    total += f.grid->weights[i] * v;
    if (f.grid->centers[i] >= half) far += f.grid->weights[i] * v;
  }
  if (total > 0.0 && far > 1e-10 * total)
    throw ValidationError("initial data not concentrated: mass beyond R_max/2 = " +
                          std::to_string(far / total) + " of total");
  return f;
}

std::string InitialData::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Gaussian: os << "gaussian(A=" << amplitude << ", sigma=" << width << ")"; break;
    case Kind::Bump: os << "bump(A=" << amplitude << ", radius=" << width << ")"; break;
    case Kind::Table: os << "table(" << table_radii.size() << " nodes)"; break;
  }
  return os.str();
}

namespace {

// Count cells at or above half the current peak (peak resolution measure).
int half_max_cells(const std::vector<double>& u) {
  const double s = *std::max_element(u.begin(), u.end());
  int count = 0;
  for (double v : u) {
    if (v >= 0.5 * s) ++count;
  }
  return count;
}

double extrapolate_t_star(const std::vector<SupSample>& hist, double p) {
  // (sup u)^{1-p} falls linearly to zero at the blow-up time.
  const std::size_t n = hist.size();
  if (n < 2) return hist.empty() ? 0.0 : hist.back().t;
  const auto& a = hist[n - 2];
  const auto& b = hist[n - 1];
  const double ya = std::pow(a.sup, 1.0 - p);
  const double yb = std::pow(b.sup, 1.0 - p);
  const double slope = (yb - ya) / (b.t - a.t);
  if (!(slope < 0.0)) return b.t;
  return b.t - yb / slope;
}

}  // namespace

Outcome simulate(const ModelManifold& m, double p, const InitialData& u0,
                 const SimControls& c) {
  return simulate_on_grid(m, p, u0, build_radial_grid(m, c.cells), c);
}

Outcome simulate_on_grid(const ModelManifold& m, double p, const InitialData& u0,
                         std::shared_ptr<const RadialGrid> grid, const SimControls& c) {
  validate_exponent(p);
  Outcome out;
  RadialField u = u0.realize(grid);
  const double sup0 = u.sup();
  const double T = c.horizon > 0.0 ? c.horizon : std::max(100.0, 50.0 * u0.width * u0.width);
  out.horizon = T;

  std::vector<double> records = c.record_times;
  std::sort(records.begin(), records.end());
  std::size_t next_rec = 0;
  RadialField envelope = zero_field(grid);  // filled lazily per snapshot
  double env_lambda = 0.0;
  if (c.envelope_check && sup0 > 0.0) {
    const RadialField k0 = kernel_at_origin(m, grid, c.envelope_delta);
    double lam = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      if (k0.values[i] > 0.0) lam = std::max(lam, u.values[i] / k0.values[i]);
    }
    env_lambda = lam;
  }

  if (sup0 == 0.0) {
    out.kind = OutcomeKind::GlobalEvidence;
    out.degenerate = true;
    out.history.push_back({0.0, 0.0, 0.0, 0.0});
    for (double tr : records) {
      out.snapshot_times.push_back(tr);
      out.snapshots.push_back(u);
      if (c.envelope_check) out.envelope_ratios.push_back(0.0);
    }
    return out;
  }

  const double dt0 =
      c.dt_init > 0.0 ? c.dt_init : 0.25 * grid->min_spacing * grid->min_spacing;
  double t = 0.0;
  bool width_checked = false;
  out.history.push_back({0.0, sup0, u.mass(), 0.0});

  const auto take_snapshot = [&](double at) {
    out.snapshot_times.push_back(at);
    out.snapshots.push_back(u);
    out.snapshots.back().time_stamp = at;
    if (c.envelope_check) {
      const RadialField k = kernel_at_origin(m, grid, at + c.envelope_delta);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid->size(); ++i) {
        if (k.values[i] > 0.0) worst = std::max(worst, u.values[i] / (env_lambda * k.values[i]));
      }
      out.envelope_ratios.push_back(worst);
    }
  };

  long steps = 0;
  while (true) {
    const double sup = out.history.back().sup;
    const double react_clock =
        sup > 0.0 ? 0.1 / (p * std::pow(sup, p - 1.0)) : std::numeric_limits<double>::infinity();

    if (sup >= c.U_max && react_clock <= c.dt_min) {
      out.kind = OutcomeKind::BlowUp;
      out.t_star = extrapolate_t_star(out.history, p);
      break;
    }
    if (sup > 1e200) {  // overflow guard; the reaction clock rule will confirm
      out.kind = OutcomeKind::BlowUp;
      out.t_star = extrapolate_t_star(out.history, p);
      break;
    }
    if (t >= T * (1.0 - 1e-12)) {
      // Global evidence: sup stayed below its running maximum over the
      // whole late half of the run.
      double overall = 0.0, late = 0.0;
      for (const auto& s : out.history) {
        overall = std::max(overall, s.sup);
        if (s.t >= 0.5 * T) late = std::max(late, s.sup);
      }
      if (late < overall) {
        out.kind = OutcomeKind::GlobalEvidence;
      } else {
        out.kind = OutcomeKind::Undetermined;
        out.reason = "sup norm still at its running maximum near the horizon";
      }
      break;
    }

    double dt = std::max(dt0, c.eta * t);
    dt = std::min({dt, react_clock, c.dt_max, T - t});
    dt = std::max(dt, c.dt_min);
    if (next_rec < records.size() && records[next_rec] > t) {
      dt = std::min(dt, records[next_rec] - t);
    }

    heat_step(*grid, u.values, dt);
    for (double& v : u.values) {
      if (v < 0.0) v = 0.0;
      v += dt * std::pow(v, p);
      if (v > 1e250) v = 1e250;
    }
    t += dt;

    if (next_rec < records.size() && t >= records[next_rec] * (1.0 - 1e-12)) {
      take_snapshot(records[next_rec]);
      ++next_rec;
    }

    const double new_sup = u.sup();
    out.history.push_back({t, new_sup, u.mass(), dt});
    if (!width_checked && new_sup >= 10.0 * sup0) {
      width_checked = true;
      if (half_max_cells(u.values) < 8) out.grid_too_coarse = true;
    }
    if (++steps > c.max_steps) {
      out.kind = OutcomeKind::Undetermined;
      out.reason = "step budget exhausted at t = " + std::to_string(t);
      break;
    }
  }

  while (next_rec < records.size()) {
    take_snapshot(records[next_rec]);  // run ended early; snapshot the final state
    ++next_rec;
  }

  if (out.kind == OutcomeKind::BlowUp && out.grid_too_coarse) {
    out.kind = OutcomeKind::Undetermined;
    out.reason = "blow-up peak resolved by < 8 cells (GridTooCoarse)";
  }
  return out;
}

namespace {

struct LadderResult {
  bool any_global = false;
  std::vector<SweepRow> rows;
  int calls = 0;
};

// Run the descending amplitude ladder at one exponent. Stops at the first
// persisting amplitude (amplitudes are descending, so that is the largest).
LadderResult run_ladder(const ModelManifold& m, const std::function<InitialData(double)>& fam,
                        std::shared_ptr<const RadialGrid> grid, double p,
                        const SweepControls& c, int budget_left) {
  LadderResult res;
  unsigned threads = c.threads > 0 ? static_cast<unsigned>(c.threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  std::size_t done = 0;
  while (done < c.amplitudes.size() && !res.any_global) {
    const std::size_t batch =
        std::min<std::size_t>(threads, c.amplitudes.size() - done);
    if (res.calls + static_cast<int>(batch) > budget_left) break;
    std::vector<std::future<Outcome>> futs;
    for (std::size_t b = 0; b < batch; ++b) {
      const double A = c.amplitudes[done + b];
      futs.push_back(std::async(std::launch::async, [&, A] {
        return simulate_on_grid(m, p, fam(A), grid, c.sim);
      }));
    }
    for (std::size_t b = 0; b < batch; ++b) {  // deterministic reduction order
      const Outcome o = futs[b].get();
      res.rows.push_back({p, c.amplitudes[done + b], o.kind});
      ++res.calls;
      if (o.kind == OutcomeKind::GlobalEvidence && !res.any_global) res.any_global = true;
    }
    done += batch;
  }
  return res;
}

}  // namespace

ThresholdBracket sweep_exponent(const ModelManifold& m,
                                const std::function<InitialData(double)>& u0_family,
                                double p_lo, double p_hi, const SweepControls& c) {
  if (!(p_lo < p_hi)) throw ValidationError("sweep: need p_lo < p_hi");
  validate_exponent(p_lo);
  if (c.budget < 8) throw ValidationError("sweep: budget must allow >= 8 simulate calls");
  if (c.amplitudes.empty()) throw ValidationError("sweep: empty amplitude ladder");
  for (std::size_t i = 1; i < c.amplitudes.size(); ++i) {
    if (!(c.amplitudes[i] < c.amplitudes[i - 1]))
      throw ValidationError("sweep: amplitude ladder must be strictly descending");
  }

  const auto grid = build_radial_grid(m, c.sim.cells);
  ThresholdBracket out;

  const auto probe = [&](double p) {
    LadderResult r = run_ladder(m, u0_family, grid, p, c, c.budget - out.calls);
    out.calls += r.calls;
    out.table.insert(out.table.end(), r.rows.begin(), r.rows.end());
    if (r.calls == 0 ||
        (!r.any_global && r.rows.size() < c.amplitudes.size() && out.calls >= c.budget)) {
      std::ostringstream os;
      os << "sweep budget exhausted; partial bracket [" << out.p_lo << ", " << out.p_hi << "]";
      throw BudgetExhausted(os.str());
    }
    return r.any_global;
  };

  out.p_lo = p_lo;
  out.p_hi = p_hi;
  if (probe(p_lo))
    throw ValidationError("sweep: data already persists at p_lo; threshold not bracketed");
  if (!probe(p_hi))
    throw ValidationError("sweep: no persistence at p_hi; threshold not bracketed");

  while (out.p_hi - out.p_lo > c.bracket_width) {
    const double mid = 0.5 * (out.p_lo + out.p_hi);
    if (probe(mid)) {
      out.p_hi = mid;
    } else {
      out.p_lo = mid;
    }
  }
  return out;
}

}  // namespace fujita
