#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fujita/heat.hpp"
#include "fujita/manifold.hpp"

namespace fujita {

// Radial initial profile; realized on a grid on demand.
struct InitialData {
  enum class Kind { Gaussian, Bump, Table };
  Kind kind = Kind::Gaussian;
  double amplitude = 0.0;
  double width = 1.0;                // sigma (gaussian) or radius (bump)
  std::vector<double> table_radii;   // Table kind only; values linearly interpolated
  std::vector<double> table_values;

  static InitialData gaussian(double amplitude, double sigma);
  static InitialData bump(double amplitude, double radius);
  static InitialData table(std::vector<double> radii, std::vector<double> values);

  // Evaluate the profile at radius r.
  double operator()(double r) const;

  // Sample onto grid centers; validates nonnegativity and concentration
  // (mass beyond R_max/2 must not exceed 1e-10 of the total).
  RadialField realize(std::shared_ptr<const RadialGrid> grid) const;

  std::string describe() const;
};

enum class OutcomeKind { BlowUp, GlobalEvidence, Undetermined };

struct SimControls {
  int cells = 1024;             // grid resolution when simulate builds its own grid
  double eta = 0.01;            // geometric time-step ramp dt ~ eta * t
  double dt_init = 0.0;         // 0 -> 0.25 * min_spacing^2
  double dt_min = 1e-12;        // blow-up declaration needs the reaction clock at/below this
  double dt_max = std::numeric_limits<double>::infinity();
  double U_max = 1e8;
  double horizon = 0.0;         // 0 -> max(100, 50 * width^2)
  std::vector<double> record_times;
  bool envelope_check = false;  // record sup u / (lambda K_{t+delta}) at record times
  double envelope_delta = 2.0;
  long max_steps = 4'000'000;
};

struct SupSample {
  double t;
  double sup;
  double mass;
  double dt;
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Undetermined;
  double t_star = std::numeric_limits<double>::quiet_NaN();  // BlowUp only
  double horizon = 0.0;
  std::string reason;           // Undetermined only
  bool degenerate = false;      // u0 == 0
  bool grid_too_coarse = false; // peak resolved by < 8 cells; demotes BlowUp
  std::vector<SupSample> history;
  std::vector<double> snapshot_times;
  std::vector<RadialField> snapshots;
  std::vector<double> envelope_ratios;  // per snapshot, when envelope_check is on
};

Outcome simulate(const ModelManifold& m, double p, const InitialData& u0,
                 const SimControls& c = {});

// As above, on a caller-supplied grid (shared across a sweep).
Outcome simulate_on_grid(const ModelManifold& m, double p, const InitialData& u0,
                         std::shared_ptr<const RadialGrid> grid, const SimControls& c = {});

struct SweepControls {
  std::vector<double> amplitudes = {0.8, 0.4, 0.2};  // descending ladder
  double bracket_width = 0.1;
  int budget = 64;         // total simulate calls allowed
  int threads = 0;         // 0 -> hardware concurrency; ladder runs are independent
  SimControls sim;
};

struct SweepRow {
  double p;
  double amplitude;
  OutcomeKind kind;
};

struct ThresholdBracket {
  double p_lo = 0.0;   // every tested amplitude fails to persist here
  double p_hi = 0.0;   // some tested amplitude persists here
  std::vector<SweepRow> table;
  int calls = 0;
};

ThresholdBracket sweep_exponent(const ModelManifold& m,
                                const std::function<InitialData(double)>& u0_family,
                                double p_lo, double p_hi, const SweepControls& c = {});

const char* to_string(OutcomeKind k);

}  // namespace fujita
