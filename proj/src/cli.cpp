#include "fujita/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fujita/certificate.hpp"
#include "fujita/config.hpp"
#include "fujita/criterion.hpp"
#include "fujita/errors.hpp"
#include "fujita/heat.hpp"
#include "fujita/io.hpp"
#include "fujita/manifold.hpp"
#include "fujita/picard.hpp"
#include "fujita/semilinear.hpp"

namespace fujita {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "fujita-lab 1.0.0";

struct RunContext {
  ExperimentConfig cfg;
  std::string config_path;
  std::string config_bytes;
  std::filesystem::path out_dir;
  std::vector<std::pair<std::string, std::string>> outputs;  // name -> bytes

  bool wants(const std::string& fmt) const {
    const auto& f = cfg.output.formats;
    return std::find(f.begin(), f.end(), fmt) != f.end();
  }
  void emit(const std::string& name, const std::string& bytes) {
    outputs.emplace_back(name, bytes);
  }
};

std::string csv_line(const std::vector<double>& vals) {
  std::string line;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) line += ',';
    line += format_double(vals[i]);
  }
  return line + "\n";
}

json json_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

void flush_outputs(RunContext& ctx, const std::string& command) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["config_path"] = ctx.config_path;
  manifest["config_hash"] = hash_hex(ctx.config_bytes);
  json outs = json::object();
  for (const auto& [name, bytes] : ctx.outputs) {
    atomic_write(ctx.out_dir / name, bytes);
    outs[name] = hash_hex(bytes);
  }
  manifest["outputs"] = outs;
  atomic_write(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

VolumeFamily family_of(const ExperimentConfig::Manifold& mc) {
  if (mc.has_family) return VolumeFamily{mc.exponents, mc.C, mc.r_base};
  // Euclidean volume V = omega r^n / n as a one-exponent family
  return VolumeFamily{{static_cast<double>(mc.dimension)},
                      sphere_area(mc.dimension) / mc.dimension, 3.0};
}

double leading_exponent(const ExperimentConfig::Manifold& mc) {
  return mc.has_family ? mc.exponents.front() : static_cast<double>(mc.dimension);
}

SimControls sim_controls(const ExperimentConfig& cfg) {
  SimControls sc;
  sc.cells = cfg.solver.N;
  sc.eta = cfg.solver.eta;
  sc.dt_init = cfg.solver.dt_init;
  sc.dt_min = cfg.solver.dt_min;
  sc.dt_max = cfg.solver.dt_max;
  sc.U_max = cfg.solver.U_max;
  sc.horizon = cfg.solver.T;
  return sc;
}

int cmd_classify(RunContext& ctx) {
  const auto verdict = classify(family_of(ctx.cfg.manifold), ctx.cfg.problem.p);
  json out;
  out["verdict"] = to_string(verdict.kind);
  out["witness"] = verdict.witness;
  out["fitted_log_exponent"] = verdict.fitted_log_exponent;
  out["radii"] = verdict.radii;
  out["partials"] = verdict.partials;
  out["p"] = ctx.cfg.problem.p;
  out["fujita_exponent"] = fujita_exponent(family_of(ctx.cfg.manifold));
  const std::string doc = out.dump(2) + "\n";
  std::fputs(doc.c_str(), stdout);
  if (ctx.wants("json")) ctx.emit("classify.json", doc);
  flush_outputs(ctx, "classify");
  switch (verdict.kind) {
    case VerdictKind::Divergent: return 0;
    case VerdictKind::Convergent: return 1;
    case VerdictKind::Inconclusive: return 2;
  }
  return 2;
}

int cmd_heat_kernel(RunContext& ctx) {
  const ModelManifold m = build_manifold(ctx.cfg.manifold);
  const auto grid = build_radial_grid(m, ctx.cfg.solver.N);
  EvolveControls ec;
  ec.eta = ctx.cfg.solver.eta;
  ec.dt_init = ctx.cfg.solver.dt_init;
  ec.dt_max = ctx.cfg.solver.dt_max;
  const KernelReport rep = verify_condition_H(m, grid, ctx.cfg.heat_kernel.times, ec);

  if (ctx.wants("csv")) {
    std::string csv = "t,r,P\n";
    for (double t : ctx.cfg.heat_kernel.times) {
      const RadialField k = kernel_at_origin(m, grid, t, ec);
      for (std::size_t i = 0; i < grid->size(); ++i)
        csv += csv_line({t, grid->centers[i], k.values[i]});
    }
    ctx.emit("kernel.csv", csv);
  }
  if (ctx.wants("json")) {
    json out;
    out["times"] = rep.times;
    out["sup_values"] = rep.sup_values;
    out["ratios"] = rep.ratios;
    out["masses"] = rep.masses;
    out["C1"] = rep.C1;
    out["bounded"] = rep.bounded;
    out["defects"] = rep.defects;
    ctx.emit("kernel_report.json", out.dump(2) + "\n");
  }
  flush_outputs(ctx, "heat-kernel");
  return 0;
}

int cmd_simulate(RunContext& ctx) {
  const ModelManifold m = build_manifold(ctx.cfg.manifold);
  const InitialData u0 = build_initial_data(ctx.cfg.problem);
  const Outcome oc = simulate(m, ctx.cfg.problem.p, u0, sim_controls(ctx.cfg));

  if (ctx.wants("csv")) {
    std::string csv = "t,sup_u,mass,dt\n";
    for (const auto& s : oc.history) csv += csv_line({s.t, s.sup, s.mass, s.dt});
    ctx.emit("trace.csv", csv);
  }
  if (ctx.wants("json")) {
    json out;
    out["outcome"] = to_string(oc.kind);
    out["t_star"] = json_or_null(oc.t_star);
    out["horizon"] = oc.horizon;
    out["reason"] = oc.reason;
    out["degenerate"] = oc.degenerate;
    out["grid_too_coarse"] = oc.grid_too_coarse;
    out["u0"] = u0.describe();
    out["p"] = ctx.cfg.problem.p;
    ctx.emit("outcome.json", out.dump(2) + "\n");
  }
  flush_outputs(ctx, "simulate");
  return oc.kind == OutcomeKind::Undetermined ? 4 : 0;
}

int cmd_sweep(RunContext& ctx) {
  const ModelManifold m = build_manifold(ctx.cfg.manifold);
  SweepControls sc;
  sc.amplitudes = ctx.cfg.sweep.amplitudes;
  sc.bracket_width = ctx.cfg.sweep.bracket_width;
  sc.budget = ctx.cfg.sweep.budget;
  sc.threads = ctx.cfg.threads;
  sc.sim = sim_controls(ctx.cfg);
  const std::string kind = ctx.cfg.problem.u0_kind;
  const double width = ctx.cfg.problem.width;
  const auto family = [&kind, width](double amplitude) {
    return kind == "bump" ? InitialData::bump(amplitude, width)
                          : InitialData::gaussian(amplitude, width);
  };
  const ThresholdBracket br =
      sweep_exponent(m, family, ctx.cfg.sweep.p_lo, ctx.cfg.sweep.p_hi, sc);

  const double alpha1 = leading_exponent(ctx.cfg.manifold);
  if (ctx.wants("csv")) {
    std::string csv = "p,amplitude,outcome,alpha1\n";
    for (const auto& row : br.table) {
      csv += format_double(row.p) + "," + format_double(row.amplitude) + "," +
             to_string(row.kind) + "," + format_double(alpha1) + "\n";
    }
    ctx.emit("sweep.csv", csv);
  }
  if (ctx.wants("json")) {
    json out;
    out["p_lo"] = br.p_lo;
    out["p_hi"] = br.p_hi;
    out["calls"] = br.calls;
    out["alpha1"] = alpha1;
    ctx.emit("bracket.json", out.dump(2) + "\n");
  }
  flush_outputs(ctx, "sweep");
  return 0;
}

int cmd_picard(RunContext& ctx) {
  const ModelManifold m = build_manifold(ctx.cfg.manifold);
  const InitialData u0 = build_initial_data(ctx.cfg.problem);
  BallOptions opts;
  opts.cells = ctx.cfg.picard.cells;
  opts.slices = ctx.cfg.picard.slices;
  const BallParams b = make_ball_params(m, ctx.cfg.problem.p, ctx.cfg.picard.delta, opts);
  const FixedPointResult res =
      iterate_to_fixed_point(m, ctx.cfg.problem.p, u0, b, ctx.cfg.picard.tol);

  if (ctx.wants("json")) {
    json out;
    out["lambda"] = b.lambda;
    out["delta"] = b.delta;
    out["C1"] = b.C1;
    out["C4"] = b.C4;
    out["iterations"] = res.iterations;
    out["final_residual"] = res.final_residual;
    out["contraction_history"] = res.contraction_history;
    ctx.emit("picard_report.json", out.dump(2) + "\n");
  }
  if (ctx.wants("csv")) {
    std::string csv = "t,r,u\n";
    const auto& sol = res.solution;
    for (std::size_t j = 0; j < sol.times.size(); ++j)
      for (std::size_t i = 0; i < sol.grid->size(); ++i)
        csv += csv_line({sol.times[j], sol.grid->centers[i], sol.values[j][i]});
    ctx.emit("fixed_point.csv", csv);
  }
  flush_outputs(ctx, "picard");
  return 0;
}

int cmd_certificate(RunContext& ctx) {
  const ModelManifold m = build_manifold(ctx.cfg.manifold);
  const double p = ctx.cfg.problem.p;
  const auto& cc = ctx.cfg.certificate;
  const Certificate cert = build_certificate(m, p, cc.r0, cc.shells);
  const VerifyReport rep = verify_bounds(cert);
  std::vector<int> i_list = cc.i_list;
  if (i_list.empty())
    for (int i = 2; i <= cc.shells; ++i) i_list.push_back(i);
  const ADecayTable tab = a_decay(m, p, cc.r0, i_list);

  if (ctx.wants("json")) {
    json out;
    out["a"] = cert.a();
    out["r0"] = cert.r0();
    out["shells"] = cert.shells();
    out["radii"] = cert.radii();
    out["offsets"] = cert.offsets();
    json shells = json::array();
    for (const auto& sc : rep.per_shell)
      shells.push_back(
          {{"C_r", sc.C_r}, {"C_rr", sc.C_rr}, {"C_delta", sc.C_delta}, {"C_t", sc.C_t}});
    out["per_shell"] = shells;
    out["C_r"] = rep.C_r;
    out["C_rr"] = rep.C_rr;
    out["C_delta"] = rep.C_delta;
    out["C_t"] = rep.C_t;
    out["condition_G_C0"] = rep.condition_G_C0;
    out["a_decay"] = {{"shell_counts", tab.shell_counts},
                      {"a_values", tab.a_values},
                      {"tail_products", tab.tail_products},
                      {"first_small", tab.first_small},
                      {"range_exceeded", tab.range_exceeded}};
    ctx.emit("certificate_report.json", out.dump(2) + "\n");
  }
  if (ctx.wants("csv")) {
    std::string csv = "r,t,phi\n";
    const double ri = cert.radii().back();
    for (int a_i = 0; a_i < 96; ++a_i) {
      const double r = (cc.r0 / 4.0) * std::pow(1.05 * ri / (cc.r0 / 4.0), a_i / 95.0);
      for (int b_i = 0; b_i < 24; ++b_i) {
        const double t =
            (cc.r0 * cc.r0 / 4.0) * std::pow(1.05 * ri * ri / (cc.r0 * cc.r0 / 4.0), b_i / 23.0);
        csv += csv_line({r, t, cert.phi(r, t)});
      }
    }
    ctx.emit("phi_samples.csv", csv);
  }
  flush_outputs(ctx, "certificate");
  return 0;
}

struct PhasePoint {
  int rank = 0;  // 0 Undetermined, 1 GlobalEvidence, 2 BlowUp
};

int cmd_report(RunContext& ctx) {
  if (ctx.cfg.report.inputs.empty())
    throw ValidationError("report: config must list sweep CSVs under report.inputs");

  std::map<std::pair<double, double>, PhasePoint> points;  // (p, alpha1) -> strongest outcome
  std::string merged = "p,amplitude,outcome,alpha1\n";
  for (const auto& path : ctx.cfg.report.inputs) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "p,amplitude,outcome,alpha1")
      throw ValidationError("report: " + path + " is not a sweep CSV (bad header)");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string pf, af, of, xf;
      if (!std::getline(row, pf, ',') || !std::getline(row, af, ',') ||
          !std::getline(row, of, ',') || !std::getline(row, xf))
        throw ValidationError("report: malformed row in " + path + ": " + line);
      merged += line + "\n";
      const double p = std::stod(pf), alpha1 = std::stod(xf);
      int rank = 0;
      if (of == "BlowUp") rank = 2;
      else if (of == "GlobalEvidence") rank = 1;
      else if (of != "Undetermined")
        throw ValidationError("report: unknown outcome \"" + of + "\" in " + path);
      auto& pt = points[{p, alpha1}];
      pt.rank = std::max(pt.rank, rank);
    }
  }
  if (points.empty()) throw ValidationError("report: no data rows in the given CSVs");

  double p_min = 1e300, p_max = -1e300, a_min = 1e300, a_max = -1e300;
  for (const auto& [key, pt] : points) {
    p_min = std::min(p_min, key.first);
    p_max = std::max(p_max, key.first);
    a_min = std::min(a_min, key.second);
    a_max = std::max(a_max, key.second);
  }
  if (p_max == p_min) { p_min -= 0.5; p_max += 0.5; }
  if (a_max == a_min) { a_min -= 0.5; a_max += 0.5; }

  const int W = 720, H = 520, ML = 70, MR = 160, MT = 40, MB = 60;
  const auto px = [&](double p) {
    return ML + (p - p_min) / (p_max - p_min) * (W - ML - MR);
  };
  const auto py = [&](double a) {
    return H - MB - (a - a_min) / (a_max - a_min) * (H - MT - MB);
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << (ML + (W - ML - MR) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">Blow-up phase diagram</text>\n";
  // axes
  svg << "<line x1=\"" << ML << "\" y1=\"" << (H - MB) << "\" x2=\"" << (W - MR) << "\" y2=\""
      << (H - MB) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << (H - MB)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double p = p_min + (p_max - p_min) * i / 4.0;
    const double a = a_min + (a_max - a_min) * i / 4.0;
    svg << "<text x=\"" << px(p) << "\" y=\"" << (H - MB + 22)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_double(std::round(p * 1000.0) / 1000.0) << "</text>\n";
    svg << "<text x=\"" << (ML - 8) << "\" y=\"" << (py(a) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_double(std::round(a * 1000.0) / 1000.0) << "</text>\n";
  }
  svg << "<text x=\"" << (ML + (W - ML - MR) / 2) << "\" y=\"" << (H - 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
         "exponent p</text>\n"
      << "<text x=\"20\" y=\"" << (MT + (H - MT - MB) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "transform=\"rotate(-90 20 " << (MT + (H - MT - MB) / 2) << ")\">"
         "volume growth exponent</text>\n";
  const char* colors[3] = {"#7f7f7f", "#1f77b4", "#d62728"};
  const char* labels[3] = {"Undetermined", "GlobalEvidence", "BlowUp"};
  for (const auto& [key, pt] : points) {
    svg << "<circle cx=\"" << px(key.first) << "\" cy=\"" << py(key.second)
        << "\" r=\"5\" fill=\"" << colors[pt.rank] << "\"/>\n";
  }
  for (int r = 0; r < 3; ++r) {
    const int y = MT + 20 + 24 * r;
    svg << "<circle cx=\"" << (W - MR + 20) << "\" cy=\"" << y << "\" r=\"5\" fill=\""
        << colors[r] << "\"/>\n<text x=\"" << (W - MR + 32) << "\" y=\"" << (y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << labels[r] << "</text>\n";
  }
  svg << "</svg>\n";

  ctx.emit("phase_diagram.svg", svg.str());
  if (ctx.wants("csv")) ctx.emit("merged.csv", merged);
  flush_outputs(ctx, "report");
  return 0;
}

void print_error(const std::string& type, const std::string& message, int code) {
  json err;
  err["error"] = {{"type", type}, {"message", message}, {"exit_code", code}};
  std::fputs((err.dump() + "\n").c_str(), stderr);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{std::string(kVersion) +
               " — numerical lab for blow-up vs. global existence of u_t = Δu + u^p "
               "on rotationally symmetric manifolds"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = -1;
  long long seed = -1;
  std::vector<std::string> formats;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"classify",
       "Volume-integral dichotomy verdict for (family, p); JSON to stdout. "
       "Exit code: 0 Divergent, 1 Convergent, 2 Inconclusive."},
      {"simulate",
       "Single semilinear run. trace.csv columns: t,sup_u,mass,dt. Exit 4 when the "
       "run is Undetermined."},
      {"sweep",
       "Bisect the blow-up threshold exponent over an amplitude ladder. sweep.csv "
       "columns: p,amplitude,outcome,alpha1."},
      {"heat-kernel",
       "Kernel profiles and the on-diagonal bound report. kernel.csv columns: t,r,P."},
      {"picard",
       "Small-data fixed point in the kernel-envelope ball. fixed_point.csv columns: t,r,u."},
      {"certificate",
       "Nonexistence test function: normalization, measured derivative constants, "
       "a(i) decay. phi_samples.csv columns: r,t,phi."},
      {"report",
       "Merge sweep CSVs (from report.inputs) into phase_diagram.svg; merged.csv "
       "columns: p,amplitude,outcome,alpha1."}};
  for (const auto& [name, desc] : subs) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "experiment config JSON")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--threads", threads,
                    "worker threads; falls back to config, then FUJITA_LAB_THREADS, then all cores");
    sub->add_option("--seed", seed, "RNG seed recorded in the effective config");
    sub->add_option("--format", formats, "output formats, any of csv,json,svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what(), 2);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunContext ctx;
    ctx.config_path = config_path;
    ctx.config_bytes = read_file(config_path);
    ctx.cfg = parse_config(ctx.config_bytes);
    if (!out_dir.empty()) ctx.cfg.output.directory = out_dir;
    if (!formats.empty()) ctx.cfg.output.formats = formats;
    if (seed >= 0) ctx.cfg.seed = static_cast<unsigned long>(seed);
    if (threads >= 0) {
      ctx.cfg.threads = threads;
    } else if (ctx.cfg.threads == 0) {
      if (const char* env = std::getenv("FUJITA_LAB_THREADS"))
        ctx.cfg.threads = std::max(0, std::atoi(env));
    }
    ctx.out_dir = ctx.cfg.output.directory;

    const std::string echoed = effective_config(ctx.cfg);
    ctx.emit("effective_config.json", echoed);
    if (command != "classify") std::fputs(echoed.c_str(), stdout);

    if (command == "classify") return cmd_classify(ctx);
    if (command == "simulate") return cmd_simulate(ctx);
    if (command == "sweep") return cmd_sweep(ctx);
    if (command == "heat-kernel") return cmd_heat_kernel(ctx);
    if (command == "picard") return cmd_picard(ctx);
    if (command == "certificate") return cmd_certificate(ctx);
    if (command == "report") return cmd_report(ctx);
    print_error("UsageError", "unknown subcommand " + command, 2);
    return 2;
  } catch (const Error& e) {
    print_error(e.kind(), e.what(), e.code());
    return e.code();
  } catch (const std::exception& e) {
    print_error("InternalError", e.what(), 3);
    return 3;
  }
}

}  // namespace fujita
