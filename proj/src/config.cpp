#include "fujita/config.hpp"

#include <set>

#include "json.hpp"

#include "fujita/errors.hpp"
#include "fujita/io.hpp"

namespace fujita {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ValidationError("config: unknown key \"" + item.key() + "\" in " + where);
  }
}

template <typename T>
void take(const json& obj, const char* key, T& into) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(doc, "top level",
               {"manifold", "problem", "solver", "sweep", "heat_kernel", "picard",
                "certificate", "output", "report", "seed", "threads"});

  ExperimentConfig cfg;
  if (doc.contains("manifold")) {
    const json& m = doc["manifold"];
    require_keys(m, "manifold",
                 {"builtin", "dimension", "R_max", "family", "r_splice"});
    take(m, "builtin", cfg.manifold.builtin);
    take(m, "dimension", cfg.manifold.dimension);
    take(m, "R_max", cfg.manifold.R_max);
    take(m, "r_splice", cfg.manifold.r_splice);
    if (m.contains("family")) {
      const json& f = m["family"];
      require_keys(f, "manifold.family", {"C", "exponents", "r_base"});
      cfg.manifold.has_family = true;
      take(f, "C", cfg.manifold.C);
      take(f, "exponents", cfg.manifold.exponents);
      take(f, "r_base", cfg.manifold.r_base);
    }
    if (cfg.manifold.builtin.empty() && !cfg.manifold.has_family)
      throw ValidationError("config: manifold needs either \"builtin\" or a \"family\" block");
    if (!cfg.manifold.builtin.empty() && cfg.manifold.builtin != "euclidean")
      throw ValidationError("config: unknown builtin manifold \"" + cfg.manifold.builtin + "\"");
  } else {
    cfg.manifold.builtin = "euclidean";
  }

  if (doc.contains("problem")) {
    const json& p = doc["problem"];
    require_keys(p, "problem", {"p", "u0"});
    take(p, "p", cfg.problem.p);
    if (p.contains("u0")) {
      const json& u = p["u0"];
      require_keys(u, "problem.u0", {"kind", "amplitude", "width"});
      take(u, "kind", cfg.problem.u0_kind);
      take(u, "amplitude", cfg.problem.amplitude);
      take(u, "width", cfg.problem.width);
      if (cfg.problem.u0_kind != "gaussian" && cfg.problem.u0_kind != "bump")
        throw ValidationError("config: u0.kind must be \"gaussian\" or \"bump\"");
    }
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    require_keys(s, "solver", {"N", "eta", "dt_init", "dt_min", "dt_max", "U_max", "T"});
    take(s, "N", cfg.solver.N);
    take(s, "eta", cfg.solver.eta);
    take(s, "dt_init", cfg.solver.dt_init);
    take(s, "dt_min", cfg.solver.dt_min);
    take(s, "dt_max", cfg.solver.dt_max);
    take(s, "U_max", cfg.solver.U_max);
    take(s, "T", cfg.solver.T);
  }

  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    require_keys(s, "sweep", {"amplitudes", "bracket_width", "budget", "p_lo", "p_hi"});
    take(s, "amplitudes", cfg.sweep.amplitudes);
    take(s, "bracket_width", cfg.sweep.bracket_width);
    take(s, "budget", cfg.sweep.budget);
    take(s, "p_lo", cfg.sweep.p_lo);
    take(s, "p_hi", cfg.sweep.p_hi);
  }

  if (doc.contains("heat_kernel")) {
    const json& h = doc["heat_kernel"];
    require_keys(h, "heat_kernel", {"times"});
    take(h, "times", cfg.heat_kernel.times);
  }

  if (doc.contains("picard")) {
    const json& p = doc["picard"];
    require_keys(p, "picard", {"delta", "tol", "slices", "cells"});
    take(p, "delta", cfg.picard.delta);
    take(p, "tol", cfg.picard.tol);
    take(p, "slices", cfg.picard.slices);
    take(p, "cells", cfg.picard.cells);
  }

  if (doc.contains("certificate")) {
    const json& c = doc["certificate"];
    require_keys(c, "certificate", {"r0", "shells", "i_list"});
    take(c, "r0", cfg.certificate.r0);
    take(c, "shells", cfg.certificate.shells);
    take(c, "i_list", cfg.certificate.i_list);
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_keys(o, "output", {"directory", "formats"});
    take(o, "directory", cfg.output.directory);
    take(o, "formats", cfg.output.formats);
    for (const auto& f : cfg.output.formats)
      if (f != "csv" && f != "json" && f != "svg")
        throw ValidationError("config: unknown output format \"" + f + "\"");
  }

  if (doc.contains("report")) {
    const json& r = doc["report"];
    require_keys(r, "report", {"inputs"});
    take(r, "inputs", cfg.report.inputs);
  }

  take(doc, "seed", cfg.seed);
  take(doc, "threads", cfg.threads);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

std::string effective_config(const ExperimentConfig& cfg) {
  json doc;
  json m;
  if (!cfg.manifold.builtin.empty()) m["builtin"] = cfg.manifold.builtin;
  m["dimension"] = cfg.manifold.dimension;
  m["R_max"] = cfg.manifold.R_max;
  if (cfg.manifold.has_family) {
    m["family"] = {{"C", cfg.manifold.C},
                   {"exponents", cfg.manifold.exponents},
                   {"r_base", cfg.manifold.r_base}};
    m["r_splice"] = cfg.manifold.r_splice;
  }
  doc["manifold"] = m;
  doc["problem"] = {{"p", cfg.problem.p},
                    {"u0",
                     {{"kind", cfg.problem.u0_kind},
                      {"amplitude", cfg.problem.amplitude},
                      {"width", cfg.problem.width}}}};
  doc["solver"] = {{"N", cfg.solver.N},       {"eta", cfg.solver.eta},
                   {"dt_init", cfg.solver.dt_init}, {"dt_min", cfg.solver.dt_min},
                   {"dt_max", cfg.solver.dt_max},   {"U_max", cfg.solver.U_max},
                   {"T", cfg.solver.T}};
  doc["sweep"] = {{"amplitudes", cfg.sweep.amplitudes},
                  {"bracket_width", cfg.sweep.bracket_width},
                  {"budget", cfg.sweep.budget},
                  {"p_lo", cfg.sweep.p_lo},
                  {"p_hi", cfg.sweep.p_hi}};
  doc["heat_kernel"] = {{"times", cfg.heat_kernel.times}};
  doc["picard"] = {{"delta", cfg.picard.delta},
                   {"tol", cfg.picard.tol},
                   {"slices", cfg.picard.slices},
                   {"cells", cfg.picard.cells}};
  doc["certificate"] = {{"r0", cfg.certificate.r0},
                        {"shells", cfg.certificate.shells},
                        {"i_list", cfg.certificate.i_list}};
  doc["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
  doc["report"] = {{"inputs", cfg.report.inputs}};
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  return doc.dump(2) + "\n";
}

ModelManifold build_manifold(const ExperimentConfig::Manifold& mc) {
  if (mc.builtin == "euclidean") return ModelManifold::euclidean(mc.dimension, mc.R_max);
  VolumeFamily fam{mc.exponents, mc.C, mc.r_base};
  return ModelManifold::power_log(mc.dimension, fam, mc.r_splice, mc.R_max);
}

InitialData build_initial_data(const ExperimentConfig::Problem& pc) {
  if (pc.u0_kind == "bump") return InitialData::bump(pc.amplitude, pc.width);
  return InitialData::gaussian(pc.amplitude, pc.width);
}

}  // namespace fujita
