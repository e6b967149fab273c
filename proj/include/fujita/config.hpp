#pragma once

#include <string>
#include <vector>

#include "fujita/manifold.hpp"
#include "fujita/semilinear.hpp"

namespace fujita {

// Experiment description loaded from a JSON file. Every field has a default;
// unknown keys anywhere in the document are rejected, and the effective
// (fully materialized) form can be serialized back for echoing.
struct ExperimentConfig {
  struct Manifold {
    std::string builtin;  // "euclidean", or empty when a family block is given
    int dimension = 2;
    double R_max = 1024.0;
    bool has_family = false;
    std::vector<double> exponents = {2.0};
    double C = 1.0;
    double r_base = 3.0;
    double r_splice = 1.0;
  } manifold;

  struct Problem {
    double p = 2.0;
    std::string u0_kind = "gaussian";  // gaussian | bump
    double amplitude = 0.1;
    double width = 1.0;
  } problem;

  struct Solver {
    int N = 1024;
    double eta = 0.01;
    double dt_init = 0.0;
    double dt_min = 1e-12;
    double dt_max = 1e308;
    double U_max = 1e8;
    double T = 0.0;  // 0 -> solver default horizon
  } solver;

  struct Sweep {
    std::vector<double> amplitudes = {0.8, 0.4, 0.2};
    double bracket_width = 0.1;
    int budget = 64;
    double p_lo = 1.2;
    double p_hi = 6.0;
  } sweep;

  struct HeatKernel {
    std::vector<double> times = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  } heat_kernel;

  struct Picard {
    double delta = 2.0;
    double tol = 1e-10;
    int slices = 40;
    int cells = 2048;
  } picard;

  struct Certificate {
    double r0 = 1.0;
    int shells = 8;
    std::vector<int> i_list;  // empty -> 2..shells
  } certificate;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json"};
  } output;

  struct Report {
    std::vector<std::string> inputs;  // sweep CSVs to merge
  } report;

  unsigned long seed = 0;
  int threads = 0;  // 0 -> hardware concurrency
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// the fully materialized config as pretty JSON (what the CLI echoes)
std::string effective_config(const ExperimentConfig& cfg);

ModelManifold build_manifold(const ExperimentConfig::Manifold& mc);
InitialData build_initial_data(const ExperimentConfig::Problem& pc);

}  // namespace fujita
