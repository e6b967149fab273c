#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fujita/cli.hpp"
#include "fujita/config.hpp"
#include "fujita/errors.hpp"
#include "fujita/io.hpp"

using namespace fujita;
namespace fs = std::filesystem;

namespace {

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"fujita_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

fs::path sandbox() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "fujita_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = sandbox() / name;
  atomic_write(p, body);
  return p;
}

const std::string kEuclid2 = R"({
  "manifold": {"builtin": "euclidean", "dimension": 2, "R_max": 512.0},
  "problem": {"p": 2.0, "u0": {"kind": "gaussian", "amplitude": 0.05, "width": 1.0}},
  "solver": {"N": 512, "T": 50.0}
})";

}  // namespace

TEST_CASE("io: decimal round-trip, hashing, atomic writes") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 2.5e17, 0.0, -42.75}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.25) == "0.25");  // shortest form, not 17 digits
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hash_hex("a") == "af63dc4c8601ec8c");

  const fs::path p = sandbox() / "nested" / "dir" / "file.txt";
  atomic_write(p, "payload");
  CHECK(read_file(p) == "payload");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  CHECK_THROWS_AS(read_file(sandbox() / "nope.txt"), ValidationError);
}

TEST_CASE("config: defaults materialize, unknown keys rejected") {
  const ExperimentConfig cfg = parse_config("{}");
  CHECK(cfg.manifold.builtin == "euclidean");
  CHECK(cfg.solver.N == 1024);
  CHECK(cfg.problem.p == 2.0);
  CHECK(cfg.picard.delta == 2.0);
  const std::string echoed = effective_config(cfg);
  for (const char* key : {"manifold", "problem", "solver", "sweep", "heat_kernel",
                          "picard", "certificate", "output", "seed", "threads"}) {
    CHECK(echoed.find(std::string("\"") + key + "\"") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config(R"({"solvr": {}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"cells": 4}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"N": "many"}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"problem": {"u0": {"kind": "spike"}}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"output": {"formats": ["pdf"]}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"manifold": {"builtin": "torus"}})"), ValidationError);
  CHECK_THROWS_AS(parse_config("not json"), ValidationError);
  // a manifold block must pick a branch
  CHECK_THROWS_AS(parse_config(R"({"manifold": {"dimension": 2}})"), ValidationError);
}

TEST_CASE("usage and validation exit codes") {
  CHECK(cli({"frobnicate", "--config", "x.json"}) == 2);  // unknown subcommand
  CHECK(cli({"simulate"}) == 2);                          // missing --config
  CHECK(cli({"simulate", "--config", (sandbox() / "absent.json").string()}) == 2);
  const auto bad = write_config("bad.json", R"({"unknown_block": 1})");
  CHECK(cli({"simulate", "--config", bad.string()}) == 2);
}

TEST_CASE("classify encodes the verdict in the exit code") {
  const auto div = write_config("div.json", kEuclid2);
  const auto out = (sandbox() / "cls").string();
  CHECK(cli({"classify", "--config", div.string(), "--out", out}) == 0);  // Divergent
  CHECK(fs::exists(fs::path(out) / "classify.json"));
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  const std::string body = read_file(fs::path(out) / "classify.json");
  CHECK(body.find("Divergent") != std::string::npos);

  const auto conv = write_config("conv.json", R"({
    "manifold": {"builtin": "euclidean", "dimension": 2, "R_max": 512.0},
    "problem": {"p": 3.0}})");
  CHECK(cli({"classify", "--config", conv.string(), "--out",
             (sandbox() / "cls2").string()}) == 1);  // Convergent
}

TEST_CASE("simulate: outputs, undetermined exit code, determinism") {
  const auto cfgp = write_config("sim.json", kEuclid2);
  const auto a = (sandbox() / "simA").string();
  const auto b = (sandbox() / "simB").string();
  CHECK(cli({"simulate", "--config", cfgp.string(), "--out", a}) == 0);
  CHECK(cli({"simulate", "--config", cfgp.string(), "--out", b}) == 0);
  for (const char* f : {"trace.csv", "outcome.json"}) {
    const std::string fa = read_file(fs::path(a) / f);
    CHECK(fa == read_file(fs::path(b) / f));  // byte-identical
    CHECK(!fa.empty());
  }
  const std::string trace = read_file(fs::path(a) / "trace.csv");
  CHECK(trace.rfind("t,sup_u,mass,dt\n", 0) == 0);
  CHECK(read_file(fs::path(a) / "outcome.json").find("GlobalEvidence") != std::string::npos);

  // a slow fat profile over a short horizon settles nothing
  const auto undet = write_config("undet.json", R"({
    "manifold": {"builtin": "euclidean", "dimension": 2, "R_max": 512.0},
    "problem": {"p": 2.0, "u0": {"kind": "gaussian", "amplitude": 1.0, "width": 2.0}},
    "solver": {"N": 512, "T": 1.0}})");
  CHECK(cli({"simulate", "--config", undet.string(), "--out",
             (sandbox() / "simU").string()}) == 4);
}

TEST_CASE("format selection prunes outputs") {
  const auto cfgp = write_config("fmt.json", kEuclid2);
  const auto out = (sandbox() / "fmt").string();
  CHECK(cli({"simulate", "--config", cfgp.string(), "--out", out, "--format", "json"}) == 0);
  CHECK(fs::exists(fs::path(out) / "outcome.json"));
  CHECK_FALSE(fs::exists(fs::path(out) / "trace.csv"));
}

TEST_CASE("heat-kernel and certificate subcommands run end to end") {
  const auto hk = write_config("hk.json", R"({
    "manifold": {"builtin": "euclidean", "dimension": 2, "R_max": 512.0},
    "solver": {"N": 512},
    "heat_kernel": {"times": [0.5, 1.0, 2.0]}})");
  const auto hko = (sandbox() / "hk").string();
  CHECK(cli({"heat-kernel", "--config", hk.string(), "--out", hko}) == 0);
  CHECK(read_file(fs::path(hko) / "kernel.csv").rfind("t,r,P\n", 0) == 0);
  CHECK(read_file(fs::path(hko) / "kernel_report.json").find("\"bounded\": true") !=
        std::string::npos);

  const auto ct = write_config("cert.json", R"({
    "manifold": {"builtin": "euclidean", "dimension": 2, "R_max": 512.0},
    "problem": {"p": 2.0},
    "certificate": {"r0": 1.0, "shells": 6}})");
  const auto cto = (sandbox() / "cert").string();
  CHECK(cli({"certificate", "--config", ct.string(), "--out", cto}) == 0);
  const std::string rep = read_file(fs::path(cto) / "certificate_report.json");
  CHECK(rep.find("\"a\":") != std::string::npos);
  CHECK(rep.find("a_decay") != std::string::npos);
  CHECK(read_file(fs::path(cto) / "phi_samples.csv").rfind("r,t,phi\n", 0) == 0);
}

TEST_CASE("report merges sweep CSVs into an SVG phase diagram") {
  const fs::path csv = sandbox() / "sweep_fixture.csv";
  atomic_write(csv,
               "p,amplitude,outcome,alpha1\n"
               "2.2,0.8,BlowUp,1\n"
               "2.2,0.4,BlowUp,1\n"
               "3.4,0.8,GlobalEvidence,1\n"
               "3.4,0.4,Undetermined,1\n"
               "2.2,0.8,BlowUp,2\n"
               "3.4,0.8,GlobalEvidence,2\n");
  const auto rep = write_config("rep.json", std::string(R"({
    "report": {"inputs": [")") + csv.string() + R"("]},
    "output": {"formats": ["csv", "svg"]}})");
  const auto out = (sandbox() / "rep").string();
  CHECK(cli({"report", "--config", rep.string(), "--out", out}) == 0);
  const std::string svg = read_file(fs::path(out) / "phase_diagram.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("#d62728") != std::string::npos);  // blow-up marker color
  CHECK(read_file(fs::path(out) / "merged.csv").rfind("p,amplitude,outcome,alpha1\n", 0) == 0);

  // SVG is deterministic byte-for-byte as well
  const auto out2 = (sandbox() / "rep2").string();
  CHECK(cli({"report", "--config", rep.string(), "--out", out2}) == 0);
  CHECK(svg == read_file(fs::path(out2) / "phase_diagram.svg"));

  const fs::path badcsv = sandbox() / "bad.csv";
  atomic_write(badcsv, "wrong,header\n1,2\n");
  const auto badrep = write_config("badrep.json", std::string(R"({
    "report": {"inputs": [")") + badcsv.string() + R"("]}})");
  CHECK(cli({"report", "--config", badrep.string(), "--out",
             (sandbox() / "rep3").string()}) == 2);
}

TEST_CASE("manifest lists every output with its content hash") {
  const auto cfgp = write_config("man.json", kEuclid2);
  const auto out = (sandbox() / "man").string();
  CHECK(cli({"simulate", "--config", cfgp.string(), "--out", out}) == 0);
  const std::string manifest = read_file(fs::path(out) / "manifest.json");
  for (const char* f : {"trace.csv", "outcome.json", "effective_config.json"}) {
    CHECK(manifest.find(f) != std::string::npos);
    const std::string h = hash_hex(read_file(fs::path(out) / f));
    CHECK(manifest.find(h) != std::string::npos);
  }
  CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
}
