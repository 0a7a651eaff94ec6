// bdfp: batch front-end for the dressed-vacuum dispersion, the Choquard-Pekar
// minimizer, rank-2 trial-state energy scans, alpha sweeps, and the
// projector-algebra verification suite.

#include <cstdio>
#include <deque>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "bdfp/errors.hpp"
#include "bdfp/runner.hpp"

namespace {

struct FlagCapture {
  CLI::Option* option = nullptr;
  std::string key;
  std::string value;
};

// CLI11 keeps pointers to the capture strings; a deque never reallocates them.
void add_common_flags(CLI::App* cmd, std::string& config_path,
                      std::deque<FlagCapture>& captures) {
  cmd->add_option("--config", config_path, "flat key=value config file");
  auto capture = [&](const std::string& flag, const std::string& key, const std::string& help) {
    captures.push_back({nullptr, key, {}});
    FlagCapture& c = captures.back();
    c.option = cmd->add_option(flag, c.value, help);
  };
  capture("--alpha", "alpha", "fine-structure coupling");
  capture("--cutoff", "cutoff", "momentum cutoff");
  capture("--grid", "grid", "radial grid points");
  capture("--box", "box", "box length (0 = auto)");
  capture("--cartesian", "cartesian", "points per axis of the 3D grid");
  capture("--out", "out", "output path");
  capture("--format", "format", "json | csv");
  capture("--seed", "seed", "seed for randomized suites");
  capture("--alphas", "alphas", "comma-separated sweep couplings");
  capture("--cache-dir", "cache_dir", "dispersion cache directory");
  capture("--scan-points", "scan_points", "lambda scan points");
  capture("--fp-tol", "fp_tol", "fixed-point tolerance");
  capture("--pekar-nodes", "pekar_nodes", "radial nodes for the Pekar solver");
  capture("--pekar-tol", "pekar_tol", "Pekar EL residual tolerance");
  capture("--structure-instances", "structure_instances", "random instances to draw");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BDF positronium toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"dispersion", "pekar", "energy", "sweep",
                                             "structure-check"};
  std::string config_path;
  std::deque<FlagCapture> captures;
  for (const std::string& name : commands) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common_flags(cmd, config_path, captures);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    std::vector<std::pair<std::string, std::string>> file_kv;
    if (!config_path.empty()) file_kv = bdfp::read_config_file(config_path);
    std::vector<std::pair<std::string, std::string>> flag_kv;
    for (const FlagCapture& c : captures)
      if (c.option->count() > 0) flag_kv.emplace_back(c.key, c.value);

    const bdfp::RunConfig config = bdfp::build_config(command, file_kv, flag_kv);
    const bdfp::RunReport report = bdfp::run(config);

    for (const auto& [stage, seconds] : report.timings)
      std::fprintf(stderr, "[bdfp] %s: %.3fs\n", stage.c_str(), seconds);
    for (const auto& [code, message] : report.warnings)
      std::fprintf(stderr, "[bdfp] warning %s: %s\n", code.c_str(), message.c_str());
    if (report.output_path.empty())
      std::cout << report.payload_json;
    else
      std::fprintf(stderr, "[bdfp] wrote %s\n", report.output_path.c_str());
    return 0;
  } catch (const bdfp::Error& e) {
    std::fprintf(stderr, "bdfp: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bdfp: unexpected error: %s\n", e.what());
    return 2;
  }
}
