// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: fermix {ground|quench|shots|converge} [options]

#include <omp.h>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fermix/config.hpp"
#include "fermix/errors.hpp"
#include "fermix/run.hpp"

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kNumerical = 3, kAnalysis = 4 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string output;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration");
  cmd->add_option("--set", c.sets, "Override, e.g. --set particles.N_A=3 (repeatable)");
  cmd->add_option("--output", c.output, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "RNG seed (overrides rng_seed)");
  cmd->add_option("--threads", c.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction-quench dynamics of two-species fermions in a double well"};
  app.require_subcommand(1);
  Common common;
  struct Sub {
    const char* name;
    const char* help;
    fermix::RunMode mode;
  };
  const Sub subs[] = {
      {"ground", "Ground states at g_initial", fermix::RunMode::Ground},
      {"quench", "Ground state at g_initial, evolution at g_final", fermix::RunMode::Quench},
      {"shots", "Simulated single-shot images of the evolved CI state", fermix::RunMode::Shots},
      {"converge", "Density deviation across a ladder of basis sizes", fermix::RunMode::Converge},
  };
  std::vector<CLI::App*> cmds;
  for (const Sub& s : subs) {
    CLI::App* c = app.add_subcommand(s.name, s.help);
    add_common(c, common);
    cmds.push_back(c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  fermix::RunMode mode = fermix::RunMode::Quench;
  for (std::size_t k = 0; k < cmds.size(); ++k)
    if (cmds[k]->parsed()) mode = subs[k].mode;

  try {
    std::vector<std::string> overrides = common.sets;
    if (!common.output.empty()) overrides.push_back("output_dir=\"" + common.output + "\"");
    if (common.seed) overrides.push_back("rng_seed=" + std::to_string(*common.seed));
    std::optional<std::filesystem::path> path;
    if (!common.config.empty()) path = common.config;
    const fermix::RunConfig cfg = fermix::load_config(path, overrides);
    if (common.threads > 0) omp_set_num_threads(common.threads);
    const auto manifest = fermix::run_scenario(cfg, mode, join_args(argc, argv));
    std::cout << manifest["results"].dump(2) << '\n';
    std::cout << "manifest: " << (std::filesystem::path(cfg.output_dir) / "manifest.json").string() << '\n';
    return kOk;
  } catch (const fermix::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const fermix::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kNumerical;
  } catch (const fermix::AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return kAnalysis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
