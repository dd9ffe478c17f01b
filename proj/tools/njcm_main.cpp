// Copyright 2026 The njcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "njcm/errors.hpp"
#include "njcm/pipeline.hpp"
#include "njcm/version.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  njcm::pipeline::RunOptions run;
};

void add_common_flags(CLI::App* cmd, CliOptions* opts) {
  cmd->add_option("--config", opts->config_path,
                  "JSON config file merged over the command defaults")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts->run.master_seed,
                  "Master seed for the measurement substreams");
  cmd->add_option("--out", opts->run.out_dir,
                  "Output directory (created if missing)");
  cmd->add_option("--threads", opts->run.threads, "Worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--replicates", opts->run.replicates,
                  "Independent replicates per command")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion nonlinear Jaynes-Cummings simulator and "
               "shot-noise estimation pipeline"};
  app.set_version_flag("--version", std::string(njcm::kVersion));
  app.require_subcommand(1);

  CliOptions opts;
  const char* descriptions[][2] = {
      {"fig1", "Sample a coupling sweep and extract the Hamiltonian "
               "expectation from an odd parity fit"},
      {"fig2", "Hamiltonian expectation versus Fock number"},
      {"fig3", "Commutator estimate from an even parity fit (coherent "
               "state, second sideband)"},
      {"fig4", "Commutator versus time for several sidebands"},
      {"run", "Configurable pipeline: simulate | sample | fit | analyze"},
  };
  for (const auto& d : descriptions)
    add_common_flags(app.add_subcommand(d[0], d[1]), &opts);

  std::string command;
  try {
    app.parse(argc, argv);
    command = app.get_subcommands().front()->get_name();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const njcm::pipeline::json user =
        njcm::pipeline::load_config_file(opts.config_path);
    njcm::pipeline::run_command(command, user, opts.run);
  } catch (const njcm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const njcm::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const njcm::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
