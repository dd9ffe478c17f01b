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

// CLI orchestration: strict JSON configs, deterministic figure-data
// commands, and a generic run pipeline. Configs are single JSON documents
// with sections model, input_state, sampling, fit, output (plus run for the
// generic command); unknown keys are rejected with their dotted path.

#ifndef NJCM_PIPELINE_HPP
#define NJCM_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "njcm/estimation.hpp"

namespace njcm::pipeline {

using nlohmann::json;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::uint64_t master_seed = 0;
  int threads = 1;
  int replicates = 1;
};

// Built-in defaults for a command (fig1 | fig2 | fig3 | fig4 | run).
json default_config(const std::string& command);

// Defaults deep-merged with the user fragment, then strictly validated.
json effective_config(const std::string& command, const json& user);

// FNV-1a 64 hash of the canonical (sorted-key) dump, as hex.
std::string config_hash(const json& config);

// FitResult -> JSON (coefficients, row-major covariance, diagnostics).
json fit_to_json(const FitResult& fit);

// Reads a config file; empty path yields an empty fragment. Parse errors
// become ConfigError with line/column diagnostics.
json load_config_file(const std::filesystem::path& path);

void cmd_fig1(const json& config, const RunOptions& opts);
void cmd_fig2(const json& config, const RunOptions& opts);
void cmd_fig3(const json& config, const RunOptions& opts);
void cmd_fig4(const json& config, const RunOptions& opts);
void cmd_run(const json& config, const RunOptions& opts);

// Dispatch by command name; `user` is the raw (unmerged) config fragment.
void run_command(const std::string& command, const json& user,
                 const RunOptions& opts);

}  // namespace njcm::pipeline

#endif  // NJCM_PIPELINE_HPP
