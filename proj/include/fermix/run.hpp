// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file run.hpp
 * @brief Scenario execution and output layout.
 *
 * Every run writes into cfg.output_dir and finishes with manifest.json:
 * resolved config, its SHA-256, library versions, the list of files written
 * and derived results. A failing stage leaves "complete": false together with
 * the stage name and message; the original error is rethrown with the stage
 * prefixed.
 */

#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "fermix/config.hpp"

namespace fermix {

enum class RunMode { Ground, Quench, Shots, Converge };

std::string_view to_string(RunMode m);

/// Returns the manifest (also written to output_dir/manifest.json).
nlohmann::json run_scenario(const RunConfig& cfg, RunMode mode, const std::string& command_line = {});

/// Library and build identification stored in manifests.
nlohmann::json version_info();

}  // namespace fermix
