// Copyright 2026 The qswlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qswlab/ancilla.hpp"
#include "qswlab/graph.hpp"
#include "qswlab/lindblad.hpp"
#include "qswlab/qtqc.hpp"
#include "qswlab/trajectory.hpp"

namespace qswlab {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string content_hash(std::string_view bytes);

/// Provenance embedded at the top of every output file as "# key=value" lines.
struct RunManifest {
    std::string command;
    std::string graph_path;
    std::string graph_hash;
    std::string engine;
    double t_final = 0.0;
    double dt = 0.0;
    std::size_t samples = 0;
    std::uint64_t trajectories = 0;
    std::uint64_t seed = 0;
    std::string tool_version = std::string(kToolVersion);
    double wall_clock_seconds = 0.0;
    /// Engine-specific metadata, written after the fixed fields.
    std::vector<std::pair<std::string, std::string>> extra;
};

void write_manifest(std::ostream &out, const RunManifest &manifest);

/// Header "t,p_<label>..." then one row per sample time.
void write_population_csv(std::ostream &out, const std::vector<std::string> &labels, const PopulationSeries &series);

/// As write_population_csv with trailing "se_<label>" columns.
void write_ensemble_csv(std::ostream &out, const std::vector<std::string> &labels, const EnsembleResult &result);

/// {"idx": k, "jumps": [[t, from, to], ...]} on one line.
std::string trajectory_log_line(const GraphSpec &g, std::uint64_t index, const std::vector<JumpEvent> &jumps);

nlohmann::json validation_report_json(const GraphSpec &g, const ValidationReport &report);

/// Infinite waiting times are written as null.
nlohmann::json resource_estimate_json(const GraphSpec &g, const ResourceEstimate &estimate);

nlohmann::json ancilla_outcome_json(double t, const AncillaOutcome &outcome);

/// Evenly spaced times: {T} for count 1, otherwise i*T/(count-1), i = 0..count-1.
std::vector<double> uniform_sample_times(double t_final, std::size_t count);

}  // namespace qswlab
