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

#include "qswlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "qswlab/error.hpp"
#include "qswlab/format.hpp"

namespace qswlab {

using json = nlohmann::json;

namespace {

json finite_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

}  // namespace

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(std::ostream &out, const RunManifest &m) {
    out << "# command=" << m.command << '\n'
        << "# graph=" << m.graph_path << '\n'
        << "# graph_hash=" << m.graph_hash << '\n'
        << "# engine=" << m.engine << '\n'
        << "# t_final=" << format_number(m.t_final) << '\n'
        << "# dt=" << format_number(m.dt) << '\n'
        << "# samples=" << m.samples << '\n'
        << "# trajectories=" << m.trajectories << '\n'
        << "# seed=" << m.seed << '\n'
        << "# version=" << m.tool_version << '\n';
    for (const auto &[key, value] : m.extra) {
        out << "# " << key << '=' << value << '\n';
    }
    out << "# wall_clock_seconds=" << format_number(m.wall_clock_seconds, 6) << '\n';
}

void write_population_csv(std::ostream &out, const std::vector<std::string> &labels, const PopulationSeries &series) {
    out << 't';
    for (const auto &l : labels) {
        out << ",p_" << l;
    }
    out << '\n';
    for (std::size_t s = 0; s < series.sample_times.size(); ++s) {
        out << format_number(series.sample_times[s]);
        for (double p : series.populations[s]) {
            out << ',' << format_number(p);
        }
        out << '\n';
    }
}

void write_ensemble_csv(std::ostream &out, const std::vector<std::string> &labels, const EnsembleResult &result) {
    out << 't';
    for (const auto &l : labels) {
        out << ",p_" << l;
    }
    for (const auto &l : labels) {
        out << ",se_" << l;
    }
    out << '\n';
    for (std::size_t s = 0; s < result.sample_times.size(); ++s) {
        out << format_number(result.sample_times[s]);
        for (double p : result.mean_populations[s]) {
            out << ',' << format_number(p);
        }
        for (double se : result.stderr_populations[s]) {
            out << ',' << format_number(se);
        }
        out << '\n';
    }
}

std::string trajectory_log_line(const GraphSpec &g, std::uint64_t index, const std::vector<JumpEvent> &jumps) {
    json jumps_json = json::array();
    for (const auto &j : jumps) {
        jumps_json.push_back(json::array({j.time, g.label(j.from), g.label(j.to)}));
    }
    return json{{"idx", index}, {"jumps", jumps_json}}.dump();
}

json validation_report_json(const GraphSpec &g, const ValidationReport &report) {
    json violations = json::array();
    for (const auto &v : report.violations) {
        violations.push_back({{"n", g.label(v.n)},
                              {"m", g.label(v.m)},
                              {"g", json::array({v.coupling.real(), v.coupling.imag()})},
                              {"lambda_n", v.lambda_n},
                              {"lambda_m", v.lambda_m}});
    }
    json subgraphs = json::array();
    json lambdas = json::array();
    for (std::size_t c = 0; c < report.subgraphs.size(); ++c) {
        json nodes = json::array();
        for (NodeIndex k : report.subgraphs[c]) {
            nodes.push_back(g.label(k));
        }
        subgraphs.push_back(nodes);
        lambdas.push_back(report.subgraph_lambdas[c] ? json(*report.subgraph_lambdas[c]) : json(nullptr));
    }
    return {{"admissible", report.admissible},
            {"violations", violations},
            {"subgraphs", subgraphs},
            {"subgraph_lambdas", lambdas},
            {"trotter_mismatch", report.trotter_mismatch}};
}

json resource_estimate_json(const GraphSpec &g, const ResourceEstimate &estimate) {
    json subgraphs = json::array();
    for (const auto &s : estimate.subgraphs) {
        json nodes = json::array();
        for (NodeIndex k : s.nodes) {
            nodes.push_back(g.label(k));
        }
        subgraphs.push_back({{"nodes", nodes},
                             {"lambda", s.lambda},
                             {"t_avg", finite_or_null(s.t_avg)},
                             {"mean_interjump", finite_or_null(s.mean_interjump)}});
    }
    return {{"subgraphs", subgraphs}, {"worst_case_measurements", estimate.worst_case_measurements}};
}

json ancilla_outcome_json(double t, const AncillaOutcome &outcome) {
    json state = json::array();
    for (Eigen::Index k = 0; k < outcome.post_state.size(); ++k) {
        state.push_back(json::array({outcome.post_state(k).real(), outcome.post_state(k).imag()}));
    }
    return {{"t", t}, {"success_probability", outcome.success_probability}, {"post_state", state}};
}

std::vector<double> uniform_sample_times(double t_final, std::size_t count) {
    if (count == 0) {
        throw InputError("sample count must be positive");
    }
    if (count == 1) {
        return {t_final};
    }
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i) {
        times[i] = t_final * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    times.back() = t_final;
    return times;
}

}  // namespace qswlab
