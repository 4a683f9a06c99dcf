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

#include "qswlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qswlab/ancilla.hpp"
#include "qswlab/error.hpp"
#include "qswlab/format.hpp"
#include "qswlab/graph.hpp"
#include "qswlab/io.hpp"
#include "qswlab/jump_engine.hpp"
#include "qswlab/lindblad.hpp"
#include "qswlab/operators.hpp"
#include "qswlab/qtqc.hpp"

namespace qswlab {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Options {
    std::string graph_path;
    std::string engine = "master";
    double t_final = 1.0;
    std::optional<double> dt;
    std::size_t samples = 21;
    std::uint64_t trajectories = 1000;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    std::string start_node;
    std::string out_path;
    std::optional<double> trotter_threshold;
    std::string log_path;
    std::string dump_path;
    double time = 0.0;
};

struct LoadedGraph {
    std::string text;
    GraphSpec graph;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open \"" + path + "\"");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw InputError("error reading \"" + path + "\"");
    }
    return buf.str();
}

LoadedGraph load_graph(const std::string &path) {
    std::string text = read_file(path);
    GraphSpec g = parse_graph(text);
    return {std::move(text), std::move(g)};
}

std::uint64_t resolve_seed(const Options &opt) {
    if (opt.seed) {
        return *opt.seed;
    }
    const char *env = std::getenv("QSWLAB_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    const std::string_view s(env);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError("QSWLAB_SEED is not an unsigned 64-bit integer: \"" + std::string(s) + "\"");
    }
    return value;
}

StateVector start_state(const GraphSpec &g, const Options &opt) {
    if (!opt.start_node.empty()) {
        const auto k = g.find(opt.start_node);
        if (!k) {
            throw InputError("unknown start node \"" + opt.start_node + "\"");
        }
        return basis_state(g.node_count(), *k);
    }
    return initial_state_vector(g);
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InputError("cannot write \"" + path + "\"");
    }
    f << content;
    f.close();
    if (!f) {
        throw InputError("error writing \"" + path + "\"");
    }
}

void emit(const std::string &path, const std::string &content, std::ostream &out) {
    if (path.empty()) {
        out << content;
    } else {
        write_text_file(path, content);
    }
}

void dump_operators(const GraphSpec &g, const std::string &path) {
    std::ostringstream s;
    s << "# H\n";
    write_matrix(s, build_hamiltonian(g));
    s << "# K\n";
    write_matrix(s, build_k(g));
    write_text_file(path, s.str());
}

void write_jump_log(const GraphSpec &g, const EnsembleRun &run, const std::string &path) {
    std::ostringstream s;
    for (std::size_t i = 0; i < run.jump_logs.size(); ++i) {
        s << trajectory_log_line(g, i, run.jump_logs[i]) << '\n';
    }
    write_text_file(path, s.str());
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_deviation(const std::vector<std::vector<double>> &a, const std::vector<std::vector<double>> &b) {
    double worst = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) {
        for (std::size_t k = 0; k < a[s].size(); ++k) {
            worst = std::max(worst, std::abs(a[s][k] - b[s][k]));
        }
    }
    return worst;
}

EnsembleOptions ensemble_options(const Options &opt, std::uint64_t seed) {
    EnsembleOptions e;
    e.master_seed = seed;
    e.trajectories = opt.trajectories;
    e.jobs = opt.jobs;
    e.keep_jumps = !opt.log_path.empty();
    return e;
}

double jump_micro_step(const GraphSpec &g, const Options &opt) {
    return opt.dt ? *opt.dt : default_micro_step(build_hamiltonian(g), build_k(g));
}

int cmd_validate(const Options &opt, std::ostream &out) {
    const auto loaded = load_graph(opt.graph_path);
    const ValidationReport report = validate(loaded.graph);
    out << validation_report_json(loaded.graph, report).dump(2) << '\n';
    return report.admissible ? kExitOk : kExitAdmissibility;
}

int cmd_run(const Options &opt, std::ostream &out, std::ostream &err) {
    const auto loaded = load_graph(opt.graph_path);
    const GraphSpec &g = loaded.graph;
    const StateVector psi0 = start_state(g, opt);
    const auto samples = uniform_sample_times(opt.t_final, opt.samples);
    const std::uint64_t seed = resolve_seed(opt);
    if (!opt.dump_path.empty()) {
        dump_operators(g, opt.dump_path);
    }
    if (opt.engine == "master" && !opt.log_path.empty()) {
        throw InputError("--log-trajectories requires a stochastic engine");
    }

    RunManifest manifest;
    manifest.command = "run";
    manifest.graph_path = opt.graph_path;
    manifest.graph_hash = content_hash(loaded.text);
    manifest.engine = opt.engine;
    manifest.t_final = opt.t_final;
    manifest.samples = samples.size();
    manifest.seed = seed;

    const auto start = Clock::now();
    std::ostringstream payload;
    if (opt.engine == "master") {
        manifest.dt = opt.dt ? *opt.dt : default_oracle_dt(g);
        const auto series = integrate(g, pure_density(psi0), opt.t_final, manifest.dt, samples);
        write_population_csv(payload, g.labels(), series);
    } else {
        manifest.trajectories = opt.trajectories;
        EnsembleRun run;
        if (opt.engine == "trajectories") {
            manifest.dt = jump_micro_step(g, opt);
            run = run_jump_ensemble(g, psi0, opt.t_final, samples, ensemble_options(opt, seed), Splitting::exact,
                                    manifest.dt);
        } else {
            const ValidationReport report = validate(g);
            if (report.admissible) {
                QtqcConfig cfg{g, opt.t_final, samples, seed, opt.trajectories};
                run = run_qtqc_ensemble(cfg, psi0, opt.jobs, false, !opt.log_path.empty());
            } else if (opt.trotter_threshold && report.trotter_mismatch <= *opt.trotter_threshold) {
                err << "warning: graph is not admissible; running the approximate Trotter mode (mismatch "
                    << format_number(report.trotter_mismatch, 6) << ")\n";
                manifest.dt = jump_micro_step(g, opt);
                manifest.extra.emplace_back("mode", "trotter");
                manifest.extra.emplace_back("trotter_mismatch", format_number(report.trotter_mismatch));
                run = run_jump_ensemble(g, psi0, opt.t_final, samples, ensemble_options(opt, seed),
                                        Splitting::trotter, manifest.dt);
            } else {
                throw AdmissibilityError("qtqc requires an admissible graph (trotter_mismatch = " +
                                         format_number(report.trotter_mismatch, 6) + ")");
            }
        }
        write_ensemble_csv(payload, g.labels(), run.result);
        if (!opt.log_path.empty()) {
            write_jump_log(g, run, opt.log_path);
        }
    }
    manifest.wall_clock_seconds = seconds_since(start);

    std::ostringstream file;
    write_manifest(file, manifest);
    file << payload.str();
    emit(opt.out_path, file.str(), out);
    return kExitOk;
}

int cmd_compare(const Options &opt, std::ostream &out, std::ostream &err) {
    const auto loaded = load_graph(opt.graph_path);
    const GraphSpec &g = loaded.graph;
    const StateVector psi0 = start_state(g, opt);
    const auto samples = uniform_sample_times(opt.t_final, opt.samples);
    const std::uint64_t seed = resolve_seed(opt);
    const double oracle_dt = opt.dt ? *opt.dt : default_oracle_dt(g);
    const double tolerance = 4.0 / std::sqrt(static_cast<double>(opt.trajectories));
    // Populations lie in [0, 1], so a tolerance of 1 or more cannot discriminate.
    const bool undersampled = tolerance >= 1.0;

    const auto start = Clock::now();
    const auto oracle = integrate(g, pure_density(psi0), opt.t_final, oracle_dt, samples);
    bool all_pass = true;
    json engines = json::object();
    auto judge = [&](const std::string &name, const EnsembleResult &r) {
        const double dev = max_deviation(r.mean_populations, oracle.populations);
        const bool pass = dev <= tolerance && !undersampled;
        all_pass = all_pass && pass;
        engines[name] = {{"max_deviation", dev}, {"pass", pass}};
    };

    EnsembleOptions eopt = ensemble_options(opt, seed);
    eopt.keep_jumps = false;
    judge("trajectories", run_jump_ensemble(g, psi0, opt.t_final, samples, eopt).result);

    const ValidationReport report = validate(g);
    if (!report.admissible) {
        engines["qtqc"] = {{"skipped", "graph is not admissible"}};
    } else {
        const QtqcEngine qtqc(g);
        bool eigenstate = true;
        try {
            qtqc.support_lambda(psi0);
        } catch (const InputError &) {
            eigenstate = false;
        }
        if (eigenstate) {
            QtqcConfig cfg{g, opt.t_final, samples, seed, opt.trajectories};
            judge("qtqc", run_qtqc_ensemble(cfg, psi0, opt.jobs).result);
        } else {
            engines["qtqc"] = {{"skipped", "initial state is not an eigenstate of K"}};
        }
    }

    json doc = {{"graph", opt.graph_path},
                {"graph_hash", content_hash(loaded.text)},
                {"t_final", opt.t_final},
                {"dt", oracle_dt},
                {"samples", samples.size()},
                {"trajectories", opt.trajectories},
                {"seed", seed},
                {"version", std::string(kToolVersion)},
                {"tolerance", tolerance},
                {"undersampled", undersampled},
                {"engines", engines},
                {"pass", all_pass},
                {"wall_clock_seconds", seconds_since(start)}};
    emit(opt.out_path, doc.dump(2) + "\n", out);
    if (undersampled) {
        err << "note: tolerance 4/sqrt(S) = " << format_number(tolerance, 6) << " for S = " << opt.trajectories
            << " is at least 1 and cannot discriminate; increase --num-traj\n";
    } else if (!all_pass) {
        err << "note: deviation exceeds 4/sqrt(S) = " << format_number(tolerance, 6) << " for S = "
            << opt.trajectories << "\n";
    }
    return all_pass ? kExitOk : kExitAdmissibility;
}

int cmd_resources(const Options &opt, std::ostream &out) {
    const auto loaded = load_graph(opt.graph_path);
    out << resource_estimate_json(loaded.graph, resource_estimate(loaded.graph, opt.t_final)).dump(2) << '\n';
    return kExitOk;
}

int cmd_ancilla(const Options &opt, std::ostream &out) {
    const auto loaded = load_graph(opt.graph_path);
    const GraphSpec &g = loaded.graph;
    if (g.node_count() > kMaxAncillaDimension) {
        throw InputError("ancilla simulation is limited to " + std::to_string(kMaxAncillaDimension) + " nodes");
    }
    const auto outcome = ancilla_evolve(build_k(g), start_state(g, opt), opt.time);
    out << ancilla_outcome_json(opt.time, outcome).dump(2) << '\n';
    return kExitOk;
}

void add_graph(CLI::App *cmd, Options &opt) {
    cmd->add_option("graph", opt.graph_path, "Graph JSON file")->required();
}

void add_start_node(CLI::App *cmd, Options &opt) {
    cmd->add_option("--start-node", opt.start_node, "Start localized at this node label");
}

void add_simulation(CLI::App *cmd, Options &opt) {
    cmd->add_option("--t-final", opt.t_final, "Final time T")->check(CLI::NonNegativeNumber);
    cmd->add_option("--dt", opt.dt, "Oracle step (master) or no-jump micro-step (trajectories)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--samples", opt.samples, "Number of evenly spaced sample times in [0, T]")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--num-traj", opt.trajectories, "Trajectory count S")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "Master seed (falls back to QSWLAB_SEED, then 0)");
    cmd->add_option("--jobs", opt.jobs, "Worker threads (0 = available parallelism)");
    cmd->add_option("--out", opt.out_path, "Output file (default: standard output)");
    add_start_node(cmd, opt);
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app("Quantum stochastic walk laboratory", "qswlab");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    Options opt;

    auto *validate_cmd = app.add_subcommand("validate", "Check a graph for admissibility");
    add_graph(validate_cmd, opt);

    auto *run_cmd = app.add_subcommand("run", "Simulate populations and write a CSV");
    add_graph(run_cmd, opt);
    add_simulation(run_cmd, opt);
    run_cmd->add_option("--engine", opt.engine, "master | trajectories | qtqc")
        ->check(CLI::IsMember({"master", "trajectories", "qtqc"}));
    run_cmd->add_option("--trotter-threshold", opt.trotter_threshold,
                        "Allow qtqc on an inadmissible graph via Trotter splitting when the mismatch is at most this")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--log-trajectories", opt.log_path, "Write per-trajectory jump lists (JSON lines)");
    run_cmd->add_option("--dump-matrices", opt.dump_path, "Write H and K as rows of re,im pairs");

    auto *compare_cmd = app.add_subcommand("compare", "Compare stochastic engines with the master equation");
    add_graph(compare_cmd, opt);
    add_simulation(compare_cmd, opt);

    auto *resources_cmd = app.add_subcommand("resources", "Estimate measurement counts");
    add_graph(resources_cmd, opt);
    resources_cmd->add_option("--t-final", opt.t_final, "Final time T")->check(CLI::NonNegativeNumber);

    auto *ancilla_cmd = app.add_subcommand("ancilla", "Post-selected exp(-Kt) via an ancilla register");
    add_graph(ancilla_cmd, opt);
    add_start_node(ancilla_cmd, opt);
    ancilla_cmd->add_option("--time", opt.time, "Evolution time t")->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(opt, out);
        }
        if (run_cmd->parsed()) {
            return cmd_run(opt, out, err);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(opt, out, err);
        }
        if (resources_cmd->parsed()) {
            return cmd_resources(opt, out);
        }
        return cmd_ancilla(opt, out);
    } catch (const InputError &e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const AdmissibilityError &e) {
        err << "error: " << e.what() << '\n';
        return kExitAdmissibility;
    } catch (const NumericalError &e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace qswlab
