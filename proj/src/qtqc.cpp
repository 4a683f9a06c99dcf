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

#include "qswlab/qtqc.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "qswlab/error.hpp"
#include "qswlab/jump_engine.hpp"

namespace qswlab {

namespace {

const Complex kI(0.0, 1.0);

void require_admissible(const ValidationReport &report) {
    if (!report.admissible) {
        const auto &v = report.violations.front();
        throw AdmissibilityError("graph is not admissible: coupled nodes " + std::to_string(v.n) + " and " +
                                 std::to_string(v.m) + " have decay rates " + std::to_string(v.lambda_n) +
                                 " and " + std::to_string(v.lambda_m));
    }
}

}  // namespace

double sample_jump_time(double lambda, double r) {
    if (!(r > 0.0 && r < 1.0)) {
        throw InputError("jump threshold R must lie in (0, 1)");
    }
    if (!(lambda >= 0.0)) {
        throw InputError("decay rate must be nonnegative");
    }
    if (lambda == 0.0) {
        return kNoJump;
    }
    return -std::log(r) / lambda;
}

StateVector coherent_evolve(const ComplexMatrix &h, const StateVector &psi, double t) {
    if (t == 0.0) {
        return psi;
    }
    return unitary_propagator(h, t) * psi;
}

NodeIndex measure_node(const StateVector &psi, RngStream &stream) {
    std::vector<double> born(static_cast<std::size_t>(psi.size()));
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        born[static_cast<std::size_t>(k)] = std::norm(psi(k));
    }
    return weighted_choice(stream, born);
}

NodeIndex sample_destination(const GraphSpec &g, NodeIndex n, RngStream &stream) {
    if (n >= g.node_count()) {
        throw InputError("node index out of range");
    }
    std::vector<NodeIndex> targets;
    std::vector<double> rates;
    for (auto it = g.incoherent().lower_bound({n, 0}); it != g.incoherent().end() && it->first.first == n; ++it) {
        targets.push_back(it->first.second);
        rates.push_back(it->second);
    }
    double lambda = 0.0;
    for (double r : rates) {
        lambda += r;
    }
    if (!(lambda > 0.0)) {
        throw InputError("node \"" + g.label(n) + "\" has no outgoing incoherent channel");
    }
    return targets[weighted_choice(stream, rates)];
}

QtqcEngine::QtqcEngine(const GraphSpec &g)
    : graph_(&g), lambdas_(node_lambdas(g)), tolerance_(kAdmissibilityTolerance * admissibility_scale(g)) {
    const ValidationReport report = validate(g);
    require_admissible(report);
    for (const auto &nodes : report.subgraphs) {
        const auto n = static_cast<Eigen::Index>(nodes.size());
        ComplexMatrix block(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                block(i, j) = g.coupling(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]);
            }
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(block);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("eigendecomposition of a subgraph Hamiltonian failed");
        }
        blocks_.push_back({nodes, eig.eigenvectors(), eig.eigenvalues()});
    }
    outgoing_.resize(g.node_count());
    for (const auto &[nm, gamma] : g.incoherent()) {
        outgoing_[nm.first].targets.push_back(nm.second);
        outgoing_[nm.first].rates.push_back(gamma);
    }
}

double QtqcEngine::support_lambda(const StateVector &psi) const {
    std::optional<double> lambda;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        if (psi(k) == Complex{}) {
            continue;
        }
        const double l = lambdas_[static_cast<std::size_t>(k)];
        if (!lambda) {
            lambda = l;
        } else if (std::abs(*lambda - l) > tolerance_) {
            throw InputError("state is not an eigenstate of K: its support mixes decay rates " +
                             std::to_string(*lambda) + " and " + std::to_string(l));
        }
    }
    if (!lambda) {
        throw InputError("zero state");
    }
    return *lambda;
}

StateVector QtqcEngine::evolve(const StateVector &psi, double t) const {
    if (t == 0.0) {
        return psi;
    }
    StateVector out = psi;
    for (const auto &block : blocks_) {
        const auto n = static_cast<Eigen::Index>(block.nodes.size());
        Eigen::VectorXcd local(n);
        bool occupied = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            local(i) = psi(static_cast<Eigen::Index>(block.nodes[static_cast<std::size_t>(i)]));
            occupied = occupied || local(i) != Complex{};
        }
        if (!occupied) {
            continue;
        }
        const Eigen::VectorXcd phases = (-kI * t * block.energies.cast<Complex>()).array().exp();
        local = block.eigenvectors * (phases.asDiagonal() * (block.eigenvectors.adjoint() * local));
        for (Eigen::Index i = 0; i < n; ++i) {
            out(static_cast<Eigen::Index>(block.nodes[static_cast<std::size_t>(i)])) = local(i);
        }
    }
    return out;
}

TrajectoryRecord QtqcEngine::run(const StateVector &psi0, double t_final, RngStream &stream,
                                 std::span<const double> sample_times) const {
    check_run_inputs(*graph_, psi0, t_final, sample_times);
    TrajectoryRecord record;
    record.sample_times.assign(sample_times.begin(), sample_times.end());
    record.total_time = t_final;
    record.trajectory_index = stream.stream_index();
    record.master_seed = stream.master_seed();

    StateVector psi = psi0;
    double t = 0.0;
    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= 0.0) {
        record.snapshots.push_back(psi);
        ++next_sample;
    }
    for (;;) {
        // Every segment starts in a K eigenstate: initially by precondition,
        // afterwards because a jump localizes the walker.
        const double lambda = support_lambda(psi);
        record.segment_rates.push_back(lambda);
        const double wait = sample_jump_time(lambda, uniform_open(stream));
        const double t_jump = t + wait;
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_jump) {
            record.snapshots.push_back(evolve(psi, sample_times[next_sample] - t));
            ++next_sample;
        }
        if (!(t_jump < t_final)) {
            break;
        }
        const StateVector at_jump = evolve(psi, wait);
        const NodeIndex n = measure_node(at_jump, stream);
        const Outgoing &out = outgoing_[n];
        const NodeIndex m = out.targets[weighted_choice(stream, out.rates)];
        record.jumps.push_back({t_jump, n, m});
        psi = basis_state(graph_->node_count(), m);
        t = t_jump;
    }
    return record;
}

TrajectoryRecord run_qtqc_trajectory(const QtqcConfig &cfg, const StateVector &psi0, RngStream &stream) {
    return QtqcEngine(cfg.graph).run(psi0, cfg.t_final, stream, cfg.sample_times);
}

EnsembleRun run_qtqc_ensemble(const QtqcConfig &cfg, const StateVector &psi0, unsigned jobs, bool with_density,
                              bool keep_jumps) {
    const QtqcEngine engine(cfg.graph);
    check_run_inputs(cfg.graph, psi0, cfg.t_final, cfg.sample_times);
    engine.support_lambda(psi0);
    EnsembleOptions options;
    options.master_seed = cfg.master_seed;
    options.trajectories = cfg.trajectory_count;
    options.jobs = jobs;
    options.with_density = with_density;
    options.keep_jumps = keep_jumps;
    return run_ensemble(
        [&](RngStream &stream, std::uint64_t) { return engine.run(psi0, cfg.t_final, stream, cfg.sample_times); },
        cfg.sample_times, cfg.graph.node_count(), options);
}

ResourceEstimate resource_estimate(const GraphSpec &g, double t_final) {
    if (!(t_final >= 0.0)) {
        throw InputError("final time must be nonnegative");
    }
    const ValidationReport report = validate(g);
    require_admissible(report);
    ResourceEstimate estimate;
    double max_lambda = 0.0;
    for (std::size_t c = 0; c < report.subgraphs.size(); ++c) {
        const double lambda = *report.subgraph_lambdas[c];
        SubgraphResources r{report.subgraphs[c], lambda, kNoJump, kNoJump};
        if (lambda > 0.0) {
            r.t_avg = std::numbers::ln2 / lambda;
            r.mean_interjump = 1.0 / lambda;
        }
        max_lambda = std::max(max_lambda, lambda);
        estimate.subgraphs.push_back(std::move(r));
    }
    if (max_lambda > 0.0) {
        estimate.worst_case_measurements = t_final / (std::numbers::ln2 / max_lambda);
    }
    return estimate;
}

}  // namespace qswlab
