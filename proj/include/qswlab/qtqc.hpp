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
#include <limits>
#include <span>
#include <vector>

#include "qswlab/graph.hpp"
#include "qswlab/operators.hpp"
#include "qswlab/rng.hpp"
#include "qswlab/trajectory.hpp"

// Emulation of trajectories run on a coherent quantum device. On an admissible
// graph H and K commute and every segment starts in a K eigenstate, so the
// no-jump evolution factorizes into a unitary exp(-iHt) times a scalar decay
// exp(-lambda t / 2). The device only runs the unitary; the jump time comes from
// the scalar law exp(-lambda t) = R, the jump itself from a projective node
// measurement followed by a classical draw of the destination.

namespace qswlab {

/// Returned by sample_jump_time when lambda = 0.
inline constexpr double kNoJump = std::numeric_limits<double>::infinity();

/// t with exp(-lambda t) = R; kNoJump for lambda = 0.
double sample_jump_time(double lambda, double r);

/// exp(-iHt) psi for Hermitian H.
StateVector coherent_evolve(const ComplexMatrix &h, const StateVector &psi, double t);

/// Born-rule sample of the walker position.
NodeIndex measure_node(const StateVector &psi, RngStream &stream);

/// Destination m with probability gamma_nm / lambda_n. Throws InputError when lambda_n = 0.
NodeIndex sample_destination(const GraphSpec &g, NodeIndex n, RngStream &stream);

struct QtqcConfig {
    GraphSpec graph;
    double t_final = 0.0;
    std::vector<double> sample_times;
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_count = 1;
};

/// Prepared emulator for one admissible graph. Coherent evolution acts block by
/// block on the coherent subgraphs, so a jump into another subgraph only switches
/// which blocks carry amplitude.
class QtqcEngine {
  public:
    /// Throws AdmissibilityError for inadmissible graphs.
    explicit QtqcEngine(const GraphSpec &g);

    /// Common lambda of every node in the support of psi. Throws InputError when
    /// the support mixes rates (psi is then not a K eigenstate).
    double support_lambda(const StateVector &psi) const;

    StateVector evolve(const StateVector &psi, double t) const;

    TrajectoryRecord run(const StateVector &psi0, double t_final, RngStream &stream,
                         std::span<const double> sample_times) const;

  private:
    struct Block {
        std::vector<NodeIndex> nodes;
        ComplexMatrix eigenvectors;
        Eigen::VectorXd energies;
    };
    struct Outgoing {
        std::vector<NodeIndex> targets;
        std::vector<double> rates;
    };

    const GraphSpec *graph_;
    std::vector<double> lambdas_;
    double tolerance_;
    std::vector<Block> blocks_;
    std::vector<Outgoing> outgoing_;
};

TrajectoryRecord run_qtqc_trajectory(const QtqcConfig &cfg, const StateVector &psi0, RngStream &stream);

/// Ensemble over cfg.trajectory_count trajectories seeded from cfg.master_seed.
EnsembleRun run_qtqc_ensemble(const QtqcConfig &cfg, const StateVector &psi0, unsigned jobs = 0,
                              bool with_density = false, bool keep_jumps = false);

struct SubgraphResources {
    std::vector<NodeIndex> nodes;
    double lambda;
    /// ln(2) / lambda: the median waiting time between jumps (infinite when lambda = 0).
    double t_avg;
    /// 1 / lambda: the mean waiting time.
    double mean_interjump;
};

struct ResourceEstimate {
    std::vector<SubgraphResources> subgraphs;
    /// T / min_i t_avg,i; zero when no subgraph can jump.
    double worst_case_measurements = 0.0;
};

/// Throws AdmissibilityError for inadmissible graphs.
ResourceEstimate resource_estimate(const GraphSpec &g, double t_final);

}  // namespace qswlab
