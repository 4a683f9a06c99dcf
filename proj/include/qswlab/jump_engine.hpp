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

#include <optional>
#include <span>
#include <vector>

#include "qswlab/graph.hpp"
#include "qswlab/operators.hpp"
#include "qswlab/rng.hpp"
#include "qswlab/trajectory.hpp"

namespace qswlab {

/// Tolerance on |norm^2 - R| when locating a jump time.
inline constexpr double kJumpNormTolerance = 1e-10;

enum class Splitting {
    exact,   ///< exp(-i(H - iK) tau)
    trotter  ///< exp(-iH tau) exp(-K tau)
};

struct SegmentResult {
    /// Time (relative to the segment start) at which norm^2 reached R; empty if it never did.
    std::optional<double> event_time;
    /// Unnormalized state at event_time, or at t_max.
    StateVector state;
};

/// min(0.05 / max(||H||, max lambda), +inf); +inf means "one step per interval".
double default_micro_step(const ComplexMatrix &h, const ComplexMatrix &k);

/// Non-Hermitian evolution in uniform micro-steps with a cached step propagator.
class NoJumpEvolver {
  public:
    NoJumpEvolver(ComplexMatrix h, ComplexMatrix k, double micro_step, Splitting splitting = Splitting::exact);

    /// Applies the no-jump propagator for time tau (cached when tau is the micro-step).
    StateVector propagate(const StateVector &psi, double tau) const;

    /// Evolves psi until its squared norm first reaches R or t_max elapses. The
    /// crossing is refined by bisection to |norm^2 - R| <= kJumpNormTolerance.
    SegmentResult evolve_until_event(const StateVector &psi, double r, double t_max) const;

    double micro_step() const {
        return micro_step_;
    }

  private:
    ComplexMatrix step_propagator(double tau) const;

    ComplexMatrix h_;
    ComplexMatrix k_;
    double micro_step_;
    Splitting splitting_;
    ComplexMatrix cached_;
};

/// Evolves under exp(-i(H - iK)t) until norm^2 = R (see NoJumpEvolver).
SegmentResult evolve_until_event(const ComplexMatrix &h, const ComplexMatrix &k, const StateVector &psi,
                                 double r, double t_max);

struct JumpWeight {
    NodeIndex from;
    NodeIndex to;
    double weight;
};

/// E_nm = gamma_nm |<phi_n|psi>|^2 / sum over all channels; only positive weights
/// are returned, ordered by (from, to). Throws NumericalError if every weight is zero.
std::vector<JumpWeight> jump_weights(const GraphSpec &g, const StateVector &psi);

/// Localizes the walker at m after a jump out of n. Throws NumericalError when
/// psi has no amplitude at n.
StateVector apply_jump(const StateVector &psi, NodeIndex n, NodeIndex m);

/// Classical quantum-jump unravelling of the walk; valid for any graph.
class JumpEngine {
  public:
    /// micro_step <= 0 selects default_micro_step.
    explicit JumpEngine(const GraphSpec &g, Splitting splitting = Splitting::exact, double micro_step = 0.0);

    TrajectoryRecord run(const StateVector &psi0, double t_final, RngStream &stream,
                         std::span<const double> sample_times) const;

    const NoJumpEvolver &evolver() const {
        return evolver_;
    }

  private:
    const GraphSpec *graph_;
    NoJumpEvolver evolver_;
};

TrajectoryRecord run_trajectory(const GraphSpec &g, const StateVector &psi0, double t_final, RngStream &stream,
                                std::span<const double> sample_times);

/// Ensemble of jump trajectories; stream i is (options.master_seed, i).
EnsembleRun run_jump_ensemble(const GraphSpec &g, const StateVector &psi0, double t_final,
                              std::span<const double> sample_times, const EnsembleOptions &options,
                              Splitting splitting = Splitting::exact, double micro_step = 0.0);

/// Rejects states that are not normalized or of the wrong dimension, and sample
/// grids that are unsorted or leave [0, T].
void check_run_inputs(const GraphSpec &g, const StateVector &psi0, double t_final,
                      std::span<const double> sample_times);

}  // namespace qswlab
