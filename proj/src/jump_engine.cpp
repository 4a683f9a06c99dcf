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

#include "qswlab/jump_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qswlab/error.hpp"

namespace qswlab {

namespace {

const Complex kI(0.0, 1.0);
constexpr int kMaxBisections = 200;

struct Crossing {
    double tau;
    StateVector state;
};

// norm^2(0) > r >= norm^2(h): find tau in (0, h] with |norm^2(tau) - r| small.
Crossing bisect_crossing(const NoJumpEvolver &evolver, const StateVector &phi, double h, StateVector at_h,
                         double r) {
    if (std::abs(at_h.squaredNorm() - r) <= kJumpNormTolerance) {
        return {h, std::move(at_h)};
    }
    double lo = 0.0;
    double hi = h;
    Crossing best{h, std::move(at_h)};
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        StateVector state = evolver.propagate(phi, mid);
        const double f = state.squaredNorm() - r;
        if (std::abs(f) <= kJumpNormTolerance) {
            return {mid, std::move(state)};
        }
        if (f > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            best = {mid, std::move(state)};
        }
    }
    return best;
}

}  // namespace

double default_micro_step(const ComplexMatrix &h, const ComplexMatrix &k) {
    double scale = one_norm(h);
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        scale = std::max(scale, 2.0 * k(i, i).real());
    }
    if (!(scale > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return 0.05 / scale;
}

NoJumpEvolver::NoJumpEvolver(ComplexMatrix h, ComplexMatrix k, double micro_step, Splitting splitting)
    : h_(std::move(h)), k_(std::move(k)), micro_step_(micro_step), splitting_(splitting) {
    if (h_.rows() != k_.rows() || h_.cols() != k_.cols() || h_.rows() != h_.cols()) {
        throw InputError("H and K must be square with equal dimensions");
    }
    if (!(micro_step_ > 0.0)) {
        throw InputError("micro-step must be positive");
    }
    if (std::isfinite(micro_step_)) {
        cached_ = step_propagator(micro_step_);
    }
}

ComplexMatrix NoJumpEvolver::step_propagator(double tau) const {
    if (splitting_ == Splitting::trotter) {
        return expm((-kI * tau) * h_) * expm(-tau * k_);
    }
    return expm((-kI * tau) * h_ - tau * k_);
}

StateVector NoJumpEvolver::propagate(const StateVector &psi, double tau) const {
    if (tau == micro_step_) {
        return cached_ * psi;
    }
    if (tau == 0.0) {
        return psi;
    }
    return step_propagator(tau) * psi;
}

SegmentResult NoJumpEvolver::evolve_until_event(const StateVector &psi, double r, double t_max) const {
    if (!(r > 0.0 && r < 1.0)) {
        throw InputError("jump threshold R must lie in (0, 1)");
    }
    if (!(t_max >= 0.0)) {
        throw InputError("segment length must be nonnegative");
    }
    StateVector phi = psi;
    double t = 0.0;
    while (t < t_max) {
        const double h = std::min(micro_step_, t_max - t);
        StateVector next = propagate(phi, h);
        if (next.squaredNorm() <= r) {
            Crossing c = bisect_crossing(*this, phi, h, std::move(next), r);
            return {t + c.tau, std::move(c.state)};
        }
        phi = std::move(next);
        t = (h == t_max - t) ? t_max : t + h;
    }
    return {std::nullopt, std::move(phi)};
}

SegmentResult evolve_until_event(const ComplexMatrix &h, const ComplexMatrix &k, const StateVector &psi,
                                 double r, double t_max) {
    NoJumpEvolver evolver(h, k, default_micro_step(h, k));
    return evolver.evolve_until_event(psi, r, t_max);
}

std::vector<JumpWeight> jump_weights(const GraphSpec &g, const StateVector &psi) {
    if (static_cast<std::size_t>(psi.size()) != g.node_count()) {
        throw InputError("state dimension does not match the graph");
    }
    std::vector<JumpWeight> weights;
    double total = 0.0;
    for (const auto &[nm, gamma] : g.incoherent()) {
        const double w = gamma * std::norm(psi(static_cast<Eigen::Index>(nm.first)));
        if (w > 0.0) {
            weights.push_back({nm.first, nm.second, w});
            total += w;
        }
    }
    if (!(total > 0.0)) {
        throw NumericalError("no incoherent channel can fire from this state");
    }
    for (auto &w : weights) {
        w.weight /= total;
    }
    return weights;
}

StateVector apply_jump(const StateVector &psi, NodeIndex n, NodeIndex m) {
    const auto dim = static_cast<std::size_t>(psi.size());
    if (n >= dim || m >= dim) {
        throw InputError("jump endpoint out of range");
    }
    if (psi(static_cast<Eigen::Index>(n)) == Complex{}) {
        throw NumericalError("jump out of a node with zero amplitude");
    }
    return basis_state(dim, m);
}

void check_run_inputs(const GraphSpec &g, const StateVector &psi0, double t_final,
                      std::span<const double> sample_times) {
    if (static_cast<std::size_t>(psi0.size()) != g.node_count()) {
        throw InputError("initial state dimension does not match the graph");
    }
    if (!is_normalized(psi0, 1e-10)) {
        throw InputError("initial state must be normalized");
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw InputError("final time must be finite and nonnegative");
    }
    for (std::size_t s = 0; s < sample_times.size(); ++s) {
        if (sample_times[s] < 0.0 || sample_times[s] > t_final ||
            (s > 0 && sample_times[s] < sample_times[s - 1])) {
            throw InputError("sample times must be sorted and lie in [0, T]");
        }
    }
}

JumpEngine::JumpEngine(const GraphSpec &g, Splitting splitting, double micro_step)
    : graph_(&g), evolver_([&] {
          ComplexMatrix h = build_hamiltonian(g);
          ComplexMatrix k = build_k(g);
          const double dt = micro_step > 0.0 ? micro_step : default_micro_step(h, k);
          return NoJumpEvolver(std::move(h), std::move(k), dt, splitting);
      }()) {
}

TrajectoryRecord JumpEngine::run(const StateVector &psi0, double t_final, RngStream &stream,
                                 std::span<const double> sample_times) const {
    check_run_inputs(*graph_, psi0, t_final, sample_times);
    TrajectoryRecord record;
    record.sample_times.assign(sample_times.begin(), sample_times.end());
    record.total_time = t_final;
    record.trajectory_index = stream.stream_index();
    record.master_seed = stream.master_seed();

    const double micro = evolver_.micro_step();
    std::size_t next_sample = 0;
    double t = 0.0;
    StateVector phi = psi0;

    auto take_samples = [&] {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
            record.snapshots.push_back(normalized(phi));
            ++next_sample;
        }
    };

    take_samples();
    while (t < t_final) {
        const double r = uniform_open(stream);
        bool jumped = false;
        while (t < t_final && !jumped) {
            // Land exactly on the next sample time or T when one comes first.
            double stop = t_final;
            if (next_sample < sample_times.size()) {
                stop = std::min(stop, sample_times[next_sample]);
            }
            const bool full = micro < stop - t;
            const double h = full ? micro : stop - t;
            StateVector next = evolver_.propagate(phi, h);
            if (next.squaredNorm() <= r) {
                Crossing c = bisect_crossing(evolver_, phi, h, std::move(next), r);
                t = (c.tau == h && !full) ? stop : t + c.tau;
                const StateVector at_jump = normalized(c.state);
                const auto weights = jump_weights(*graph_, at_jump);
                std::vector<double> w(weights.size());
                std::transform(weights.begin(), weights.end(), w.begin(), [](const JumpWeight &x) { return x.weight; });
                const JumpWeight &chosen = weights[weighted_choice(stream, w)];
                phi = apply_jump(at_jump, chosen.from, chosen.to);
                record.jumps.push_back({t, chosen.from, chosen.to});
                jumped = true;
            } else {
                phi = std::move(next);
                t = full ? t + h : stop;
            }
            take_samples();
        }
    }
    while (record.snapshots.size() < sample_times.size()) {
        record.snapshots.push_back(normalized(phi));
    }
    return record;
}

TrajectoryRecord run_trajectory(const GraphSpec &g, const StateVector &psi0, double t_final, RngStream &stream,
                                std::span<const double> sample_times) {
    return JumpEngine(g).run(psi0, t_final, stream, sample_times);
}

EnsembleRun run_jump_ensemble(const GraphSpec &g, const StateVector &psi0, double t_final,
                              std::span<const double> sample_times, const EnsembleOptions &options,
                              Splitting splitting, double micro_step) {
    check_run_inputs(g, psi0, t_final, sample_times);
    const JumpEngine engine(g, splitting, micro_step);
    return run_ensemble(
        [&](RngStream &stream, std::uint64_t) { return engine.run(psi0, t_final, stream, sample_times); },
        sample_times, g.node_count(), options);
}

}  // namespace qswlab
