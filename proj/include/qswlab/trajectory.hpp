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
#include <functional>
#include <span>
#include <vector>

#include "qswlab/graph.hpp"
#include "qswlab/operators.hpp"
#include "qswlab/rng.hpp"

namespace qswlab {

struct JumpEvent {
    double time;
    NodeIndex from;
    NodeIndex to;
};

/// One unravelled trajectory: its jumps and the normalized state at each sample time.
struct TrajectoryRecord {
    std::vector<JumpEvent> jumps;
    std::vector<double> sample_times;
    std::vector<StateVector> snapshots;
    /// Decay rate lambda of the state at the start of each coherent segment
    /// (filled by engines that know it).
    std::vector<double> segment_rates;
    double total_time = 0.0;
    std::uint64_t trajectory_index = 0;
    std::uint64_t master_seed = 0;
};

struct EnsembleResult {
    std::vector<double> sample_times;
    std::vector<std::vector<double>> mean_populations;
    std::vector<std::vector<double>> stderr_populations;
    /// Mean of |psi><psi| per sample time; empty unless requested.
    std::vector<ComplexMatrix> mean_density;
    std::uint64_t trajectory_count = 0;
};

/// Order-sensitive accumulator; the ensemble drivers feed it in trajectory-index
/// order within fixed blocks and merge blocks in block order.
class EnsembleAccumulator {
  public:
    EnsembleAccumulator(std::vector<double> sample_times, std::size_t dimension, bool with_density);

    void add(const TrajectoryRecord &record);
    void merge(const EnsembleAccumulator &other);
    std::uint64_t count() const {
        return count_;
    }
    EnsembleResult result() const;

  private:
    std::vector<double> sample_times_;
    std::size_t dimension_;
    bool with_density_;
    std::uint64_t count_ = 0;
    std::vector<RunningStats> populations_;
    std::vector<ComplexMatrix> density_sum_;
};

/// Per-sample-time mean density matrix and population statistics. Throws
/// InputError for an empty ensemble or records on different grids.
EnsembleResult ensemble_density(std::span<const TrajectoryRecord> records, bool with_density = true);

struct EnsembleOptions {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectories = 1;
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned jobs = 0;
    bool with_density = false;
    /// Keep each trajectory's jump list (in index order) for logging.
    bool keep_jumps = false;
};

struct EnsembleRun {
    EnsembleResult result;
    std::vector<std::vector<JumpEvent>> jump_logs;
};

/// Produces trajectory `index` from its private stream (master_seed, index).
using TrajectoryFn = std::function<TrajectoryRecord(RngStream &stream, std::uint64_t index)>;

/// Runs `options.trajectories` trajectories on up to `options.jobs` threads.
/// Trajectories are grouped into fixed-size blocks of consecutive indices, so the
/// result is bit-identical for any worker count.
EnsembleRun run_ensemble(const TrajectoryFn &trajectory, std::span<const double> sample_times,
                         std::size_t dimension, const EnsembleOptions &options);

}  // namespace qswlab
