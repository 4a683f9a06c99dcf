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

#include "qswlab/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "qswlab/error.hpp"

namespace qswlab {

namespace {

constexpr std::uint64_t kBlockSize = 64;

}  // namespace

EnsembleAccumulator::EnsembleAccumulator(std::vector<double> sample_times, std::size_t dimension,
                                         bool with_density)
    : sample_times_(std::move(sample_times)), dimension_(dimension), with_density_(with_density),
      populations_(sample_times_.size(), RunningStats(dimension)) {
    if (with_density_) {
        const auto d = static_cast<Eigen::Index>(dimension_);
        density_sum_.assign(sample_times_.size(), ComplexMatrix::Zero(d, d));
    }
}

void EnsembleAccumulator::add(const TrajectoryRecord &record) {
    if (record.sample_times != sample_times_ || record.snapshots.size() != sample_times_.size()) {
        throw InputError("trajectory sample grid does not match the ensemble");
    }
    std::vector<double> pops(dimension_);
    for (std::size_t s = 0; s < sample_times_.size(); ++s) {
        const StateVector &psi = record.snapshots[s];
        if (static_cast<std::size_t>(psi.size()) != dimension_) {
            throw InputError("trajectory dimension does not match the ensemble");
        }
        for (std::size_t k = 0; k < dimension_; ++k) {
            pops[k] = std::norm(psi(static_cast<Eigen::Index>(k)));
        }
        populations_[s].add(pops);
        if (with_density_) {
            density_sum_[s] += psi * psi.adjoint();
        }
    }
    ++count_;
}

void EnsembleAccumulator::merge(const EnsembleAccumulator &other) {
    if (other.sample_times_ != sample_times_ || other.dimension_ != dimension_) {
        throw InputError("cannot merge ensembles on different grids");
    }
    for (std::size_t s = 0; s < populations_.size(); ++s) {
        populations_[s] = merge_stats(populations_[s], other.populations_[s]);
        if (with_density_ && other.with_density_) {
            density_sum_[s] += other.density_sum_[s];
        }
    }
    count_ += other.count_;
}

EnsembleResult EnsembleAccumulator::result() const {
    if (count_ == 0) {
        throw InputError("empty ensemble");
    }
    EnsembleResult out;
    out.sample_times = sample_times_;
    out.trajectory_count = count_;
    for (std::size_t s = 0; s < sample_times_.size(); ++s) {
        std::vector<double> mean = populations_[s].mean();
        for (double &p : mean) {
            p = std::clamp(p, 0.0, 1.0);
        }
        out.mean_populations.push_back(std::move(mean));
        out.stderr_populations.push_back(populations_[s].standard_error());
        if (with_density_) {
            out.mean_density.push_back(density_sum_[s] / static_cast<double>(count_));
        }
    }
    return out;
}

EnsembleResult ensemble_density(std::span<const TrajectoryRecord> records, bool with_density) {
    if (records.empty()) {
        throw InputError("empty ensemble");
    }
    const std::size_t dim =
        records.front().snapshots.empty() ? 0 : static_cast<std::size_t>(records.front().snapshots.front().size());
    EnsembleAccumulator acc(records.front().sample_times, dim, with_density);
    for (const auto &r : records) {
        acc.add(r);
    }
    return acc.result();
}

EnsembleRun run_ensemble(const TrajectoryFn &trajectory, std::span<const double> sample_times,
                         std::size_t dimension, const EnsembleOptions &options) {
    if (options.trajectories == 0) {
        throw InputError("trajectory count must be positive");
    }
    const std::vector<double> grid(sample_times.begin(), sample_times.end());
    const std::uint64_t blocks = (options.trajectories + kBlockSize - 1) / kBlockSize;
    std::vector<std::optional<EnsembleAccumulator>> partial(blocks);
    std::vector<std::vector<JumpEvent>> jump_logs(options.keep_jumps ? options.trajectories : 0);

    std::atomic<std::uint64_t> next_block{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1);
            if (b >= blocks) {
                return;
            }
            try {
                EnsembleAccumulator acc(grid, dimension, options.with_density);
                const std::uint64_t end = std::min(options.trajectories, (b + 1) * kBlockSize);
                for (std::uint64_t idx = b * kBlockSize; idx < end; ++idx) {
                    RngStream stream(options.master_seed, idx);
                    TrajectoryRecord record = trajectory(stream, idx);
                    acc.add(record);
                    if (options.keep_jumps) {
                        jump_logs[idx] = std::move(record.jumps);
                    }
                }
                partial[b].emplace(std::move(acc));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next_block.store(blocks);
                return;
            }
        }
    };

    unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, blocks));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    EnsembleAccumulator total(grid, dimension, options.with_density);
    for (const auto &p : partial) {
        total.merge(*p);
    }
    return {total.result(), std::move(jump_logs)};
}

}  // namespace qswlab
