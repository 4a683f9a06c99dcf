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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qswlab {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 keyed bijection of a 128-bit counter.
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

/// k-th 64-bit draw of stream (master_seed, stream_index). Pure function.
std::uint64_t philox_draw(std::uint64_t master_seed, std::uint64_t stream_index, std::uint64_t k);

/// Counter-based random stream. The k-th draw depends only on
/// (master_seed, stream_index, k), so a stream can be replayed or split
/// across workers without coordination. Value type; never share between threads.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : seed_(master_seed), index_(stream_index) {
    }

    std::uint64_t next_u64();

    std::uint64_t master_seed() const {
        return seed_;
    }
    std::uint64_t stream_index() const {
        return index_;
    }
    /// Number of 64-bit draws consumed so far.
    std::uint64_t position() const {
        return counter_;
    }

  private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t counter_ = 0;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    PhiloxBlock block_{};
};

/// Uniform draw strictly inside (0, 1).
double uniform_open(RngStream &stream);

/// Index i with probability w_i / sum(w). Throws InputError when no weight is positive.
std::size_t weighted_choice(RngStream &stream, std::span<const double> weights);

/// Welford accumulator over a fixed-length vector of scalars.
class RunningStats {
  public:
    RunningStats() = default;
    explicit RunningStats(std::size_t width) : mean_(width, 0.0), m2_(width, 0.0) {
    }

    void add(std::span<const double> sample);

    std::size_t width() const {
        return mean_.size();
    }
    std::uint64_t count() const {
        return count_;
    }
    const std::vector<double> &mean() const {
        return mean_;
    }
    const std::vector<double> &m2() const {
        return m2_;
    }
    /// Sample variance M2 / (count - 1); zero when count < 2.
    std::vector<double> variance() const;
    /// sqrt(variance / count); zero when count < 2.
    std::vector<double> standard_error() const;

    friend RunningStats merge_stats(const RunningStats &a, const RunningStats &b);

  private:
    std::uint64_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Pairwise merge of two accumulators. Throws InputError on width mismatch
/// unless one side is empty.
RunningStats merge_stats(const RunningStats &a, const RunningStats &b);

}  // namespace qswlab
