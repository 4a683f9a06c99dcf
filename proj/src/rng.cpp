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

#include "qswlab/rng.hpp"

#include <cmath>

#include "qswlab/error.hpp"

namespace qswlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
constexpr int kPhiloxRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

PhiloxBlock block_for(std::uint64_t seed, std::uint64_t index, std::uint64_t block) {
    return philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                       static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)},
                      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

inline std::uint64_t half_of(const PhiloxBlock &b, std::uint64_t k) {
    const std::size_t off = (k & 1u) * 2;
    return (static_cast<std::uint64_t>(b[off + 1]) << 32) | b[off];
}

}  // namespace

PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key) {
    for (int round = 0; round < kPhiloxRounds; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t philox_draw(std::uint64_t master_seed, std::uint64_t stream_index, std::uint64_t k) {
    return half_of(block_for(master_seed, stream_index, k >> 1), k);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t block = counter_ >> 1;
    if (block != cached_block_) {
        block_ = block_for(seed_, index_, block);
        cached_block_ = block;
    }
    return half_of(block_, counter_++);
}

double uniform_open(RngStream &stream) {
    // 52 high bits, offset by half an ulp: the result lies in [2^-53, 1 - 2^-53].
    const std::uint64_t x = stream.next_u64() >> 12;
    return (static_cast<double>(x) + 0.5) * 0x1.0p-52;
}

std::size_t weighted_choice(RngStream &stream, std::span<const double> weights) {
    double total = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw InputError("weights must be finite and nonnegative");
        }
        if (weights[i] > 0.0) {
            total += weights[i];
            last_positive = i;
        }
    }
    if (last_positive == weights.size()) {
        throw InputError("weighted choice over all-zero weights");
    }
    const double target = uniform_open(stream) * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        cumulative += weights[i];
        if (target < cumulative) {
            return i;
        }
    }
    return last_positive;
}

void RunningStats::add(std::span<const double> sample) {
    if (count_ == 0 && mean_.empty()) {
        mean_.assign(sample.size(), 0.0);
        m2_.assign(sample.size(), 0.0);
    }
    if (sample.size() != mean_.size()) {
        throw InputError("sample width does not match the accumulator");
    }
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double delta = sample[i] - mean_[i];
        mean_[i] += delta / n;
        m2_[i] += delta * (sample[i] - mean_[i]);
    }
}

std::vector<double> RunningStats::variance() const {
    std::vector<double> var(mean_.size(), 0.0);
    if (count_ < 2) {
        return var;
    }
    for (std::size_t i = 0; i < var.size(); ++i) {
        var[i] = std::max(0.0, m2_[i]) / static_cast<double>(count_ - 1);
    }
    return var;
}

std::vector<double> RunningStats::standard_error() const {
    auto se = variance();
    for (double &v : se) {
        v = std::sqrt(v / static_cast<double>(count_));
    }
    return se;
}

RunningStats merge_stats(const RunningStats &a, const RunningStats &b) {
    if (a.count_ == 0) {
        return b;
    }
    if (b.count_ == 0) {
        return a;
    }
    if (a.width() != b.width()) {
        throw InputError("cannot merge statistics of different widths");
    }
    RunningStats out(a.width());
    out.count_ = a.count_ + b.count_;
    const double na = static_cast<double>(a.count_);
    const double nb = static_cast<double>(b.count_);
    const double n = static_cast<double>(out.count_);
    for (std::size_t i = 0; i < a.width(); ++i) {
        const double delta = b.mean_[i] - a.mean_[i];
        out.mean_[i] = (na * a.mean_[i] + nb * b.mean_[i]) / n;
        out.m2_[i] = a.m2_[i] + b.m2_[i] + delta * delta * na * nb / n;
    }
    return out;
}

}  // namespace qswlab
