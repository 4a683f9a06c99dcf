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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numbers>

#include "qswlab/error.hpp"
#include "qswlab/jump_engine.hpp"
#include "qswlab/lindblad.hpp"
#include "qswlab/qtqc.hpp"
#include "support.hpp"

namespace qswlab {
namespace {

using testing::random_graph;

std::vector<double> grid(double t_final, int n) {
    std::vector<double> t;
    for (int i = 1; i <= n; ++i) {
        t.push_back(t_final * i / n);
    }
    return t;
}

TEST(SampleJumpTime, Formula) {
    EXPECT_NEAR(sample_jump_time(1.0, 0.5), std::numbers::ln2, 1e-15);
    EXPECT_NEAR(sample_jump_time(2.0, std::exp(-2.0)), 1.0, 1e-15);
    EXPECT_EQ(sample_jump_time(0.0, 0.3), kNoJump);
    EXPECT_THROW(sample_jump_time(1.0, 0.0), InputError);
    EXPECT_THROW(sample_jump_time(1.0, 1.0), InputError);
    EXPECT_THROW(sample_jump_time(-1.0, 0.5), InputError);
}

TEST(CoherentEvolve, Examples) {
    const auto psi = basis_state(3, 1);
    ComplexMatrix h(3, 3);
    h << 0, 1, 0, 1, 0, 0, 0, 0, 0;
    EXPECT_EQ(coherent_evolve(h, psi, 0.0), psi);

    ComplexMatrix h2(2, 2);
    h2 << 0, 1, 1, 0;
    const auto out = coherent_evolve(h2, basis_state(2, 0), std::numbers::pi / 2);
    EXPECT_NEAR(std::abs(out(0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(out(1) - Complex(0.0, -1.0)), 0.0, 1e-12);

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = random_graph(rng, 6, false);
        const auto v = testing::random_state(rng, 6);
        EXPECT_NEAR(coherent_evolve(build_hamiltonian(g), v, 0.3 + trial).norm(), 1.0, 1e-12);
    }
}

TEST(MeasureNode, BornRule) {
    RngStream s(3, 0);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(measure_node(basis_state(4, 2), s), 2u);
    }
    StateVector psi(2);
    psi << std::sqrt(0.2), Complex(0.0, std::sqrt(0.8));
    const int n = 100000;
    int first = 0;
    for (int i = 0; i < n; ++i) {
        first += measure_node(psi, s) == 0 ? 1 : 0;
    }
    const double p = static_cast<double>(first) / n;
    // Two-bin chi-square equals the squared z-score.
    const double z = (p - 0.2) / std::sqrt(0.2 * 0.8 / n);
    EXPECT_LT(z * z, 9.0);
}

TEST(SampleDestination, Frequencies) {
    GraphBuilder b(3);
    b.rate(0, 1, 0.2).rate(0, 2, 0.3).rate(1, 2, 0.7);
    const auto g = b.build();
    RngStream s(8, 1);
    const int n = 100000;
    int to1 = 0;
    for (int i = 0; i < n; ++i) {
        to1 += sample_destination(g, 0, s) == 1 ? 1 : 0;
        EXPECT_EQ(sample_destination(g, 1, s), 2u);
    }
    EXPECT_NEAR(static_cast<double>(to1) / n, 0.4, 3.0 * std::sqrt(0.24 / n));
    EXPECT_THROW(sample_destination(g, 2, s), InputError);
}

// Measurement followed by destination sampling reproduces the jump weights E_nm.
TEST(SampleDestination, TwoStepMatchesJumpWeights) {
    const auto g = testing::three_node_admissible();
    StateVector psi(3);
    psi << std::sqrt(0.3), Complex(0.0, std::sqrt(0.7)), 0.0;
    const auto weights = jump_weights(g, psi);
    std::map<std::pair<NodeIndex, NodeIndex>, int> counts;
    RngStream s(17, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto from = measure_node(psi, s);
        ++counts[{from, sample_destination(g, from, s)}];
    }
    for (const auto &w : weights) {
        const double p = static_cast<double>(counts[{w.from, w.to}]) / n;
        EXPECT_NEAR(p, w.weight, 3.0 * std::sqrt(w.weight * (1 - w.weight) / n));
    }
}

TEST(QtqcEngine, RejectsInadmissible) {
    GraphBuilder b(2);
    b.couple(0, 1, 1.0).rate(0, 1, 0.5).rate(1, 0, 0.3);
    const auto g = b.build();
    EXPECT_THROW(QtqcEngine{g}, AdmissibilityError);
    EXPECT_THROW(resource_estimate(g, 1.0), AdmissibilityError);
}

TEST(QtqcEngine, SupportLambda) {
    GraphBuilder b(3);
    b.couple(0, 1, 1.0).rate(0, 2, 0.5).rate(1, 2, 0.5).rate(2, 0, 0.1);
    const auto g = b.build();
    const QtqcEngine e(g);
    StateVector psi = StateVector::Zero(3);
    psi(0) = psi(1) = 1.0 / std::sqrt(2.0);
    EXPECT_DOUBLE_EQ(e.support_lambda(psi), 0.5);
    psi(0) = 0.6;
    psi(1) = 0.0;
    psi(2) = 0.8;
    EXPECT_THROW(e.support_lambda(psi), InputError);
}

TEST(QtqcEngine, BlockEvolutionMatchesDense) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_graph(rng, 2 + trial % 7, true);
        const QtqcEngine e(g);
        const auto psi = testing::random_state(rng, g.node_count());
        const double t = 0.2 + 0.3 * trial;
        const StateVector dense = unitary_propagator(build_hamiltonian(g), t) * psi;
        EXPECT_LT((e.evolve(psi, t) - dense).norm(), 1e-11);
    }
}

TEST(QtqcTrajectory, UnitaryLimit) {
    GraphBuilder b(3);
    b.couple(0, 1, 1.0).couple(1, 2, 0.3).rate(0, 0, 0.0);
    const auto g = b.build();
    const auto times = grid(4.0, 4);
    QtqcConfig cfg{g, 4.0, times, 2, 1};
    RngStream s(2, 0);
    const auto rec = run_qtqc_trajectory(cfg, basis_state(3, 0), s);
    EXPECT_TRUE(rec.jumps.empty());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const StateVector ref = unitary_propagator(build_hamiltonian(g), times[i]) * basis_state(3, 0);
        EXPECT_LT((rec.snapshots[i] - ref).norm(), 1e-11);
    }
}

TEST(QtqcTrajectory, Determinism) {
    const auto g = testing::three_node_admissible();
    QtqcConfig cfg{g, 6.0, grid(6.0, 6), 4, 1};
    RngStream a(4, 9);
    RngStream b(4, 9);
    const auto ra = run_qtqc_trajectory(cfg, basis_state(3, 0), a);
    const auto rb = run_qtqc_trajectory(cfg, basis_state(3, 0), b);
    ASSERT_EQ(ra.jumps.size(), rb.jumps.size());
    for (std::size_t i = 0; i < ra.jumps.size(); ++i) {
        EXPECT_EQ(ra.jumps[i].time, rb.jumps[i].time);
        EXPECT_EQ(ra.jumps[i].to, rb.jumps[i].to);
    }
    for (std::size_t i = 0; i < ra.snapshots.size(); ++i) {
        EXPECT_EQ(ra.snapshots[i], rb.snapshots[i]);
    }
}

// Two coherent pairs with different rates linked by incoherent hops: after each jump
// the next segment runs at the destination's rate.
TEST(QtqcTrajectory, RateFollowsDestinationSubgraph) {
    GraphBuilder b(4);
    b.couple(0, 1, 1.0).couple(2, 3, 0.5);
    b.rate(0, 2, 1.0).rate(1, 3, 0.6).rate(1, 1, 0.4);
    b.rate(2, 0, 0.25).rate(3, 1, 0.25);
    const auto g = b.build();
    const auto report = validate(g);
    ASSERT_TRUE(report.admissible);
    QtqcConfig cfg{g, 20.0, {}, 0, 1};
    int jumps_seen = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        RngStream s(6, i);
        const auto rec = run_qtqc_trajectory(cfg, basis_state(4, 0), s);
        ASSERT_EQ(rec.segment_rates.size(), rec.jumps.size() + 1);
        EXPECT_DOUBLE_EQ(rec.segment_rates[0], 1.0);
        for (std::size_t j = 0; j < rec.jumps.size(); ++j) {
            const auto c = report.component_of[rec.jumps[j].to];
            EXPECT_DOUBLE_EQ(rec.segment_rates[j + 1], *report.subgraph_lambdas[c]);
            ++jumps_seen;
        }
    }
    EXPECT_GT(jumps_seen, 100);
}

TEST(QtqcTrajectory, InterJumpMedianAndMean) {
    GraphBuilder b(2);
    b.couple(0, 1, 0.9).rate(0, 1, 1.5).rate(1, 0, 1.5);
    const auto g = b.build();
    const double lambda = 1.5;
    QtqcConfig cfg{g, 0.0, {}, 0, 1};
    std::vector<double> gaps;
    const QtqcEngine engine(g);
    for (std::uint64_t i = 0; gaps.size() < 100000; ++i) {
        RngStream s(10, i);
        const auto rec = engine.run(basis_state(2, 0), 200.0, s, {});
        double prev = 0.0;
        for (const auto &j : rec.jumps) {
            gaps.push_back(j.time - prev);
            prev = j.time;
        }
    }
    std::sort(gaps.begin(), gaps.end());
    const double median = gaps[gaps.size() / 2];
    double mean = 0.0;
    for (double x : gaps) {
        mean += x / static_cast<double>(gaps.size());
    }
    EXPECT_NEAR(median, std::numbers::ln2 / lambda, 0.02 * std::numbers::ln2 / lambda);
    EXPECT_NEAR(mean, 1.0 / lambda, 0.02 / lambda);
}

TEST(QtqcEnsemble, MatchesOracle) {
    const auto g = testing::three_node_admissible();
    const auto times = grid(5.0, 10);
    QtqcConfig cfg{g, 5.0, times, 21, 10000};
    const auto run = run_qtqc_ensemble(cfg, basis_state(3, 0));
    const auto oracle = integrate(g, pure_density(basis_state(3, 0)), 5.0, 1e-3, times);
    for (std::size_t s = 0; s < times.size(); ++s) {
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(run.result.mean_populations[s][k], oracle.populations[s][k], 4.0 / 100.0);
        }
    }
}

TEST(QtqcEnsemble, RejectsNonEigenstate) {
    const auto g = testing::three_node_admissible();
    GraphBuilder b(3);
    b.couple(0, 1, 1.0).rate(0, 2, 0.5).rate(1, 2, 0.5).rate(2, 0, 0.1);
    const auto h = b.build();
    StateVector psi(3);
    psi << 0.6, 0.0, 0.8;
    QtqcConfig cfg{h, 1.0, grid(1.0, 2), 0, 10};
    EXPECT_THROW(run_qtqc_ensemble(cfg, psi), InputError);
}

TEST(ResourceEstimate, Examples) {
    GraphBuilder one(2);
    one.rate(0, 1, 1.0).rate(1, 0, 1.0);
    const auto r1 = resource_estimate(one.build(), 100.0);
    EXPECT_NEAR(r1.subgraphs[0].t_avg, 0.693147, 1e-6);
    EXPECT_NEAR(r1.worst_case_measurements, 144.27, 0.01);

    GraphBuilder two(4);
    two.couple(0, 1, 1.0).couple(2, 3, 1.0);
    two.rate(0, 2, 1.0).rate(1, 3, 1.0).rate(2, 0, 2.0).rate(3, 1, 2.0);
    const auto r2 = resource_estimate(two.build(), 10.0);
    EXPECT_NEAR(r2.worst_case_measurements, 28.85, 0.01);
    EXPECT_DOUBLE_EQ(r2.subgraphs[0].mean_interjump, 1.0);
    EXPECT_DOUBLE_EQ(r2.subgraphs[1].mean_interjump, 0.5);

    GraphBuilder none(2);
    none.couple(0, 1, 1.0);
    const auto r0 = resource_estimate(none.build(), 50.0);
    EXPECT_EQ(r0.subgraphs[0].t_avg, kNoJump);
    EXPECT_EQ(r0.worst_case_measurements, 0.0);
}

}  // namespace
}  // namespace qswlab
