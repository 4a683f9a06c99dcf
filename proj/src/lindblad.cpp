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

#include "qswlab/lindblad.hpp"

#include <algorithm>
#include <cmath>

#include "qswlab/error.hpp"

namespace qswlab {

namespace {

const Complex kI(0.0, 1.0);

// Boundaries closer than this (relative to max(1, T)) are merged into one.
constexpr double kBoundaryMerge = 1e-12;

}  // namespace

void check_density_matrix(const DensityMatrix &rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw InputError("density matrix must be square and nonempty");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InputError("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-9) {
        throw InputError("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9) {
        throw InputError("density matrix is not positive semidefinite");
    }
}

DensityMatrix pure_density(const StateVector &psi) {
    return psi * psi.adjoint();
}

LindbladGenerator::LindbladGenerator(const GraphSpec &g) : h_(build_hamiltonian(g)) {
    const auto lambdas = node_lambdas(g);
    half_lambda_.resize(static_cast<Eigen::Index>(lambdas.size()));
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        half_lambda_(static_cast<Eigen::Index>(k)) = 0.5 * lambdas[k];
    }
    for (const auto &[nm, gamma] : g.incoherent()) {
        if (gamma > 0.0) {
            channels_.emplace_back(nm, gamma);
        }
    }
}

DensityMatrix LindbladGenerator::operator()(const DensityMatrix &rho) const {
    if (rho.rows() != h_.rows() || rho.cols() != h_.cols()) {
        throw InputError("density matrix dimension does not match the graph");
    }
    const ComplexMatrix hr = h_ * rho;
    DensityMatrix out = -kI * (hr - hr.adjoint());
    const auto n = rho.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i, j) -= (half_lambda_(i) + half_lambda_(j)) * rho(i, j);
        }
    }
    for (const auto &[nm, gamma] : channels_) {
        const auto src = static_cast<Eigen::Index>(nm.first);
        const auto dst = static_cast<Eigen::Index>(nm.second);
        out(dst, dst) += gamma * rho(src, src).real();
    }
    return out;
}

DensityMatrix lindblad_rhs(const GraphSpec &g, const DensityMatrix &rho) {
    return LindbladGenerator(g)(rho);
}

double default_oracle_dt(const GraphSpec &g) {
    double scale = one_norm(build_hamiltonian(g));
    for (double l : node_lambdas(g)) {
        scale = std::max(scale, l);
    }
    if (scale <= 0.0) {
        return 1e-2;
    }
    return std::min(1e-2, 0.01 / scale);
}

PopulationSeries integrate(const GraphSpec &g, const DensityMatrix &rho0, double t_final, double dt,
                           std::span<const double> sample_times, bool keep_snapshots) {
    if (!(dt > 0.0)) {
        throw InputError("integration step must be positive");
    }
    if (!(t_final >= 0.0)) {
        throw InputError("final time must be nonnegative");
    }
    check_density_matrix(rho0);
    const LindbladGenerator rhs(g);
    if (static_cast<std::size_t>(rho0.rows()) != rhs.dimension()) {
        throw InputError("density matrix dimension does not match the graph");
    }
    for (std::size_t s = 0; s < sample_times.size(); ++s) {
        if (sample_times[s] < 0.0 || sample_times[s] > t_final || (s > 0 && sample_times[s] < sample_times[s - 1])) {
            throw InputError("sample times must be sorted and lie in [0, T]");
        }
    }

    // Step boundaries: the uniform grid k*dt, the sample times and T itself.
    const double merge = kBoundaryMerge * std::max(1.0, t_final);
    std::vector<double> boundaries;
    const auto full_steps = static_cast<long long>(std::floor(t_final / dt));
    boundaries.reserve(static_cast<std::size_t>(full_steps) + sample_times.size() + 1);
    for (long long k = 1; k <= full_steps; ++k) {
        boundaries.push_back(static_cast<double>(k) * dt);
    }
    boundaries.insert(boundaries.end(), sample_times.begin(), sample_times.end());
    boundaries.push_back(t_final);
    std::sort(boundaries.begin(), boundaries.end());

    PopulationSeries series;
    series.sample_times.assign(sample_times.begin(), sample_times.end());
    const auto n = rho0.rows();
    auto record = [&](const DensityMatrix &rho) {
        std::vector<double> pops(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            pops[static_cast<std::size_t>(k)] = rho(k, k).real();
        }
        series.populations.push_back(std::move(pops));
        if (keep_snapshots) {
            series.snapshots.push_back(rho);
        }
    };

    DensityMatrix rho = rho0;
    double t = 0.0;
    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= merge) {
        record(rho);
        ++next_sample;
    }
    for (double b : boundaries) {
        if (b - t <= merge) {
            continue;
        }
        const double h = b - t;
        const DensityMatrix k1 = rhs(rho);
        const DensityMatrix k2 = rhs(rho + (0.5 * h) * k1);
        const DensityMatrix k3 = rhs(rho + (0.5 * h) * k2);
        const DensityMatrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        t = b;
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t + merge) {
            record(rho);
            ++next_sample;
        }
    }
    while (next_sample < sample_times.size()) {
        record(rho);
        ++next_sample;
    }
    return series;
}

}  // namespace qswlab
