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

#include <span>
#include <vector>

#include "qswlab/graph.hpp"
#include "qswlab/operators.hpp"

namespace qswlab {

/// Walker density operator: Hermitian, unit trace, positive semidefinite.
using DensityMatrix = ComplexMatrix;

/// Throws InputError unless rho is Hermitian (1e-10), unit trace (1e-9) and
/// has minimum eigenvalue >= -1e-9.
void check_density_matrix(const DensityMatrix &rho);

DensityMatrix pure_density(const StateVector &psi);

struct PopulationSeries {
    std::vector<double> sample_times;
    /// populations[s][k] = rho_kk at sample_times[s].
    std::vector<std::vector<double>> populations;
    /// Full density matrices, filled only on request.
    std::vector<DensityMatrix> snapshots;
};

/// Right-hand side of the single-excitation master equation,
///   d rho/dt = -i[H, rho] + sum_nm gamma_nm rho_nn |m><m| - {K, rho}.
/// Built once per graph; evaluation is O(D^3) for the commutator and O(D^2) otherwise.
class LindbladGenerator {
  public:
    explicit LindbladGenerator(const GraphSpec &g);

    DensityMatrix operator()(const DensityMatrix &rho) const;

    std::size_t dimension() const {
        return static_cast<std::size_t>(h_.rows());
    }

  private:
    ComplexMatrix h_;
    Eigen::VectorXd half_lambda_;
    std::vector<std::pair<NodePair, double>> channels_;
};

DensityMatrix lindblad_rhs(const GraphSpec &g, const DensityMatrix &rho);

/// min(1e-2, 0.01 / max(||H||, max lambda)).
double default_oracle_dt(const GraphSpec &g);

/// Classic fixed-step RK4 from 0 to T. Sample times are step boundaries: a step
/// that would pass a sample time (or T) is shortened to land on it. rho is
/// re-Hermitized after every step.
PopulationSeries integrate(const GraphSpec &g, const DensityMatrix &rho0, double t_final, double dt,
                           std::span<const double> sample_times, bool keep_snapshots = false);

}  // namespace qswlab
