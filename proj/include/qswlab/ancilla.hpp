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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qswlab/operators.hpp"
#include "qswlab/rng.hpp"

// State-vector simulation of post-selected damping exp(-Kt)|psi> for a normal K.
//
// With K = sum_n k_n |K_n><K_n| and |psi> = sum_n c_n |K_n>, a controlled unitary
// sum_n |K_n><K_n| (x) U_n entangles the system with a D-level ancilla prepared in
// |Omega>. Each U_n sends |Omega> to a state whose overlap with a fixed ancilla
// vector |M> is exp(-k_n t); the remainder of U_n|Omega> lies orthogonal to |M>.
// Projecting the ancilla onto |M> leaves the system in
//   sum_n c_n exp(-k_n t) |K_n>  (unnormalized),
// which is exp(-Kt)|psi>, with success probability sum_n |c_n|^2 exp(-2 Re(k_n) t).
// The joint state is held explicitly as a D x D_a amplitude array; U is applied
// through its action on |psi>|Omega> and never materialized.

namespace qswlab {

/// Largest system dimension accepted by the ancilla simulation.
inline constexpr std::size_t kMaxAncillaDimension = 64;

struct EigenPair {
    Complex value;
    StateVector vector;
};

/// Orthonormal eigenbasis of a normal K. Diagonal K keeps the node order; Hermitian
/// K yields ascending real eigenvalues. Throws InputError for non-normal K.
std::vector<EigenPair> eigendecompose_k(const ComplexMatrix &k);

struct AncillaOutcome {
    /// Normalized system state after a successful post-selection.
    StateVector post_state;
    /// Probability that the ancilla is found in |M>.
    double success_probability = 0.0;
    std::vector<EigenPair> eigen_data;
    /// Expansion coefficients c_n = <K_n|psi0>.
    std::vector<Complex> coefficients;
};

/// Joint system + ancilla amplitudes after the controlled unitary, together with
/// the ancilla vector |M> that heralds success.
struct AncillaRegister {
    /// joint(i, a): system basis state i, ancilla basis state a.
    ComplexMatrix joint;
    StateVector heralding_state;
};

AncillaRegister prepare_ancilla_register(const std::vector<EigenPair> &eigen, const StateVector &psi0, double t);

/// Throws InputError for non-normal K, an unnormalized psi0, t < 0, eigenvalues
/// with negative real part, or D > kMaxAncillaDimension; NumericalError when the
/// success probability falls below 1e-300.
AncillaOutcome ancilla_evolve(const ComplexMatrix &k, const StateVector &psi0, double t);

/// sum_n |<K_n|psi_prev>|^2 exp(-2 Re(k_n) t): squared norm of exp(-Kt)|psi_prev>.
double segment_norm(const StateVector &psi_prev, const ComplexMatrix &k, double t);

/// Fraction of `shots` simulated ancilla measurements that herald success.
double sample_success_rate(const ComplexMatrix &k, const StateVector &psi0, double t, std::uint64_t shots,
                           RngStream &stream);

}  // namespace qswlab
