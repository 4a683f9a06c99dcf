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
#include <iosfwd>

#include <Eigen/Dense>

#include "qswlab/graph.hpp"

namespace qswlab {

/// Dense operator on the single-excitation subspace (dimension = node count).
using ComplexMatrix = Eigen::MatrixXcd;

/// Amplitudes against the node basis |phi_k>. May be unnormalized.
using StateVector = Eigen::VectorXcd;

enum class Structure { general, hermitian, diagonal };

/// True when `a` carries the given structure: hermitian within `tol`, diagonal exactly.
bool has_structure(const ComplexMatrix &a, Structure s, double tol = 1e-12);

bool is_normalized(const StateVector &psi, double tol = 1e-12);
StateVector normalized(const StateVector &psi);

/// |phi_k> in a space of dimension `dim`.
StateVector basis_state(std::size_t dim, NodeIndex k);

/// The graph's initial state as a vector. Throws InputError when the graph has none.
StateVector initial_state_vector(const GraphSpec &g);

/// H_SE with H[i][j] = g_ij.
ComplexMatrix build_hamiltonian(const GraphSpec &g);

/// K_SE = diag(lambda_k / 2).
ComplexMatrix build_k(const GraphSpec &g);

/// Frobenius norm of HK - KH.
double commutator_norm(const ComplexMatrix &h, const ComplexMatrix &k);

/// Induced 1-norm (max column sum); an upper bound on the spectral norm.
double one_norm(const ComplexMatrix &a);

/// Matrix exponential by scaling and squaring with diagonal Pade approximants
/// (degrees 3, 5, 7, 9, 13 selected by the 1-norm).
ComplexMatrix expm(const ComplexMatrix &a);

/// exp(-i (H - iK) t), the no-jump evolution operator.
ComplexMatrix propagator_nonhermitian(const ComplexMatrix &h, const ComplexMatrix &k, double t);

/// exp(-iHt) for Hermitian H, via the eigendecomposition.
ComplexMatrix unitary_propagator(const ComplexMatrix &h, double t);

/// First-order splitting (exp(-iH t/steps) exp(-K t/steps))^steps.
ComplexMatrix trotter_propagator(const ComplexMatrix &h, const ComplexMatrix &k, double t, int steps);

/// Debug dump: one line per row, "re,im" pairs joined by commas.
void write_matrix(std::ostream &out, const ComplexMatrix &a);

}  // namespace qswlab
