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

#include "qswlab/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "qswlab/error.hpp"
#include "qswlab/format.hpp"

namespace qswlab {

namespace {

const Complex kI(0.0, 1.0);

// Pade coefficients b_0 .. b_m and the 1-norm thresholds theta_m below which
// the degree-m approximant alone reaches double precision.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                           2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0, 129060195264000.0,
    10559470521600.0,    670442572800.0,      33522128640.0,      1323241920.0,       40840800.0,
    960960.0,            16380.0,             182.0,              1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
ComplexMatrix pade_low(const ComplexMatrix &a, const std::array<double, N> &b) {
    const auto n = a.rows();
    const ComplexMatrix ident = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    ComplexMatrix power = ident;
    ComplexMatrix u_inner = ComplexMatrix::Zero(n, n);
    ComplexMatrix v = ComplexMatrix::Zero(n, n);
    for (std::size_t j = 0; j + 1 < N; j += 2) {
        v += b[j] * power;
        u_inner += b[j + 1] * power;
        power = power * a2;
    }
    const ComplexMatrix u = a * u_inner;
    return (v - u).partialPivLu().solve(v + u);
}

ComplexMatrix pade13(const ComplexMatrix &a) {
    const auto n = a.rows();
    const auto &b = kPade13;
    const ComplexMatrix ident = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;
    const ComplexMatrix u =
        a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const ComplexMatrix v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

bool has_structure(const ComplexMatrix &a, Structure s, double tol) {
    if (a.rows() != a.cols()) {
        return false;
    }
    switch (s) {
    case Structure::general:
        return true;
    case Structure::hermitian:
        return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
    case Structure::diagonal:
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            for (Eigen::Index i = 0; i < a.rows(); ++i) {
                if (i != j && a(i, j) != Complex{}) {
                    return false;
                }
            }
        }
        return true;
    }
    return false;
}

bool is_normalized(const StateVector &psi, double tol) {
    return std::abs(psi.squaredNorm() - 1.0) <= tol;
}

StateVector normalized(const StateVector &psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) {
        throw NumericalError("cannot normalize a zero state");
    }
    return psi / norm;
}

StateVector basis_state(std::size_t dim, NodeIndex k) {
    if (k >= dim) {
        throw InputError("node index " + std::to_string(k) + " out of range");
    }
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(dim));
    psi(static_cast<Eigen::Index>(k)) = 1.0;
    return psi;
}

StateVector initial_state_vector(const GraphSpec &g) {
    if (!g.initial_state()) {
        throw InputError("graph has no initial state");
    }
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(g.node_count()));
    for (const auto &[k, amplitude] : *g.initial_state()) {
        psi(static_cast<Eigen::Index>(k)) = amplitude;
    }
    return psi;
}

ComplexMatrix build_hamiltonian(const GraphSpec &g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    for (const auto &[ij, value] : g.coherent()) {
        h(static_cast<Eigen::Index>(ij.first), static_cast<Eigen::Index>(ij.second)) = value;
    }
    return h;
}

ComplexMatrix build_k(const GraphSpec &g) {
    const auto lambdas = node_lambdas(g);
    const auto n = static_cast<Eigen::Index>(lambdas.size());
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 0.5 * lambdas[static_cast<std::size_t>(i)];
    }
    return k;
}

double commutator_norm(const ComplexMatrix &h, const ComplexMatrix &k) {
    if (h.rows() != k.rows() || h.cols() != k.cols() || h.rows() != h.cols()) {
        throw InputError("commutator of operators with mismatched dimensions");
    }
    return (h * k - k * h).norm();
}

double one_norm(const ComplexMatrix &a) {
    if (a.size() == 0) {
        return 0.0;
    }
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

ComplexMatrix expm(const ComplexMatrix &a) {
    if (a.rows() != a.cols()) {
        throw InputError("matrix exponential of a non-square matrix");
    }
    const double norm = one_norm(a);
    if (!std::isfinite(norm)) {
        throw NumericalError("matrix exponential of a non-finite matrix");
    }
    if (norm <= kTheta3) {
        return pade_low(a, kPade3);
    }
    if (norm <= kTheta5) {
        return pade_low(a, kPade5);
    }
    if (norm <= kTheta7) {
        return pade_low(a, kPade7);
    }
    if (norm <= kTheta9) {
        return pade_low(a, kPade9);
    }
    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    ComplexMatrix result = pade13(a / std::ldexp(1.0, squarings));
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

ComplexMatrix propagator_nonhermitian(const ComplexMatrix &h, const ComplexMatrix &k, double t) {
    if (h.rows() != k.rows() || h.cols() != k.cols()) {
        throw InputError("propagator of operators with mismatched dimensions");
    }
    if (t < 0.0) {
        throw InputError("propagation time must be nonnegative");
    }
    return expm((-kI * t) * h - t * k);
}

ComplexMatrix unitary_propagator(const ComplexMatrix &h, double t) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the Hamiltonian failed");
    }
    const Eigen::VectorXcd phases = (-kI * t * eig.eigenvalues().cast<Complex>()).array().exp();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

ComplexMatrix trotter_propagator(const ComplexMatrix &h, const ComplexMatrix &k, double t, int steps) {
    if (steps < 1) {
        throw InputError("Trotter step count must be positive");
    }
    if (h.rows() != k.rows() || h.cols() != k.cols()) {
        throw InputError("propagator of operators with mismatched dimensions");
    }
    if (t < 0.0) {
        throw InputError("propagation time must be nonnegative");
    }
    const double tau = t / steps;
    const ComplexMatrix step = expm((-kI * tau) * h) * expm(-tau * k);
    ComplexMatrix result = ComplexMatrix::Identity(h.rows(), h.cols());
    for (int s = 0; s < steps; ++s) {
        result = step * result;
    }
    return result;
}

void write_matrix(std::ostream &out, const ComplexMatrix &a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_number(a(i, j).real()) << ',' << format_number(a(i, j).imag());
        }
        out << '\n';
    }
}

}  // namespace qswlab
