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

#include "qswlab/ancilla.hpp"

#include <algorithm>
#include <cmath>

#include "qswlab/error.hpp"

namespace qswlab {

namespace {

constexpr double kNormalityTolerance = 1e-10;
constexpr double kMinSuccessProbability = 1e-300;

std::vector<Complex> expansion(const std::vector<EigenPair> &eigen, const StateVector &psi) {
    std::vector<Complex> c;
    c.reserve(eigen.size());
    for (const auto &pair : eigen) {
        c.push_back(pair.vector.dot(psi));
    }
    return c;
}

// Unit ancilla vector orthogonal to `m`, built from the basis vector least aligned with it.
StateVector orthogonal_complement(const StateVector &m) {
    Eigen::Index pick = 0;
    m.cwiseAbs().minCoeff(&pick);
    StateVector e = StateVector::Zero(m.size());
    e(pick) = 1.0;
    StateVector v = e - m * m.dot(e);
    return v / v.norm();
}

}  // namespace

std::vector<EigenPair> eigendecompose_k(const ComplexMatrix &k) {
    if (k.rows() != k.cols() || k.rows() == 0) {
        throw InputError("K must be square and nonempty");
    }
    const double scale = std::max(1.0, k.squaredNorm());
    if ((k * k.adjoint() - k.adjoint() * k).norm() > kNormalityTolerance * scale) {
        throw InputError("K is not normal");
    }
    const auto n = k.rows();
    std::vector<EigenPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    if (has_structure(k, Structure::diagonal)) {
        for (Eigen::Index i = 0; i < n; ++i) {
            pairs.push_back({k(i, i), basis_state(static_cast<std::size_t>(n), static_cast<NodeIndex>(i))});
        }
    } else if (has_structure(k, Structure::hermitian)) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(k);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("eigendecomposition of K failed");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            pairs.push_back({Complex(eig.eigenvalues()(i), 0.0), eig.eigenvectors().col(i)});
        }
    } else {
        // For a normal matrix the Schur form is diagonal and the Schur vectors
        // are an orthonormal eigenbasis.
        Eigen::ComplexSchur<ComplexMatrix> schur(k);
        if (schur.info() != Eigen::Success) {
            throw NumericalError("Schur decomposition of K failed");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            pairs.push_back({schur.matrixT()(i, i), schur.matrixU().col(i)});
        }
    }
    return pairs;
}

AncillaRegister prepare_ancilla_register(const std::vector<EigenPair> &eigen, const StateVector &psi0, double t) {
    const auto d = static_cast<Eigen::Index>(eigen.size());
    const Eigen::Index da = std::max<Eigen::Index>(d, 2);

    std::vector<Complex> damping(eigen.size());
    StateVector m = StateVector::Zero(da);
    for (Eigen::Index n = 0; n < d; ++n) {
        damping[static_cast<std::size_t>(n)] = std::exp(-eigen[static_cast<std::size_t>(n)].value * t);
        m(n) = std::abs(damping[static_cast<std::size_t>(n)]);
    }
    m /= m.norm();
    const StateVector m_perp = orthogonal_complement(m);

    // U_n |Omega> = a_n |M> + sqrt(1 - |a_n|^2) |M_perp>, a_n = exp(-k_n t).
    const auto coeffs = expansion(eigen, psi0);
    AncillaRegister reg{ComplexMatrix::Zero(d, da), m};
    for (Eigen::Index n = 0; n < d; ++n) {
        const Complex a = damping[static_cast<std::size_t>(n)];
        const double rest = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
        const StateVector chi = a * m + rest * m_perp;
        reg.joint += coeffs[static_cast<std::size_t>(n)] * eigen[static_cast<std::size_t>(n)].vector * chi.transpose();
    }
    return reg;
}

AncillaOutcome ancilla_evolve(const ComplexMatrix &k, const StateVector &psi0, double t) {
    if (static_cast<std::size_t>(k.rows()) > kMaxAncillaDimension) {
        throw InputError("ancilla simulation is limited to dimension " + std::to_string(kMaxAncillaDimension));
    }
    if (psi0.size() != k.rows()) {
        throw InputError("state dimension does not match K");
    }
    if (!is_normalized(psi0, 1e-10)) {
        throw InputError("initial state must be normalized");
    }
    if (!(t >= 0.0)) {
        throw InputError("evolution time must be nonnegative");
    }
    AncillaOutcome out;
    out.eigen_data = eigendecompose_k(k);
    if (t > 0.0) {
        for (const auto &pair : out.eigen_data) {
            if (pair.value.real() < -1e-12) {
                throw InputError("K has an eigenvalue with negative real part; exp(-Kt) cannot be post-selected");
            }
        }
    }
    out.coefficients = expansion(out.eigen_data, psi0);

    const AncillaRegister reg = prepare_ancilla_register(out.eigen_data, psi0, t);
    // (I (x) <M|) applied to the joint state.
    const StateVector projected = reg.joint * reg.heralding_state.conjugate();
    out.success_probability = projected.squaredNorm();
    if (!(out.success_probability >= kMinSuccessProbability)) {
        throw NumericalError("post-selection probability underflows at t = " + std::to_string(t));
    }
    out.post_state = projected / std::sqrt(out.success_probability);
    return out;
}

double segment_norm(const StateVector &psi_prev, const ComplexMatrix &k, double t) {
    if (psi_prev.size() != k.rows()) {
        throw InputError("state dimension does not match K");
    }
    const auto eigen = eigendecompose_k(k);
    double total = 0.0;
    for (const auto &pair : eigen) {
        total += std::norm(pair.vector.dot(psi_prev)) * std::exp(-2.0 * pair.value.real() * t);
    }
    return total;
}

double sample_success_rate(const ComplexMatrix &k, const StateVector &psi0, double t, std::uint64_t shots,
                           RngStream &stream) {
    if (shots == 0) {
        throw InputError("shot count must be positive");
    }
    const AncillaOutcome outcome = ancilla_evolve(k, psi0, t);
    const AncillaRegister reg = prepare_ancilla_register(outcome.eigen_data, psi0, t);
    // Born probability of the heralding outcome, read off the joint state.
    const double p_herald = (reg.joint * reg.heralding_state.conjugate()).squaredNorm() / reg.joint.squaredNorm();
    std::uint64_t successes = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        if (uniform_open(stream) < p_herald) {
            ++successes;
        }
    }
    return static_cast<double>(successes) / static_cast<double>(shots);
}

}  // namespace qswlab
