// Copyright 2026 The rcq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rcq/kernels.hpp"

#include <algorithm>
#include <bit>

namespace rcq::kernels {

namespace {

inline std::uint32_t insert_zero_bit(std::uint32_t k, std::uint32_t bit) {
    const std::uint32_t low = k & (bit - 1);
    return ((k ^ low) << 1) | low;
}

inline double parity_sign(std::uint32_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

inline cplx i_pow(int k) {
    switch (k & 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

}  // namespace

void apply_1q(Matrix& rho, int n_qubits, int qubit, const Mat2& u) {
    const int dim = static_cast<int>(rho.rows());
    const std::uint32_t bit = qubit_bit(n_qubits, qubit);
    const int half = dim / 2;
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
#pragma omp parallel for if (dim >= kParallelMinDim) schedule(static)
    for (int c = 0; c < dim; ++c) {
        for (int k = 0; k < half; ++k) {
            const auto i0 = insert_zero_bit(static_cast<std::uint32_t>(k), bit);
            const auto i1 = i0 | bit;
            const cplx a = rho(i0, c), b = rho(i1, c);
            rho(i0, c) = u00 * a + u01 * b;
            rho(i1, c) = u10 * a + u11 * b;
        }
    }
    const cplx c00 = std::conj(u00), c01 = std::conj(u01), c10 = std::conj(u10), c11 = std::conj(u11);
#pragma omp parallel for if (dim >= kParallelMinDim) schedule(static)
    for (int k = 0; k < half; ++k) {
        const auto j0 = insert_zero_bit(static_cast<std::uint32_t>(k), bit);
        const auto j1 = j0 | bit;
        for (int r = 0; r < dim; ++r) {
            const cplx a = rho(r, j0), b = rho(r, j1);
            rho(r, j0) = a * c00 + b * c01;
            rho(r, j1) = a * c10 + b * c11;
        }
    }
}

void apply_cz(Matrix& rho, int n_qubits, int a, int b) {
    const int dim = static_cast<int>(rho.rows());
    const std::uint32_t mask = qubit_bit(n_qubits, a) | qubit_bit(n_qubits, b);
#pragma omp parallel for if (dim >= kParallelMinDim) schedule(static)
    for (int c = 0; c < dim; ++c) {
        const bool col_odd = (static_cast<std::uint32_t>(c) & mask) == mask;
        for (int r = 0; r < dim; ++r) {
            const bool row_odd = (static_cast<std::uint32_t>(r) & mask) == mask;
            if (row_odd != col_odd) rho(r, c) = -rho(r, c);
        }
    }
}

void apply_unitary(Matrix& rho, const Matrix& u) {
    const int dim = static_cast<int>(rho.rows());
    Matrix tmp(dim, dim);
#pragma omp parallel for if (dim >= kParallelMinDim) schedule(static)
    for (int c = 0; c < dim; ++c) tmp.col(c) = u * rho.col(c);
    const Matrix ud = u.adjoint();
#pragma omp parallel for if (dim >= kParallelMinDim) schedule(static)
    for (int c = 0; c < dim; ++c) rho.col(c) = tmp * ud.col(c);
}

void apply_pauli_channel(Matrix& rho, PauliTerms terms) {
    const int dim = static_cast<int>(rho.rows());
    Matrix out = Matrix::Zero(dim, dim);
    // Each thread owns whole output columns.
#pragma omp parallel for if (dim >= kParallelMinDim) schedule(static)
    for (int cc = 0; cc < dim; ++cc) {
        for (const auto& [p, weight] : terms) {
            if (weight == 0.0) continue;
            const auto x = p.x_bits(), z = p.z_bits();
            const auto c = static_cast<std::uint32_t>(cc) ^ x;
            const double gc = weight * parity_sign(c & z);
            for (int rr = 0; rr < dim; ++rr) {
                const auto r = static_cast<std::uint32_t>(rr) ^ x;
                out(rr, cc) += gc * parity_sign(r & z) * rho(r, c);
            }
        }
    }
    rho = std::move(out);
}

cplx pauli_trace(const Matrix& op, const PauliString& p) {
    const int dim = static_cast<int>(op.rows());
    const auto x = p.x_bits(), z = p.z_bits();
    double re = 0.0, im = 0.0;
#pragma omp parallel for if (dim >= 4 * kParallelMinDim) reduction(+ : re, im) schedule(static)
    for (int k = 0; k < dim; ++k) {
        const cplx v = parity_sign(static_cast<std::uint32_t>(k) & z) * op(k, static_cast<std::uint32_t>(k) ^ x);
        re += v.real();
        im += v.imag();
    }
    return i_pow(p.phase() + p.y_count()) * cplx(re, im);
}

RealVector z_probabilities(const Matrix& rho) {
    const int dim = static_cast<int>(rho.rows());
    RealVector probs(dim);
    for (int k = 0; k < dim; ++k) probs[k] = std::clamp(rho(k, k).real(), 0.0, 1.0);
    return probs;
}

// ---------------------------------------------------------------------------

namespace serial {

namespace {
Matrix embed_1q(int n_qubits, int qubit, const Mat2& u) {
    Matrix full = Matrix::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) {
        const Matrix f = (q == qubit) ? Matrix(u) : Matrix(Matrix::Identity(2, 2));
        Matrix next(full.rows() * 2, full.cols() * 2);
        for (int i = 0; i < full.rows(); ++i)
            for (int j = 0; j < full.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = full(i, j) * f;
        full = std::move(next);
    }
    return full;
}
}  // namespace

void apply_1q(Matrix& rho, int n_qubits, int qubit, const Mat2& u) {
    const Matrix full = embed_1q(n_qubits, qubit, u);
    rho = full * rho * full.adjoint();
}

void apply_cz(Matrix& rho, int n_qubits, int a, int b) {
    const int dim = static_cast<int>(rho.rows());
    Matrix cz = Matrix::Identity(dim, dim);
    const std::uint32_t mask = qubit_bit(n_qubits, a) | qubit_bit(n_qubits, b);
    for (int k = 0; k < dim; ++k)
        if ((static_cast<std::uint32_t>(k) & mask) == mask) cz(k, k) = -1.0;
    rho = cz * rho * cz;
}

void apply_unitary(Matrix& rho, const Matrix& u) { rho = u * rho * u.adjoint(); }

void apply_pauli_channel(Matrix& rho, PauliTerms terms) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& [p, weight] : terms) {
        const Matrix m = p.to_matrix();
        out += weight * (m * rho * m.adjoint());
    }
    rho = std::move(out);
}

cplx pauli_trace(const Matrix& op, const PauliString& p) { return (p.to_matrix() * op).trace(); }

RealVector z_probabilities(const Matrix& rho) {
    RealVector probs = rho.diagonal().real();
    for (auto& v : probs) v = std::clamp(v, 0.0, 1.0);
    return probs;
}

}  // namespace serial

}  // namespace rcq::kernels
