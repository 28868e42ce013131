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

#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "rcq/types.hpp"

// Dense reference constructions that do not go through the library.
namespace rcq::oracle {

inline Eigen::Matrix2cd letter(char c) {
    const cplx i1(0, 1);
    Eigen::Matrix2cd m;
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i1, i1, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("bad letter");
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Unsigned Pauli from letters, qubit 0 leftmost and most significant.
inline Matrix pauli(std::string_view letters) {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : letters) m = kron(m, Matrix(letter(c)));
    return m;
}

/// Single-qubit gate embedded on `qubit` of an n-qubit register.
inline Matrix embed(int n, int qubit, const Eigen::Matrix2cd& g) {
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) m = kron(m, q == qubit ? Matrix(g) : Matrix(Matrix::Identity(2, 2)));
    return m;
}

inline Matrix cz(int n, int a, int b) {
    return (Matrix::Identity(1 << n, 1 << n) + embed(n, a, letter('Z')) + embed(n, b, letter('Z')) -
            embed(n, a, letter('Z')) * embed(n, b, letter('Z'))) /
           2.0;
}

inline Matrix expm_herm(const Matrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    Vector ph(h.rows());
    for (int k = 0; k < h.rows(); ++k) ph[k] = std::polar(1.0, -t * eig.eigenvalues()[k]);
    return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

inline Matrix random_density(int n, Rng& rng) {
    std::normal_distribution<double> g(0, 1);
    const int d = 1 << n;
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
}

inline Matrix random_matrix(int d, Rng& rng) {
    std::normal_distribution<double> g(0, 1);
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    return a;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace rcq::oracle
