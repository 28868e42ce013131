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

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace rcq;

namespace {

Eigen::Matrix2cd random_su2(Rng& rng) {
    std::uniform_real_distribution<double> u(-3, 3);
    return oracle::expm_herm(u(rng) * oracle::pauli("X") + u(rng) * oracle::pauli("Y") + u(rng) * oracle::pauli("Z"),
                             1.0);
}

}  // namespace

class KernelWidth : public ::testing::TestWithParam<int> {};

TEST_P(KernelWidth, single_qubit_gate_matches_serial_and_dense) {
    const int n = GetParam();
    Rng rng(11 + n);
    const Matrix rho = oracle::random_matrix(1 << n, rng);
    for (int q = 0; q < n; ++q) {
        const auto u = random_su2(rng);
        Matrix a = rho, b = rho;
        kernels::apply_1q(a, n, q, u);
        kernels::serial::apply_1q(b, n, q, u);
        const Matrix full = oracle::embed(n, q, u);
        const Matrix expect = full * rho * full.adjoint();
        EXPECT_LT(oracle::max_abs(a - expect), 1e-12);
        EXPECT_LT(oracle::max_abs(b - expect), 1e-12);
    }
}

TEST_P(KernelWidth, cz_matches_serial_and_dense) {
    const int n = GetParam();
    if (n < 2) GTEST_SKIP();
    Rng rng(21 + n);
    const Matrix rho = oracle::random_matrix(1 << n, rng);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            Matrix x = rho, y = rho;
            kernels::apply_cz(x, n, a, b);
            kernels::serial::apply_cz(y, n, a, b);
            const Matrix full = oracle::cz(n, a, b);
            EXPECT_LT(oracle::max_abs(x - full * rho * full), 1e-13);
            EXPECT_LT(oracle::max_abs(y - full * rho * full), 1e-13);
        }
}

TEST_P(KernelWidth, pauli_channel_matches_serial_and_dense) {
    const int n = GetParam();
    Rng rng(31 + n);
    const Matrix rho = oracle::random_matrix(1 << n, rng);
    std::vector<std::pair<PauliString, double>> terms;
    std::uniform_real_distribution<double> w(0, 0.1);
    for (std::uint32_t k = 0; k < (1u << (2 * n)); k += 3) terms.emplace_back(PauliString::from_index(n, k), w(rng));
    Matrix a = rho, b = rho;
    kernels::apply_pauli_channel(a, terms);
    kernels::serial::apply_pauli_channel(b, terms);
    Matrix expect = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& [p, wt] : terms) {
        const Matrix pm = oracle::pauli(p.letters());
        expect += wt * pm * rho * pm;
    }
    EXPECT_LT(oracle::max_abs(a - expect), 1e-12);
    EXPECT_LT(oracle::max_abs(b - expect), 1e-12);
}

TEST_P(KernelWidth, pauli_trace_matches_dense) {
    const int n = GetParam();
    Rng rng(41 + n);
    const Matrix op = oracle::random_matrix(1 << n, rng);
    for (const auto& p : all_paulis(n)) {
        for (int ph : {0, 1, 2, 3}) {
            const auto ps = p.with_phase(ph);
            const cplx expect = (ps.phase_factor() * oracle::pauli(p.letters()) * op).trace();
            EXPECT_LT(std::abs(kernels::pauli_trace(op, ps) - expect), 1e-11);
            EXPECT_LT(std::abs(kernels::serial::pauli_trace(op, ps) - expect), 1e-11);
        }
    }
}

TEST_P(KernelWidth, dense_unitary_and_probabilities) {
    const int n = GetParam();
    Rng rng(51 + n);
    const Matrix rho = oracle::random_density(n, rng);
    const Matrix u = oracle::expm_herm(oracle::random_matrix(1 << n, rng) + oracle::random_matrix(1 << n, rng).adjoint(), 0.4);
    Matrix a = rho, b = rho;
    kernels::apply_unitary(a, u);
    kernels::serial::apply_unitary(b, u);
    EXPECT_LT(oracle::max_abs(a - b), 1e-12);
    const RealVector p = kernels::z_probabilities(a);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_LT((p - kernels::serial::z_probabilities(a)).cwiseAbs().maxCoeff(), 1e-15);
}

INSTANTIATE_TEST_SUITE_P(widths, KernelWidth, ::testing::Values(1, 2, 3, 4, 5));
