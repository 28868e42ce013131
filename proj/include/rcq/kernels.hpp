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

#include <span>
#include <utility>

#include "rcq/pauli.hpp"
#include "rcq/types.hpp"

/// Density-matrix kernels. The top-level namespace holds the OpenMP versions; `serial` holds the
/// straightforward reference implementations the tests compare against.
namespace rcq::kernels {

using Mat2 = Eigen::Matrix2cd;
using PauliTerms = std::span<const std::pair<PauliString, double>>;

/// Row count from which loops are split across threads.
inline constexpr int kParallelMinDim = 16;

/// rho -> (u on qubit) rho (u on qubit)^dagger
void apply_1q(Matrix& rho, int n_qubits, int qubit, const Mat2& u);
/// rho -> CZ rho CZ
void apply_cz(Matrix& rho, int n_qubits, int a, int b);
/// rho -> U rho U^dagger for a dense full-register U.
void apply_unitary(Matrix& rho, const Matrix& u);
/// rho -> sum_k p_k P_k rho P_k
void apply_pauli_channel(Matrix& rho, PauliTerms terms);
/// Tr(P * op)
cplx pauli_trace(const Matrix& op, const PauliString& p);
/// Diagonal of rho, clipped to [0, 1].
RealVector z_probabilities(const Matrix& rho);

namespace serial {
void apply_1q(Matrix& rho, int n_qubits, int qubit, const Mat2& u);
void apply_cz(Matrix& rho, int n_qubits, int a, int b);
void apply_unitary(Matrix& rho, const Matrix& u);
void apply_pauli_channel(Matrix& rho, PauliTerms terms);
cplx pauli_trace(const Matrix& op, const PauliString& p);
RealVector z_probabilities(const Matrix& rho);
}  // namespace serial

}  // namespace rcq::kernels
