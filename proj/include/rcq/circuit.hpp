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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rcq/pauli.hpp"
#include "rcq/types.hpp"

namespace rcq {

using Mat2 = Eigen::Matrix2cd;

/// Single-qubit gate as Rz(z3) Rx(x2) Rz(z2) Rx(x1) Rz(z1); z1 acts first.
struct ZxzxzAngles {
    double z1 = 0, x1 = 0, z2 = 0, x2 = 0, z3 = 0;

    Mat2 matrix() const;
    friend bool operator==(const ZxzxzAngles&, const ZxzxzAngles&) = default;
};

Mat2 rz(double theta);
Mat2 rx(double theta);
Mat2 ry(double theta);
Mat2 letter_matrix(Letter letter);

/// One SU(2) per qubit.
struct EasyCycle {
    std::vector<ZxzxzAngles> gates;

    static EasyCycle identity(int n_qubits) { return {std::vector<ZxzxzAngles>(static_cast<std::size_t>(n_qubits))}; }
    static EasyCycle from_matrices(const std::vector<Mat2>& per_qubit);
    std::vector<Mat2> matrices() const;
    friend bool operator==(const EasyCycle&, const EasyCycle&) = default;
};

struct CzPair {
    int a = 0;
    int b = 0;
    friend auto operator<=>(const CzPair&, const CzPair&) = default;
};

/// Disjoint CZ placements; qubits not listed idle.
struct HardCycle {
    std::vector<CzPair> cz;

    /// Canonical key used by noise models, e.g. "cz(0,1)" or "idle".
    std::string signature() const;
    friend bool operator==(const HardCycle&, const HardCycle&) = default;
};

/// Alternating easy/hard cycle circuit; always starts and ends with an easy cycle.
class Circuit {
  public:
    Circuit() = default;
    explicit Circuit(int n_qubits);
    /// Validates easy.size() == hard.size() + 1, widths, and disjoint in-range CZ pairs.
    Circuit(int n_qubits, std::vector<EasyCycle> easy, std::vector<HardCycle> hard);

    int n_qubits() const { return n_; }
    int hard_cycle_count() const { return static_cast<int>(hard_.size()); }
    int cz_count() const;
    const std::vector<EasyCycle>& easy_cycles() const { return easy_; }
    const std::vector<HardCycle>& hard_cycles() const { return hard_; }
    const EasyCycle& easy(int i) const { return easy_.at(static_cast<std::size_t>(i)); }
    const HardCycle& hard(int i) const { return hard_.at(static_cast<std::size_t>(i)); }

    /// Left-multiplies (applies after) per-qubit gates onto easy cycle i.
    void apply_after(int easy_index, const std::vector<Mat2>& gates);
    /// Right-multiplies (applies before) per-qubit gates onto easy cycle i.
    void apply_before(int easy_index, const std::vector<Mat2>& gates);
    /// Appends a hard cycle followed by an easy cycle.
    void push_back(const HardCycle& hard, const EasyCycle& easy);

    /// Runs `this` then `next`; the touching easy cycles are merged.
    Circuit then(const Circuit& next) const;

    std::string to_text() const;
    static Circuit from_text(std::string_view text);

    friend bool operator==(const Circuit&, const Circuit&) = default;

  private:
    int n_ = 0;
    std::vector<EasyCycle> easy_;
    std::vector<HardCycle> hard_;
};

/// Haar-random element of SU(2^n) (Ginibre + QR with phase fix, determinant normalized to 1).
Matrix haar_random_unitary(int n_qubits, Rng& rng);

/// ZXZXZ angles with x1 = x2 = pi/2 (all-zero for the identity).
ZxzxzAngles zxzxz_angles(const Mat2& v);

/// Exact 3-CZ circuit (4 easy cycles) equal to `u` up to global phase.
Circuit kak_decompose(const Matrix& u);

/// Z-measurement frame rotation B_Q^dagger for one letter (X -> Ry(-pi/2), Y -> Rx(pi/2)).
Mat2 measurement_rotation(Letter letter);
/// Rotation taking |0> to the +1 eigenstate of the letter.
Mat2 preparation_rotation(Letter letter);

/// Composes the Z-frame rotation for Q into the final easy cycle. Throws if Q is the identity.
Circuit append_measurement_basis(const Circuit& c, const PauliString& q);

Matrix net_unitary(const Circuit& c);

/// Kronecker product of per-qubit gates (qubit 0 most significant).
Matrix kron_layer(const std::vector<Mat2>& gates);
Matrix cz_layer(int n_qubits, const HardCycle& hard);

/// Operator norm of (a - e^{i phi} b) with phi aligned by the trace overlap; bounds the true minimum from above.
double phase_distance(const Matrix& a, const Matrix& b);
double unitarity_error(const Matrix& u);

}  // namespace rcq
