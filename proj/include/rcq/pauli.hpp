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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rcq/types.hpp"

namespace rcq {

/// Maximum register width for PauliString. Dense routines are further limited to 4 qubits.
inline constexpr int kMaxPauliQubits = 16;

/// Single-qubit Pauli letter. Numeric values define the global basis ordering (I < X < Y < Z).
enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Signed N-qubit Pauli operator in symplectic form.
///
/// Bits are stored in computational-basis order: qubit q lives at bit (n - 1 - q), so qubit 0
/// is the most significant bit of a basis index. The operator is i^phase * (sigma_0 (x) ... ),
/// where each sigma is the Hermitian I, X, Y or Z (Y is *not* stored as iXZ).
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(int n_qubits);
    PauliString(int n_qubits, std::uint32_t x_bits, std::uint32_t z_bits, int phase = 0);

    /// Parses "XIZ", "+XZ", "-YY", "iXZ", "-iXZ". Character k is qubit k.
    static PauliString parse(std::string_view text);
    /// Lexicographic index in the (I, X, Y, Z) ordering with qubit 0 most significant.
    static PauliString from_index(int n_qubits, std::uint32_t index);
    static PauliString single(int n_qubits, int qubit, Letter letter);

    int n_qubits() const { return n_; }
    std::uint32_t x_bits() const { return x_; }
    std::uint32_t z_bits() const { return z_; }
    /// Exponent k of the prefactor i^k, in [0, 4).
    int phase() const { return phase_; }
    cplx phase_factor() const;

    Letter letter(int qubit) const;
    int weight() const;
    bool is_identity() const { return x_ == 0 && z_ == 0; }
    bool is_hermitian() const { return (phase_ & 1) == 0; }
    /// +1 or -1 for Hermitian strings; throws otherwise.
    int sign() const;
    int y_count() const;

    /// Same letters with phase +1.
    PauliString unsigned_part() const { return PauliString(n_, x_, z_, 0); }
    PauliString with_phase(int phase) const { return PauliString(n_, x_, z_, phase); }
    PauliString negated() const { return with_phase(phase_ + 2); }
    std::uint32_t index() const;

    /// Mask with bit (n-1-q) set for every qubit q where this string is not the identity.
    std::uint32_t support_mask() const { return x_ | z_; }

    std::string str() const;
    /// Letters only, no sign.
    std::string letters() const;

    Matrix to_matrix() const;

    friend bool operator==(const PauliString& a, const PauliString& b) = default;
    /// Orders by letters (basis index), then phase.
    friend bool operator<(const PauliString& a, const PauliString& b);

  private:
    int n_ = 0;
    std::uint32_t x_ = 0;
    std::uint32_t z_ = 0;
    int phase_ = 0;
};

/// Bit position inside a basis index for a given qubit.
inline std::uint32_t qubit_bit(int n_qubits, int qubit) { return 1u << (n_qubits - 1 - qubit); }

/// Product P*Q with exact phase. Throws std::invalid_argument on width mismatch.
PauliString pauli_mul(const PauliString& p, const PauliString& q);
PauliString operator*(const PauliString& p, const PauliString& q);

/// True iff the symplectic inner product vanishes.
bool commutes(const PauliString& p, const PauliString& q);

/// All 4^n unsigned Pauli strings in index order (identity first).
std::vector<PauliString> all_paulis(int n_qubits);

/// Named Clifford gates that Pauli strings can be pushed through exactly.
enum class CliffordKind { H, S, Sdg, X, Y, Z, CZ };

struct CliffordGate {
    CliffordKind kind;
    int q0 = 0;
    int q1 = -1;  // second qubit for CZ only

    static CliffordGate cz(int a, int b) { return {CliffordKind::CZ, a, b}; }
    static CliffordGate single(CliffordKind kind, int q) { return {kind, q, -1}; }
    CliffordGate inverse() const;
    /// Dense 2x2 (single-qubit) or 4x4 (CZ) matrix, qubit q0 most significant.
    Matrix local_matrix() const;
};

/// Returns G P G^dagger, sign included. Throws std::out_of_range for bad qubit indices.
PauliString conjugate_through(const PauliString& p, const CliffordGate& gate);

// ---------------------------------------------------------------------------
// Pauli transfer matrices
// ---------------------------------------------------------------------------

/// Real 4^n x 4^n matrix of a channel in the normalized Pauli basis, entries Tr(P_i L(P_j)) / 2^n.
struct Ptm {
    int n_qubits = 0;
    RealMatrix matrix;

    static Ptm identity(int n_qubits);
    double trace_preservation_error() const;
    double orthogonality_error() const;
    RealVector diagonal() const { return matrix.diagonal(); }
    /// Channel composition: apply `first`, then `*this`.
    Ptm after(const Ptm& first) const;
};

struct UnitaryChannel {
    Matrix unitary;
};

/// Stochastic Pauli channel rho -> sum_P p_P P rho P. The identity receives 1 - sum(p) unless listed.
struct PauliChannel {
    int n_qubits = 0;
    std::vector<std::pair<PauliString, double>> terms;

    /// Probabilities including the implicit identity term, validated (each in [0,1], sum <= 1).
    std::vector<std::pair<PauliString, double>> normalized_terms() const;
    /// Analytic PTM diagonal: d_Q = sum_P p_P (+1 if P commutes with Q, -1 otherwise).
    RealVector decay_diagonal() const;
};

struct KrausChannel {
    std::vector<Matrix> operators;
};

using Channel = std::variant<UnitaryChannel, PauliChannel, KrausChannel>;

/// Dense PTM of a channel on n <= 4 qubits.
/// Throws std::invalid_argument if a Kraus set violates completeness beyond 1e-10.
Ptm ptm_of(const Channel& channel);

/// Applies a channel to an arbitrary operator (not necessarily a state).
Matrix apply_channel(const Channel& channel, const Matrix& op);

}  // namespace rcq
