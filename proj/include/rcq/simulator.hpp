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
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcq/circuit.hpp"
#include "rcq/pauli.hpp"
#include "rcq/types.hpp"

namespace rcq {

class DensityMatrix {
  public:
    DensityMatrix() = default;
    /// Checks shape only; call check() to enforce the state invariants.
    DensityMatrix(int n_qubits, Matrix rho);

    static DensityMatrix zero_state(int n_qubits);
    /// |b><b| with qubit 0 the most significant bit of b.
    static DensityMatrix basis_state(int n_qubits, std::uint32_t bits);
    static DensityMatrix maximally_mixed(int n_qubits);
    static DensityMatrix from_pure(const Vector& psi);
    /// Shape + invariant checked.
    static DensityMatrix from_matrix(const Matrix& rho);

    int n_qubits() const { return n_; }
    const Matrix& matrix() const { return rho_; }
    Matrix& matrix() { return rho_; }

    double hermiticity_error() const;
    double trace_error() const;
    double min_eigenvalue() const;
    /// Throws std::domain_error unless Hermitian and unit trace to 1e-10 with eigenvalues >= -1e-8.
    void check() const;

  private:
    int n_ = 0;
    Matrix rho_;
};

/// Noise attached to one hard-cycle signature: Pauli rotations exp(-i angle/2 P) applied in
/// order after the ideal CZ layer, then each stochastic Pauli channel in order.
struct CycleNoise {
    std::vector<std::pair<PauliString, double>> rotations;
    std::vector<PauliChannel> channels;

    Matrix coherent_unitary(int n_qubits) const;
    bool empty() const { return rotations.empty() && channels.empty(); }
};

/// Knobs of the built-in presets. Angles are rotation angles (exp(-i angle/2 P)).
struct NoiseParams {
    double zz_angle = 0.0;
    double z_angle = 0.0;
    double pauli_total = 0.0;
    double spectator_z = 0.0;

    /// "paper-like" (default), "coherent-heavy", "literal" or "ideal".
    static NoiseParams preset(std::string_view name);
};

/// Per-qubit readout flips: p01 = P(read 1 | 0), p10 = P(read 0 | 1).
struct ReadoutError {
    double p01 = 0.0;
    double p10 = 0.0;
};

class NoiseModel {
  public:
    NoiseModel() = default;
    explicit NoiseModel(int n_qubits) : n_(n_qubits) {}

    /// Entries for every CZ matching of the register plus "idle".
    static NoiseModel from_params(int n_qubits, const NoiseParams& params);
    static NoiseModel preset(int n_qubits, std::string_view name) {
        return from_params(n_qubits, NoiseParams::preset(name));
    }
    /// JSON config; see README for the schema.
    static NoiseModel from_config(std::string_view text);
    std::string to_config() const;

    int n_qubits() const { return n_; }
    void set(const std::string& signature, CycleNoise noise);
    void set_default(CycleNoise noise) { default_ = std::move(noise); }
    /// In strict mode a hard cycle without an entry (and no default) is an error.
    void set_strict(bool strict) { strict_ = strict; }
    bool strict() const { return strict_; }

    /// nullptr means the cycle is noiseless.
    const CycleNoise* find(const HardCycle& hard) const;
    const std::map<std::string, CycleNoise>& entries() const { return entries_; }

    void set_readout(std::vector<ReadoutError> readout);
    const std::vector<ReadoutError>& readout() const { return readout_; }

  private:
    int n_ = 0;
    bool strict_ = false;
    std::map<std::string, CycleNoise> entries_;
    std::optional<CycleNoise> default_;
    std::vector<ReadoutError> readout_;
};

struct ShotRecord {
    PauliString observable;
    /// Bitstring character k is qubit k.
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t n_shots = 0;
};

void write_shots_csv(std::ostream& out, const std::vector<ShotRecord>& records);

/// Easy cycles exactly; each hard cycle as ideal CZs, then coherent error, then Pauli channels.
DensityMatrix apply_circuit(const DensityMatrix& rho, const Circuit& c, const NoiseModel* noise = nullptr);

double expectation(const DensityMatrix& rho, const PauliString& p);

/// Samples Z-basis outcomes after rotating into the frame of Q. Readout errors come from `noise`.
ShotRecord sample_shots(const DensityMatrix& rho, const PauliString& q, std::uint64_t n_shots, Rng& rng,
                        const NoiseModel* noise = nullptr);

double estimate_expectation(const ShotRecord& rec);
/// Marginal estimate of P from a record measured in a compatible frame (same letter wherever P acts).
double estimate_expectation(const ShotRecord& rec, const PauliString& p);
bool frame_covers(const PauliString& frame, const PauliString& p);

/// All 3^n full-weight X/Y/Z settings; together they cover every Pauli.
std::vector<PauliString> tomography_settings(int n_qubits);
/// Greedy grouping into qubit-wise commuting settings, returned as full frames.
std::vector<PauliString> group_settings(const std::vector<PauliString>& paulis);

using ExpectationMap = std::map<PauliString, double>;

/// Linear inversion followed by eigenvalue clipping if any eigenvalue is below -1e-8.
/// Throws std::invalid_argument on missing entries unless `missing_as_zero`.
DensityMatrix tomography(const ExpectationMap& expectations, int n_qubits, bool missing_as_zero = false,
                         bool* projected = nullptr);

double purity(const DensityMatrix& rho);
/// Tr(rho sigma); throws std::domain_error when sigma is not pure.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace rcq
