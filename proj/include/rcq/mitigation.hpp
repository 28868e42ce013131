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

#include <iosfwd>
#include <map>
#include <string>

#include "rcq/pauli.hpp"
#include "rcq/simulator.hpp"

namespace rcq {

/// SymmetryPartner values are copied from a measured Pauli through a symmetry relation.
enum class Provenance { Measured, SymmetryZero, SymmetryPartner };

/// "measured", "symmetry_zero" or "symmetry_partner" (the CSV flag).
const char* provenance_name(Provenance p);

/// Non-identity Pauli expectations of an n-qubit state. Keys are unsigned; a signed key folds its
/// sign into the value.
class ExpectationSet {
  public:
    struct Entry {
        double value = 0.0;
        Provenance provenance = Provenance::Measured;
    };

    /// Values beyond this magnitude are rejected outright.
    static constexpr double kHardCap = 1.1;

    ExpectationSet() = default;
    explicit ExpectationSet(int n_qubits);
    /// Exact expectations of every non-identity Pauli.
    static ExpectationSet from_state(const DensityMatrix& rho);
    static ExpectationSet from_map(int n_qubits, const ExpectationMap& values);

    int n_qubits() const { return n_; }
    void set(const PauliString& p, double value, Provenance provenance = Provenance::Measured);
    void set_symmetry_zero(const PauliString& p);
    bool contains(const PauliString& p) const;
    /// Throws std::out_of_range when absent.
    double value(const PauliString& p) const;
    Provenance provenance(const PauliString& p) const;
    const std::map<PauliString, Entry>& entries() const { return entries_; }
    /// Every non-identity Pauli has an entry.
    bool complete() const;

    ExpectationMap to_map() const;
    void write_csv(std::ostream& out) const;

  private:
    friend ExpectationSet rescale(const ExpectationSet&, double);

    int n_ = 0;
    std::map<PauliString, Entry> entries_;
};

/// L = sqrt(sum E_P^2 / (2^N - 1)); forced zeros count in the normalization.
/// Throws std::invalid_argument for an incomplete set and std::domain_error when all values vanish.
double bloch_length(const ExpectationSet& e);

/// Clips to [-1, 1] and divides by the Bloch length. A set already at unit length is returned
/// unchanged. Throws std::domain_error when the length is below `floor`.
ExpectationSet rescale(const ExpectationSet& e, double floor = 0.05);

struct McWeenyResult {
    DensityMatrix rho;
    int iterations = 0;
    bool converged = false;
    /// Empty on success.
    std::string error;
};

/// One un-normalized step 3 rho^2 - 2 rho^3.
Matrix mcweeny_step(const Matrix& rho);

/// Iterates the McWeeny step with trace renormalization until |Tr(rho^2) - 1| < tol. On a
/// degenerate dominant eigenvalue (gap <= 1e-6) or after max_iter steps, returns the input with
/// `converged = false`.
McWeenyResult mcweeny(const DensityMatrix& rho, double tol = 1e-10, int max_iter = 100);

/// cos(eps) = sum rho_P sigma_P / ((2^N - 1) L(rho)). sigma must have unit length within 1e-6.
double angle_error(const ExpectationSet& rho, const ExpectationSet& sigma, double floor = 0.05);

/// (1 + sum rho_P sigma_P) / 2^N.
double fidelity_from_expectations(const ExpectationSet& rho, const ExpectationSet& sigma);

}  // namespace rcq
