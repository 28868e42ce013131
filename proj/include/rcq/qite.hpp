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
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rcq/circuit.hpp"
#include "rcq/mitigation.hpp"
#include "rcq/pauli.hpp"
#include "rcq/rc.hpp"

namespace rcq {

struct Hamiltonian {
    int n_qubits = 0;
    std::map<PauliString, double> terms;

    /// Adds c * P; a signed P folds its sign into c.
    void add(const PauliString& p, double coefficient);
    Matrix matrix() const;
    /// sum_P h_P E_P, with E_I = 1.
    double energy(const ExpectationSet& e) const;
};

/// H = J sum X_i X_{i+1} + h sum Z_i on an open chain.
Hamiltonian tfim(int n_qubits, double J, double h);

/// Z on every qubit.
PauliString parity_operator(int n_qubits);

struct Spectrum {
    RealVector energies;  // ascending
    Matrix states;        // eigenvectors as columns
    bool degenerate_ground = false;

    double e0() const { return energies(0); }
    double e1() const { return energies(1); }
    Vector ground() const { return states.col(0); }
    Vector first_excited() const { return states.col(1); }
};

/// Dense diagonalization, n <= 4. Ground states closer than 1e-9 are flagged as degenerate.
Spectrum exact_ground(const Hamiltonian& h);

struct Eigenpair {
    double energy = 0.0;
    Vector state;
};

/// Lowest eigenpair inside the Z^n = parity eigenspace.
Eigenpair lowest_in_sector(const Hamiltonian& h, int parity);

/// Parity of an eigenvector that lies in one Z^n sector; throws std::domain_error otherwise.
int sector_parity(const Vector& state);

/// Non-identity Paulis allowed as generators: commuting with Z^n (z2) and with an odd number of Y
/// (time reversal).
std::vector<PauliString> generator_support(int n_qubits, bool use_z2, bool use_time_reversal);

/// Paulis that can carry a nonzero expectation in a symmetric state.
///
/// With z2, Paulis anticommuting with S = Z^n are forced to zero and the rest pair up as
/// <SP> = s <P>. One element per pair is measured. The pair {I, S} is represented by S itself, which
/// is measured rather than fixed to s so that it shrinks with the other values under noise.
struct StateSupport {
    struct Partner {
        PauliString pauli;
        PauliString source;
        /// <pauli> = factor * <source>
        double factor = 1.0;
    };

    int n_qubits = 0;
    int parity = 1;
    /// True when the z2 relations are in use and S stands for the identity class.
    bool paired = false;
    std::vector<PauliString> measured;
    std::vector<Partner> partners;
    std::vector<PauliString> forced_zero;

    /// Number of independent classes, the identity class included.
    int class_count() const;
    /// Fills partners and forced zeros around measured values. Throws std::out_of_range if a
    /// measured Pauli is missing.
    ExpectationSet complete(const ExpectationMap& measured_values) const;
};

StateSupport state_support(int n_qubits, bool use_z2, bool use_time_reversal, int parity);

/// exp(-i sum_P a_P P).
struct GeneratorSet {
    int n_qubits = 0;
    std::vector<PauliString> paulis;
    RealVector coefficients;

    Matrix unitary() const;
};

/// Solves (S + ridge I) a = b with S_IJ = Re<P_I P_J> and b_I = Im<P_I H> / sqrt(c), and returns
/// dtau * a. c = 1 - 2 dtau <H> + 2 dtau^2 <H^2> is the squared norm of exp(-dtau H)|psi> to second
/// order. Throws std::domain_error for c <= 0 or a singular system at zero ridge.
GeneratorSet qite_step(const ExpectationSet& e, const Hamiltonian& h, double dtau, double ridge,
                       const std::vector<PauliString>& generators);

struct SynthesisOptions {
    double tolerance = 1e-3;
    int cz_cap = 40;
};

/// n = 1: one easy cycle. n = 2: dense exponential through kak_decompose. n = 3: first-order
/// product of Pauli phase gadgets, sub-split until the operator-norm error meets the tolerance.
/// Throws std::domain_error if that needs more than cz_cap CZs.
Circuit synthesize(const GeneratorSet& a, const SynthesisOptions& options = {});

/// Circuit taking |0...0> to `state` up to phase: a single gate (n = 1), kak_decompose of a
/// completed unitary (n = 2), or a Schmidt split across qubit 0 with one CZ plus a KAK block (n = 3).
Circuit prepare_state(const Vector& state);

enum class MitigationMode { None, Rescale, RescaleMcWeeny };
enum class ExcitedMethod { Parity, Shift };

std::string to_string(MitigationMode mode);
MitigationMode mitigation_mode_from(std::string_view name);

struct QiteConfig {
    int n_qubits = 3;
    double J = 1.0;
    double h = 1.0;
    double dtau = 0.15;
    int n_steps = 30;
    double ridge = 1e-3;
    MitigationMode mitigation = MitigationMode::None;
    /// 0 runs the bare circuit.
    int randomizations = 0;
    /// Per randomization, or per circuit without RC.
    std::uint64_t shots = 1000;
    /// Infinite-shot expectations.
    bool exact = false;
    /// Z^n eigenvalue of the initial basis state.
    int parity = 1;
    std::uint64_t seed = 0;
    bool use_z2 = true;
    bool use_time_reversal = true;
    double rescale_floor = 0.05;
    ExcitedMethod excited_method = ExcitedMethod::Parity;
    double shift_alpha = 0.0;

    void validate() const;
    std::string to_json() const;
    static QiteConfig from_json(std::string_view text);
};

struct QiteStep {
    int step = 0;
    double energy = 0.0;
    double rel_error = 0.0;
    double infidelity = 0.0;
    double magnetization = 0.0;
    double bloch_length = 0.0;
    /// Fidelity of the ideal update with the normalized exact imaginary-time step; NaN after the last step.
    double step_fidelity = 0.0;
    int cz_count = 0;
    bool rescaled = false;
    int mcweeny_iterations = 0;
    std::string note;
    std::vector<double> coefficients;
};

struct WindowStats {
    double mean = 0.0;
    double stddev = 0.0;
};

struct QiteTrajectory {
    QiteConfig config;
    std::vector<PauliString> generators;
    double target_energy = 0.0;
    /// One record per measurement: the initial state and each of the n_steps updates.
    std::vector<QiteStep> steps;

    WindowStats rel_error(int last = 10) const;
    WindowStats infidelity(int last = 10) const;
    WindowStats energy(int last = 10) const;
    WindowStats magnetization(int last = 10) const;

    void write_csv(std::ostream& out) const;
    std::string to_json() const;
};

/// Ground-state run. Throws std::invalid_argument when the configured parity is not that of the
/// ground state, or std::domain_error when the start state has no overlap with it.
QiteTrajectory qite_run(const QiteConfig& cfg, const Backend& backend);

/// First excited state, by flipping the start parity or by H + alpha |GS><GS| from a product start
/// state with the z2 filters off.
QiteTrajectory excited_run(const QiteConfig& cfg, const Backend& backend);

/// Mean single-qubit Z expectation.
double magnetization(const ExpectationSet& e);

}  // namespace rcq
