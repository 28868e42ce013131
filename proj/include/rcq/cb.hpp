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
#include <vector>

#include "rcq/circuit.hpp"
#include "rcq/pauli.hpp"
#include "rcq/rc.hpp"

namespace rcq {

/// One dressed CB sequence. Ideally the measured Pauli has expectation `sign`.
struct CbSequence {
    Circuit circuit;
    PauliString prepared;
    /// Unsigned frame-propagated image of `prepared`.
    PauliString measured;
    /// Z string on the support of `measured`; the circuit already ends with the rotation into this frame.
    PauliString observable;
    int sign = 1;
    int length = 0;
};

/// Prepares the +1 eigenstate of P, applies `length` repetitions of the cycle, each preceded by a
/// uniformly random Pauli, and rotates the tracked image of P into the Z frame.
CbSequence make_cb_sequence(const HardCycle& cycle, int n_qubits, const PauliString& p, int length, Rng& rng);
std::vector<CbSequence> cb_sequences(const HardCycle& cycle, int n_qubits, const PauliString& p,
                                     const std::vector<int>& lengths, int n_random, Rng& rng);

struct DecayFit {
    double amplitude = 0.0;
    double lambda = 0.0;
    /// Standard error of lambda.
    double std_error = 0.0;
    /// RMS residual on the log scale.
    double residual = 0.0;
    /// False when fewer than two lengths had a positive mean (decay below the noise floor).
    bool ok = false;
};

/// Fits A * lambda^m on the log scale; `variances` (of the means) turns on inverse-variance weights.
/// lambda is clipped to (0, 1.05]. Throws std::invalid_argument for fewer than two lengths.
DecayFit fit_decay(const std::map<int, double>& points, const std::map<int, double>* variances = nullptr);

struct CbSummary {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<PauliString> violations;
    double lower_bound() const { return 2.0 * mean - 1.0; }
};

/// Population mean and std plus every Pauli outside [2 mean - 1 - tol, 1 + tol].
CbSummary cb_summary(const std::map<PauliString, double>& decays, double tolerance = 1e-12);

struct CbOptions {
    std::vector<int> lengths{4, 8, 16, 32};
    int n_random = 30;
    std::uint64_t shots = 100;
    std::uint64_t seed = 0;
    /// 0 measures every non-identity Pauli; k > 0 a uniformly sampled subset of k of them.
    int sample_paulis = 0;
    /// Infinite-shot expectations instead of sampled shots.
    bool exact = false;
};

struct CbResult {
    std::string signature;
    int n_qubits = 0;
    std::map<PauliString, double> decays;
    std::map<PauliString, DecayFit> fits;
    /// Paulis whose fit failed (excluded from `decays`).
    std::vector<PauliString> failed;
    double mean = 0.0;
    double stddev = 0.0;

    CbSummary summary(double tolerance = 1e-12) const { return cb_summary(decays, tolerance); }
    void write_csv(std::ostream& out) const;
    std::string summary_json() const;
};

CbResult run_cb(const Backend& backend, const HardCycle& cycle, const CbOptions& options);

/// Twirled per-cycle error of a noise-model entry (coherent part then Pauli channels).
Ptm cycle_error_ptm(const NoiseModel& noise, const HardCycle& cycle);
/// What CB identifies for each Pauli: sqrt(d_P d_CZ(P)), the geometric mean over the CZ orbit.
std::map<PauliString, double> expected_cb_decays(const NoiseModel& noise, const HardCycle& cycle);

/// 1/2^N + (1 - 1/2^N) lambda^n_cycles.
double predict_fidelity(double lambda_bar, int n_cycles, int n_qubits);
/// Product of lambda_i^n_i. Throws on negative counts or a missing decay for a used cycle.
double effective_lambda(const std::map<std::string, double>& cycle_decays, const std::map<std::string, int>& counts);

}  // namespace rcq
