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
#include <vector>

#include "rcq/circuit.hpp"
#include "rcq/pauli.hpp"
#include "rcq/simulator.hpp"

namespace rcq {

/// One uniformly random n-qubit Pauli (identity included) per hard cycle.
std::vector<PauliString> sample_twirls(const Circuit& c, Rng& rng);

/// Compiles twirl T_k after the gates of easy cycle k and its CZ-conjugated correction before the
/// gates of easy cycle k+1. Correction signs are a global phase and are dropped.
Circuit randomize_with(const Circuit& c, const std::vector<PauliString>& twirls);
Circuit randomize(const Circuit& c, Rng& rng);

/// Correction that undoes `twirl` after the CZs of `hard`.
PauliString twirl_correction(const PauliString& twirl, const HardCycle& hard);

struct RcPlan {
    Circuit base;
    int m = 20;
    std::uint64_t shots_per_randomization = 1000;
    std::uint64_t seed = 0;
    /// twirls[k][j] is the Pauli compiled around hard cycle j in randomization k.
    std::vector<std::vector<PauliString>> twirls;

    /// Samples the twirls of randomization k from derive_seed(seed, k).
    static RcPlan make(const Circuit& base, int m, std::uint64_t shots_per_randomization, std::uint64_t seed);
    std::uint64_t total_shots() const { return static_cast<std::uint64_t>(m) * shots_per_randomization; }
    Circuit circuit(int k) const;
    void validate() const;

    std::string to_json() const;
    static RcPlan from_json(std::string_view text);
};

/// Something that executes circuits from |0...0> and measures a Pauli observable.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual int n_qubits() const = 0;
    virtual ShotRecord run(const Circuit& c, const PauliString& observable, std::uint64_t shots, Rng& rng) const = 0;
    /// Infinite-shot expectation.
    virtual double exact(const Circuit& c, const PauliString& observable) const = 0;
};

class SimulatorBackend final : public Backend {
  public:
    explicit SimulatorBackend(NoiseModel noise) : noise_(std::move(noise)) {}
    static SimulatorBackend ideal(int n_qubits) { return SimulatorBackend(NoiseModel(n_qubits)); }

    int n_qubits() const override { return noise_.n_qubits(); }
    ShotRecord run(const Circuit& c, const PauliString& observable, std::uint64_t shots, Rng& rng) const override;
    double exact(const Circuit& c, const PauliString& observable) const override;
    DensityMatrix state(const Circuit& c) const;
    const NoiseModel& noise() const { return noise_; }

  private:
    NoiseModel noise_;
};

struct RcEstimate {
    double mean = 0.0;
    std::vector<double> per_randomization;
};

/// E_RC = (1/M) sum_m E_m. Shots for randomization k use derive_seed(seed, k, 1), so results do
/// not depend on scheduling. With `exact`, each E_m is the infinite-shot value.
RcEstimate rc_estimate(const RcPlan& plan, const PauliString& observable, const Backend& backend, bool exact = false);

struct MeasureOptions {
    /// 0 runs the bare circuit once per setting.
    int randomizations = 0;
    std::uint64_t shots = 1000;
    bool exact = false;
    std::uint64_t seed = 0;
};

/// Estimates each Pauli by pooling every setting in `settings` whose frame covers it, averaged over
/// RC randomizations. Setting s uses RcPlan seed derive_seed(seed, s). Throws std::invalid_argument
/// if some Pauli is covered by no setting.
ExpectationMap measure_paulis(const Circuit& c, const std::vector<PauliString>& paulis,
                              const std::vector<PauliString>& settings, const Backend& backend,
                              const MeasureOptions& options);

/// Average of PTM(T) L PTM(T) over all 4^n Paulis T.
Ptm twirled_ptm(const Ptm& lambda);

/// Full PTM of a (possibly noisy) circuit, n <= 4.
Ptm circuit_ptm(const Circuit& c, const NoiseModel* noise = nullptr);

/// Var[E_RC] = (1/M) ((1 - E)(1 + E) / N + (N - 1) / N * sigma^2).
double rc_variance(double e, double sigma, int m, std::uint64_t n);

}  // namespace rcq
