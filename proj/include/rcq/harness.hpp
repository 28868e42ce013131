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
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rcq/cb.hpp"
#include "rcq/qite.hpp"

/// Experiment runners. Each takes a config section (JSON text, defaults for missing keys), returns
/// its data, and renders deterministic CSV/JSON files.
namespace rcq::harness {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kManifestSchema = 1;

/// Named output file and its exact bytes.
struct OutputFile {
    std::string name;
    std::string content;
};

/// Preset by name unless `noise_config` (a NoiseModel config document) is non-empty.
NoiseModel make_noise(int n_qubits, const std::string& preset, const std::string& noise_config);

/// Mean non-identity diagonal entry of the twirled per-cycle error.
double mean_decay(const NoiseModel& noise, const HardCycle& cycle);

// ---------------------------------------------------------------------------

struct VShapeConfig {
    std::string preset = "coherent-heavy";
    std::string noise;
    std::vector<int> randomizations{1, 2, 4, 8, 16, 20};
    int unitaries = 30;
    /// KAK blocks per circuit (3 CZs each).
    int blocks = 2;
    /// Per measurement setting, split evenly over the randomizations.
    std::uint64_t total_shots = 5000;
    int bins = 10;
    std::uint64_t seed = 1;

    static VShapeConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct VShapeRow {
    int randomizations = 0;
    int unitary = 0;
    PauliString pauli;
    double ideal = 0.0;
    double measured = 0.0;
    double rescaled = 0.0;
};

struct VShapeSummary {
    int randomizations = 0;
    /// Least-squares slope of E_m against E through the origin.
    double slope = 0.0;
    /// Slope of |E_m - E| against |E| relative to the depolarizing V (1 - predicted slope): 0 is flat, 1 a full V.
    double v_fraction = 0.0;
    double mean_error = 0.0;
    double mean_rescaled_error = 0.0;
    /// Mean |E~ - E| per E bin; NaN for empty bins.
    std::vector<double> bin_error;
    std::vector<double> bin_rescaled_error;
    double max_bin_rescaled_error() const;
};

struct VShapeResult {
    VShapeConfig config;
    double lambda_bar = 0.0;
    int n_cz = 0;
    /// lambda_bar^n_cz
    double predicted_slope = 0.0;
    std::vector<VShapeRow> rows;
    std::vector<VShapeSummary> summaries;

    std::vector<OutputFile> files() const;
};

VShapeResult run_vshape(const VShapeConfig& cfg);

// ---------------------------------------------------------------------------

struct DepthSweepConfig {
    std::string preset = "paper-like";
    std::string noise;
    /// Multiples of 3.
    std::vector<int> depths{0, 3, 6, 9, 12, 15, 18, 21, 24, 27, 30};
    int circuits = 10;
    int randomizations = 20;
    /// Per randomization and tomography setting.
    std::uint64_t shots = 1000;
    bool exact = false;
    std::uint64_t seed = 1;

    static DepthSweepConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct DepthRow {
    int depth = 0;
    int circuit = 0;
    double fidelity = 0.0;
    double bloch_length = 0.0;
    double cos_angle = 0.0;
    /// |F - (1/4 + 3/4 L cos eps)| on the reconstructed state.
    double identity_gap = 0.0;
};

struct DepthSummary {
    int depth = 0;
    double fidelity = 0.0;
    double fidelity_std = 0.0;
    double bloch_length = 0.0;
    double cos_angle = 0.0;
    double predicted_fidelity = 0.0;
    double predicted_length = 0.0;
};

struct DepthSweepResult {
    DepthSweepConfig config;
    double lambda_bar = 0.0;
    std::vector<DepthRow> rows;
    std::vector<DepthSummary> summaries;

    std::vector<OutputFile> files() const;
};

DepthSweepResult run_depth_sweep(const DepthSweepConfig& cfg);

// ---------------------------------------------------------------------------

struct CbCycle {
    int n_qubits = 2;
    HardCycle cycle;
};

struct CbRunConfig {
    std::string preset = "paper-like";
    std::string noise;
    /// Isolated pair, then both three-qubit placements with an idle spectator.
    std::vector<CbCycle> cycles{{2, {{{0, 1}}}}, {3, {{{0, 1}}}}, {3, {{{1, 2}}}}};
    CbOptions options;

    static CbRunConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct CbRunResult {
    CbRunConfig config;
    std::vector<CbResult> results;
    std::vector<std::map<PauliString, double>> expected;

    std::vector<OutputFile> files() const;
};

CbRunResult run_cb(const CbRunConfig& cfg);

// ---------------------------------------------------------------------------

/// Measurement and mitigation settings of the five trajectory experiments.
struct QiteExperiment {
    int id = 1;
    MitigationMode mitigation = MitigationMode::None;
    int randomizations = 0;
    std::uint64_t shots = 20000;
};

/// Exp 1..5: none/no RC/20000, none/20x1000, rescale/no RC/20000, rescale/20x1000, McWeeny/20x1000.
std::vector<QiteExperiment> standard_experiments();

struct QiteRunConfig {
    std::string preset = "paper-like";
    std::string noise;
    /// Physics and step settings; the parity is taken from the oracle.
    QiteConfig base;
    std::vector<int> experiments{1, 2, 3, 4, 5};
    int window = 10;
    std::uint64_t seed = 1;

    static QiteRunConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct QiteRunResult {
    QiteRunConfig config;
    std::vector<int> ids;
    std::vector<QiteTrajectory> trajectories;

    std::vector<OutputFile> files() const;
};

QiteRunResult run_qite(const QiteRunConfig& cfg);

// ---------------------------------------------------------------------------

struct PhaseDiagramConfig {
    std::string preset = "paper-like";
    std::string noise;
    QiteConfig base = [] {
        QiteConfig c;
        c.randomizations = 10;
        c.shots = 1024;
        c.mitigation = MitigationMode::RescaleMcWeeny;
        return c;
    }();
    std::vector<double> h_values{0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    int window = 5;
    std::uint64_t seed = 1;

    static PhaseDiagramConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct PhaseLevel {
    double exact_energy = 0.0;
    WindowStats energy;
    double exact_magnetization = 0.0;
    WindowStats magnetization;

    double rel_error() const { return std::abs(energy.mean - exact_energy) / std::abs(exact_energy); }
    double magnetization_error() const { return std::abs(magnetization.mean - exact_magnetization); }
};

struct PhasePoint {
    double h = 0.0;
    PhaseLevel ground;
    PhaseLevel excited;
};

struct PhaseDiagramResult {
    PhaseDiagramConfig config;
    std::vector<PhasePoint> points;

    std::vector<OutputFile> files() const;
};

PhaseDiagramResult run_phase_diagram(const PhaseDiagramConfig& cfg);

// ---------------------------------------------------------------------------

struct VarianceConfig {
    std::string preset = "coherent-heavy";
    std::string noise;
    std::vector<int> m_values{1, 5, 20};
    std::vector<std::uint64_t> n_values{10, 100, 1000};
    int repetitions = 1000;
    /// Exact twirl draws used for E and sigma.
    int sigma_samples = 4000;
    int blocks = 2;
    /// Empty picks the Pauli with the largest twirl spread.
    std::string observable;
    std::uint64_t seed = 1;

    static VarianceConfig from_json(std::string_view text);
    std::string to_json() const;
};

struct VarianceRow {
    int m = 0;
    std::uint64_t n = 0;
    double empirical = 0.0;
    double model = 0.0;
    double ratio() const { return empirical / model; }
};

struct VarianceResult {
    VarianceConfig config;
    PauliString observable;
    double e = 0.0;
    double sigma = 0.0;
    std::vector<VarianceRow> rows;

    std::vector<OutputFile> files() const;
};

VarianceResult run_variance_study(const VarianceConfig& cfg);

// ---------------------------------------------------------------------------

struct RunManifest {
    int schema = kManifestSchema;
    std::string experiment;
    /// Fully resolved config section (every default written out).
    std::string config;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> versions;
    std::vector<std::string> outputs;
    double seconds = 0.0;

    std::string to_json() const;
    static RunManifest from_json(std::string_view text);
};

/// vshape, depth-sweep, cb, qite, phase-diagram, variance.
const std::vector<std::string>& experiment_names();

/// Runs one experiment and writes its files plus manifest.json into `out`.
RunManifest run_experiment(const std::string& name, std::string_view config, const std::filesystem::path& out);

/// Re-runs the experiment recorded in a manifest file.
RunManifest rerun(const std::filesystem::path& manifest, const std::filesystem::path& out);

}  // namespace rcq::harness
