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


#include "rcq/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

using namespace rcq;
using namespace rcq::harness;

namespace {

// Uniform two-qubit Pauli channel of total weight p after every cz(0,1).
NoiseModel depolarizing(double p) {
    PauliChannel ch{2, {}};
    for (const auto& q : all_paulis(2))
        if (!q.is_identity()) ch.terms.push_back({q, p / 15.0});
    NoiseModel m(2);
    m.set("cz(0,1)", CycleNoise{{}, {ch}});
    return m;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rcq_harness_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

const char* kSmallCb = R"({"cycles":[{"n_qubits":2,"cz":[[0,1]]}],"lengths":[4,8],"n_random":3,"shots":50,"seed":7})";

}  // namespace

TEST(harness_noise, preset_or_config) {
    EXPECT_EQ(make_noise(3, "paper-like", "").n_qubits(), 3);
    const NoiseModel m = make_noise(2, "ignored", depolarizing(0.03).to_config());
    EXPECT_NEAR(mean_decay(m, HardCycle{{{0, 1}}}), 1.0 - 16.0 * 0.03 / 15.0, 1e-12);
    EXPECT_THROW(make_noise(3, "paper-like", depolarizing(0.03).to_config()), std::invalid_argument);
    EXPECT_NEAR(mean_decay(make_noise(2, "ideal", ""), HardCycle{{{0, 1}}}), 1.0, 1e-12);
}

TEST(harness_config, round_trips_and_rejects_unknown_keys) {
    const VShapeConfig v = VShapeConfig::from_json(R"({"unitaries":4,"randomizations":[1,3]})");
    EXPECT_EQ(v.unitaries, 4);
    EXPECT_EQ(VShapeConfig::from_json(v.to_json()).to_json(), v.to_json());
    EXPECT_EQ(DepthSweepConfig::from_json(DepthSweepConfig{}.to_json()).to_json(), DepthSweepConfig{}.to_json());
    EXPECT_EQ(CbRunConfig::from_json(CbRunConfig{}.to_json()).to_json(), CbRunConfig{}.to_json());
    EXPECT_EQ(QiteRunConfig::from_json(QiteRunConfig{}.to_json()).to_json(), QiteRunConfig{}.to_json());
    EXPECT_EQ(VarianceConfig::from_json(VarianceConfig{}.to_json()).to_json(), VarianceConfig{}.to_json());
    EXPECT_EQ(PhaseDiagramConfig::from_json("").to_json(), PhaseDiagramConfig{}.to_json());

    EXPECT_THROW(VShapeConfig::from_json(R"({"unitary":4})"), std::invalid_argument);
    EXPECT_THROW(VShapeConfig::from_json(R"({"unitaries":"four"})"), std::invalid_argument);
    EXPECT_THROW(CbRunConfig::from_json("[1,2]"), std::invalid_argument);
    EXPECT_THROW(QiteRunConfig::from_json("{"), std::invalid_argument);
}

TEST(harness_config, inline_noise_object) {
    const std::string noise = depolarizing(0.02).to_config();
    const auto c = DepthSweepConfig::from_json(R"({"noise":)" + noise + "}");
    EXPECT_EQ(nlohmann::json::parse(c.noise), nlohmann::json::parse(noise));
    EXPECT_EQ(DepthSweepConfig::from_json(c.to_json()).noise, c.noise);
}

TEST(harness_config, phase_diagram_keeps_its_defaults) {
    const auto c = PhaseDiagramConfig::from_json(R"({"qite":{"n_steps":5}})");
    EXPECT_EQ(c.base.n_steps, 5);
    EXPECT_EQ(c.base.randomizations, 10);
    EXPECT_EQ(c.base.shots, 1024u);
    EXPECT_EQ(c.base.mitigation, MitigationMode::RescaleMcWeeny);
}

TEST(vshape, small_run_shapes) {
    VShapeConfig c;
    c.unitaries = 3;
    c.randomizations = {1, 4};
    c.total_shots = 400;
    c.bins = 4;
    const auto r = run_vshape(c);
    EXPECT_EQ(r.n_cz, 6);
    EXPECT_NEAR(r.predicted_slope, std::pow(r.lambda_bar, 6), 1e-15);
    ASSERT_EQ(r.rows.size(), 2u * 3u * 15u);
    ASSERT_EQ(r.summaries.size(), 2u);
    for (const auto& s : r.summaries) EXPECT_EQ(s.bin_error.size(), 4u);

    // Ideal values of each unitary form a pure two-qubit Bloch vector.
    for (int u = 0; u < 3; ++u) {
        double ss = 0;
        for (const auto& row : r.rows)
            if (row.randomizations == 1 && row.unitary == u) ss += row.ideal * row.ideal;
        EXPECT_NEAR(ss, 3.0, 1e-9);
    }
    const auto files = r.files();
    EXPECT_EQ(files.size(), 4u);
    EXPECT_EQ(files[0].content.substr(0, files[0].content.find('\n')), "randomizations,unitary,pauli,ideal,measured,rescaled");
}

TEST(vshape, noiseless_slope_is_one) {
    VShapeConfig c;
    c.preset = "ideal";
    c.unitaries = 4;
    c.randomizations = {2};
    c.total_shots = 200000;
    const auto r = run_vshape(c);
    EXPECT_DOUBLE_EQ(r.predicted_slope, 1.0);
    EXPECT_NEAR(r.summaries[0].slope, 1.0, 0.01);
    EXPECT_LT(r.summaries[0].mean_error, 0.01);
}

TEST(vshape, rejects_bad_grids) {
    VShapeConfig c;
    c.randomizations = {0};
    EXPECT_THROW(run_vshape(c), std::invalid_argument);
    c.randomizations = {8};
    c.total_shots = 4;
    EXPECT_THROW(run_vshape(c), std::invalid_argument);
}

TEST(depth_sweep, depolarizing_matches_prediction_exactly) {
    DepthSweepConfig c;
    c.noise = depolarizing(0.03).to_config();
    c.depths = {0, 3, 9};
    c.circuits = 2;
    c.randomizations = 2;
    c.exact = true;
    const auto r = run_depth_sweep(c);
    const double lambda = 1.0 - 16.0 * 0.03 / 15.0;
    EXPECT_NEAR(r.lambda_bar, lambda, 1e-12);
    for (const auto& row : r.rows) {
        const double ld = std::pow(lambda, row.depth);
        EXPECT_NEAR(row.fidelity, 0.25 + 0.75 * ld, 1e-9);
        EXPECT_NEAR(row.bloch_length, ld, 1e-9);
        EXPECT_NEAR(row.cos_angle, 1.0, 1e-9);
        EXPECT_LT(row.identity_gap, 1e-9);
    }
    EXPECT_NEAR(r.summaries[0].fidelity, 1.0, 1e-9);
    EXPECT_NEAR(r.summaries[2].predicted_fidelity, 0.25 + 0.75 * std::pow(lambda, 9), 1e-12);
}

TEST(depth_sweep, rejects_bad_depths) {
    DepthSweepConfig c;
    c.depths = {4};
    EXPECT_THROW(run_depth_sweep(c), std::invalid_argument);
    c.depths = {-3};
    EXPECT_THROW(run_depth_sweep(c), std::invalid_argument);
}

TEST(cb_runner, decay_counts_and_files) {
    CbRunConfig c = CbRunConfig::from_json(
        R"({"lengths":[4,8],"n_random":2,"exact":true,"seed":3})");
    const auto r = run_cb(c);
    ASSERT_EQ(r.results.size(), 3u);
    EXPECT_EQ(r.results[0].decays.size() + r.results[0].failed.size(), 15u);
    EXPECT_EQ(r.results[1].decays.size() + r.results[1].failed.size(), 63u);
    EXPECT_EQ(r.results[2].decays.size() + r.results[2].failed.size(), 63u);
    EXPECT_EQ(r.expected[1].size(), 63u);
    const auto files = r.files();
    ASSERT_EQ(files.size(), 5u);
    EXPECT_EQ(files[3].name, "cb_decays.csv");
    const auto summary = nlohmann::json::parse(files[4].content);
    EXPECT_EQ(summary.size(), 3u);
}

TEST(qite_runner, experiment_table) {
    const auto e = standard_experiments();
    ASSERT_EQ(e.size(), 5u);
    EXPECT_EQ(e[0].randomizations, 0);
    EXPECT_EQ(e[0].shots, 20000u);
    EXPECT_EQ(e[3].mitigation, MitigationMode::Rescale);
    EXPECT_EQ(e[3].randomizations * e[3].shots, 20000u);
    EXPECT_EQ(e[4].mitigation, MitigationMode::RescaleMcWeeny);
}

TEST(qite_runner, small_run) {
    QiteRunConfig c = QiteRunConfig::from_json(
        R"({"qite":{"n_qubits":2,"n_steps":4},"experiments":[1,4],"window":3,"seed":5})");
    const auto r = run_qite(c);
    ASSERT_EQ(r.trajectories.size(), 2u);
    EXPECT_EQ(r.ids, (std::vector<int>{1, 4}));
    EXPECT_EQ(r.trajectories[1].config.randomizations, 20);
    EXPECT_EQ(r.trajectories[1].steps.size(), 5u);
    EXPECT_EQ(r.files().size(), 4u);

    c.experiments = {6};
    EXPECT_THROW(run_qite(c), std::invalid_argument);
}

TEST(phase_diagram, noiseless_two_qubit_point) {
    PhaseDiagramConfig c = PhaseDiagramConfig::from_json(
        R"({"preset":"ideal","qite":{"n_qubits":2,"n_steps":30,"exact":true,"randomizations":0,"mitigation":"none","ridge":1e-8},"h_values":[0.5,1.5],"window":3})");
    const auto r = run_phase_diagram(c);
    ASSERT_EQ(r.points.size(), 2u);
    for (const auto& p : r.points) {
        EXPECT_LT(p.ground.rel_error(), 1e-3);
        EXPECT_LT(p.excited.rel_error(), 1e-3);
        EXPECT_LT(p.ground.magnetization_error(), 1e-2);
        EXPECT_LT(p.excited.magnetization_error(), 1e-2);
        EXPECT_LT(p.ground.exact_energy, p.excited.exact_energy);
    }
    // Open chain of two sites: E0 = -sqrt(J^2 + 4h^2).
    EXPECT_NEAR(r.points[0].ground.exact_energy, -std::sqrt(1.0 + 4 * 0.25), 1e-10);
}

TEST(variance_runner, small_grid) {
    VarianceConfig c;
    c.m_values = {1, 3};
    c.n_values = {10};
    c.repetitions = 40;
    c.sigma_samples = 40;
    c.observable = "ZZ";
    const auto r = run_variance_study(c);
    EXPECT_EQ(r.observable.str(), "ZZ");
    ASSERT_EQ(r.rows.size(), 2u);
    for (const auto& row : r.rows) EXPECT_NEAR(row.model, rc_variance(r.e, r.sigma, row.m, row.n), 1e-15);

    c.observable = "XYZ";
    EXPECT_THROW(run_variance_study(c), std::invalid_argument);
    c.observable = "-XY";
    EXPECT_THROW(run_variance_study(c), std::invalid_argument);
}

TEST(variance_runner, picks_largest_spread) {
    VarianceConfig c;
    c.m_values = {1};
    c.n_values = {10};
    c.repetitions = 2;
    c.sigma_samples = 60;
    const auto best = run_variance_study(c);
    for (const char* p : {"XI", "ZZ", "YX"}) {
        c.observable = p;
        EXPECT_LE(run_variance_study(c).sigma, best.sigma + 1e-15);
    }
}

TEST(manifest, rerun_reproduces_bytes) {
    const auto a = scratch("a");
    const auto b = scratch("b");
    const RunManifest m = run_experiment("cb", kSmallCb, a);
    EXPECT_EQ(m.seed, 7u);
    EXPECT_EQ(m.versions.at("rcq"), kVersion);
    ASSERT_TRUE(std::filesystem::exists(a / "manifest.json"));
    for (const auto& f : m.outputs) EXPECT_TRUE(std::filesystem::exists(a / f)) << f;

    const RunManifest again = rerun(a / "manifest.json", b);
    EXPECT_EQ(again.outputs, m.outputs);
    EXPECT_EQ(again.config, m.config);
    for (const auto& f : m.outputs) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

    const RunManifest parsed = RunManifest::from_json(slurp(a / "manifest.json"));
    EXPECT_EQ(parsed.experiment, "cb");
    EXPECT_EQ(nlohmann::json::parse(parsed.config), nlohmann::json::parse(m.config));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(manifest, errors) {
    EXPECT_THROW(run_experiment("fig9", "{}", scratch("c")), std::invalid_argument);
    EXPECT_THROW(RunManifest::from_json(R"({"schema":99,"experiment":"cb","config":{},"seed":1})"), std::invalid_argument);
    EXPECT_THROW(RunManifest::from_json(R"({"schema":1})"), std::invalid_argument);
    EXPECT_THROW(rerun(scratch("missing") / "manifest.json", scratch("d")), std::invalid_argument);
    EXPECT_EQ(experiment_names().size(), 6u);
}
