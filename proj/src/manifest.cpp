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


#include <chrono>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <Eigen/Core>

#include "json.hpp"
#include "rcq/harness.hpp"

namespace rcq::harness {

using nlohmann::json;

std::string RunManifest::to_json() const {
    json j{{"schema", schema},     {"experiment", experiment}, {"config", json::parse(config)},
           {"seed", seed},         {"versions", versions},     {"outputs", outputs},
           {"seconds", seconds}};
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        RunManifest m;
        m.schema = j.at("schema").get<int>();
        if (m.schema != kManifestSchema) throw std::invalid_argument("unsupported manifest schema " + std::to_string(m.schema));
        m.experiment = j.at("experiment").get<std::string>();
        m.config = j.at("config").dump();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.versions = j.value("versions", std::map<std::string, std::string>{});
        m.outputs = j.value("outputs", std::vector<std::string>{});
        m.seconds = j.value("seconds", 0.0);
        return m;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("manifest: ") + e.what());
    }
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"vshape", "depth-sweep", "cb", "qite", "phase-diagram", "variance"};
    return names;
}

namespace {

struct Resolved {
    std::string config;
    std::uint64_t seed = 0;
    std::function<std::vector<OutputFile>()> run;
};

template <class Config, class Runner>
Resolved resolve(std::string_view text, Runner runner, std::uint64_t Config::*seed) {
    const Config cfg = Config::from_json(text);
    return {cfg.to_json(), cfg.*seed, [cfg, runner] { return runner(cfg).files(); }};
}

Resolved resolve(const std::string& name, std::string_view text) {
    if (name == "vshape") return resolve<VShapeConfig>(text, run_vshape, &VShapeConfig::seed);
    if (name == "depth-sweep") return resolve<DepthSweepConfig>(text, run_depth_sweep, &DepthSweepConfig::seed);
    if (name == "qite") return resolve<QiteRunConfig>(text, run_qite, &QiteRunConfig::seed);
    if (name == "phase-diagram") return resolve<PhaseDiagramConfig>(text, run_phase_diagram, &PhaseDiagramConfig::seed);
    if (name == "variance") return resolve<VarianceConfig>(text, run_variance_study, &VarianceConfig::seed);
    if (name == "cb") {
        const CbRunConfig cfg = CbRunConfig::from_json(text);
        return {cfg.to_json(), cfg.options.seed, [cfg] { return run_cb(cfg).files(); }};
    }
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

RunManifest run_experiment(const std::string& name, std::string_view config, const std::filesystem::path& out) {
    const Resolved r = resolve(name, config);
    const auto start = std::chrono::steady_clock::now();
    const auto files = r.run();
    const auto stop = std::chrono::steady_clock::now();

    std::filesystem::create_directories(out);
    RunManifest m;
    m.experiment = name;
    m.config = r.config;
    m.seed = r.seed;
    m.versions = {{"rcq", kVersion},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    for (const auto& f : files) {
        write_file(out / f.name, f.content);
        m.outputs.push_back(f.name);
    }
    m.seconds = std::chrono::duration<double>(stop - start).count();
    write_file(out / "manifest.json", m.to_json());
    return m;
}

RunManifest rerun(const std::filesystem::path& manifest, const std::filesystem::path& out) {
    std::ifstream f(manifest, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read manifest " + manifest.string());
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const RunManifest m = RunManifest::from_json(text);
    return run_experiment(m.experiment, m.config, out);
}

}  // namespace rcq::harness
