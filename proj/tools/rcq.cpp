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


#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcq/harness.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Section of the config file for one experiment, with command-line overrides applied.
std::string section(const std::string& name, const std::string& config_path, std::optional<std::uint64_t> seed,
                    const std::string& preset) {
    json j = json::object();
    if (!config_path.empty()) {
        const json file = json::parse(read_file(config_path));
        if (!file.is_object()) throw std::invalid_argument("config file must hold an object of experiment sections");
        if (const auto it = file.find(name); it != file.end()) j = *it;
    }
    if (seed) j["seed"] = *seed;
    if (!preset.empty()) j["preset"] = preset;
    return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized compiling, cycle benchmarking and QITE experiments on a density-matrix simulator"};
    app.set_version_flag("--version", rcq::harness::kVersion);
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, out_dir, preset;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON file with one section per experiment")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (default out/<experiment>)");
    app.add_option("--preset", preset, "noise preset: paper-like, coherent-heavy, literal, ideal");

    for (const auto& name : rcq::harness::experiment_names()) app.add_subcommand(name, "run the " + name + " experiment");
    std::string manifest;
    auto* rerun = app.add_subcommand("rerun", "repeat a run from its manifest.json");
    rerun->add_option("manifest", manifest, "manifest path")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        const fs::path out = out_dir.empty() ? fs::path("out") / name : fs::path(out_dir);
        const rcq::harness::RunManifest m =
            name == "rerun" ? rcq::harness::rerun(manifest, out)
                            : rcq::harness::run_experiment(name, section(name, config_path, seed, preset), out);
        std::cout << m.experiment << ": " << m.outputs.size() << " files in " << out.string() << " (" << m.seconds
                  << " s)\n";
        for (const auto& f : m.outputs) std::cout << "  " << f << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
