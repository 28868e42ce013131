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

#include <algorithm>
#include <charconv>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rcq/rc.hpp"

namespace rcq::harness {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json parse_section(std::string_view text, const char* what, std::initializer_list<const char*> keys) {
    json j;
    try {
        j = text.empty() ? json::object() : json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string(what) + " config: " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " config must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end())
            throw std::invalid_argument(std::string(what) + " config: unknown key '" + key + "'");
    }
    return j;
}

template <class T>
void read(const json& j, const char* key, T& field) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        field = it->template get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
    }
}

// The noise section may be given inline as an object or as JSON text.
void read_noise(const json& j, std::string& field) {
    const auto it = j.find("noise");
    if (it == j.end() || it->is_null()) return;
    field = it->is_string() ? it->get<std::string>() : it->dump();
}

void write_noise(json& j, const std::string& noise) {
    j["noise"] = noise.empty() ? json(nullptr) : json::parse(noise);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

std::vector<PauliString> non_identity(int n) {
    auto all = all_paulis(n);
    all.erase(all.begin());
    return all;
}

// KAK blocks of Haar-random two-qubit unitaries, back to back.
Circuit random_blocks(int blocks, Rng& rng) {
    Circuit c = kak_decompose(haar_random_unitary(2, rng));
    for (int b = 1; b < blocks; ++b) c = c.then(kak_decompose(haar_random_unitary(2, rng)));
    return c;
}

WindowStats stats(const std::vector<double>& v) {
    WindowStats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

int oracle_parity(const QiteConfig& c) {
    return sector_parity(exact_ground(tfim(c.n_qubits, c.J, c.h)).ground());
}

}  // namespace

NoiseModel make_noise(int n_qubits, const std::string& preset, const std::string& noise_config) {
    if (noise_config.empty()) return NoiseModel::preset(n_qubits, preset);
    NoiseModel m = NoiseModel::from_config(noise_config);
    if (m.n_qubits() != n_qubits)
        throw std::invalid_argument("noise config has " + std::to_string(m.n_qubits()) + " qubits, expected " +
                                    std::to_string(n_qubits));
    return m;
}

double mean_decay(const NoiseModel& noise, const HardCycle& cycle) {
    const RealVector d = cycle_error_ptm(noise, cycle).diagonal();
    return (d.sum() - d[0]) / static_cast<double>(d.size() - 1);
}

// ---------------------------------------------------------------------------
// V shape

VShapeConfig VShapeConfig::from_json(std::string_view text) {
    const json j = parse_section(text, "vshape",
                                 {"preset", "noise", "randomizations", "unitaries", "blocks", "total_shots", "bins", "seed"});
    VShapeConfig c;
    read(j, "preset", c.preset);
    read_noise(j, c.noise);
    read(j, "randomizations", c.randomizations);
    read(j, "unitaries", c.unitaries);
    read(j, "blocks", c.blocks);
    read(j, "total_shots", c.total_shots);
    read(j, "bins", c.bins);
    read(j, "seed", c.seed);
    return c;
}

std::string VShapeConfig::to_json() const {
    json j{{"preset", preset},         {"randomizations", randomizations}, {"unitaries", unitaries},
           {"blocks", blocks},         {"total_shots", total_shots},       {"bins", bins},
           {"seed", seed}};
    write_noise(j, noise);
    return j.dump(2);
}

double VShapeSummary::max_bin_rescaled_error() const {
    double out = 0;
    for (double e : bin_rescaled_error)
        if (!std::isnan(e)) out = std::max(out, e);
    return out;
}

VShapeResult run_vshape(const VShapeConfig& cfg) {
    require(cfg.unitaries >= 1 && cfg.blocks >= 1 && cfg.bins >= 1, "vshape: unitaries, blocks and bins must be >= 1");
    require(!cfg.randomizations.empty(), "vshape: no randomization counts");
    for (int m : cfg.randomizations) {
        require(m >= 1, "vshape: randomization counts must be >= 1");
        require(cfg.total_shots >= static_cast<std::uint64_t>(m), "vshape: fewer shots than randomizations");
    }

    VShapeResult r;
    r.config = cfg;
    const NoiseModel noise = make_noise(2, cfg.preset, cfg.noise);
    const SimulatorBackend backend(noise);
    r.lambda_bar = mean_decay(noise, HardCycle{{{0, 1}}});
    r.n_cz = 3 * cfg.blocks;
    r.predicted_slope = std::pow(r.lambda_bar, r.n_cz);

    const auto paulis = non_identity(2);
    const auto settings = tomography_settings(2);
    std::vector<Circuit> circuits;
    std::vector<ExpectationSet> ideal;
    for (int u = 0; u < cfg.unitaries; ++u) {
        Rng rng = make_rng(derive_seed(cfg.seed, 0, static_cast<std::uint64_t>(u)));
        circuits.push_back(random_blocks(cfg.blocks, rng));
        ideal.push_back(ExpectationSet::from_state(apply_circuit(DensityMatrix::zero_state(2), circuits.back())));
    }

    for (int m : cfg.randomizations) {
        const std::uint64_t shots = cfg.total_shots / static_cast<std::uint64_t>(m);
        std::vector<double> xs, ys, ys_r;
        for (int u = 0; u < cfg.unitaries; ++u) {
            const MeasureOptions opt{m, shots, false,
                                     derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(u))};
            const ExpectationSet measured = ExpectationSet::from_map(2, measure_paulis(circuits[u], paulis, settings, backend, opt));
            const ExpectationSet mitigated = rescale(measured);
            for (const auto& p : paulis) {
                r.rows.push_back({m, u, p, ideal[u].value(p), measured.value(p), mitigated.value(p)});
                xs.push_back(ideal[u].value(p));
                ys.push_back(measured.value(p));
                ys_r.push_back(mitigated.value(p));
            }
        }

        VShapeSummary s;
        s.randomizations = m;
        const std::size_t count = xs.size();
        double sxy = 0, sxx = 0;
        std::vector<double> ax(count), err(count), err_r(count);
        for (std::size_t i = 0; i < count; ++i) {
            sxy += xs[i] * ys[i];
            sxx += xs[i] * xs[i];
            ax[i] = std::abs(xs[i]);
            err[i] = std::abs(ys[i] - xs[i]);
            err_r[i] = std::abs(ys_r[i] - xs[i]);
        }
        s.slope = sxy / sxx;
        const double mx = std::accumulate(ax.begin(), ax.end(), 0.0) / count;
        const double my = std::accumulate(err.begin(), err.end(), 0.0) / count;
        double cov = 0, var = 0;
        for (std::size_t i = 0; i < count; ++i) {
            cov += (ax[i] - mx) * (err[i] - my);
            var += (ax[i] - mx) * (ax[i] - mx);
        }
        s.v_fraction = (cov / var) / (1.0 - r.predicted_slope);
        s.mean_error = my;
        s.mean_rescaled_error = std::accumulate(err_r.begin(), err_r.end(), 0.0) / count;

        std::vector<double> sum(cfg.bins, 0.0), sum_r(cfg.bins, 0.0);
        std::vector<int> hits(cfg.bins, 0);
        for (std::size_t i = 0; i < count; ++i) {
            const int b = std::clamp(static_cast<int>((xs[i] + 1.0) / 2.0 * cfg.bins), 0, cfg.bins - 1);
            sum[b] += err[i];
            sum_r[b] += err_r[i];
            ++hits[b];
        }
        for (int b = 0; b < cfg.bins; ++b) {
            s.bin_error.push_back(hits[b] ? sum[b] / hits[b] : kNaN);
            s.bin_rescaled_error.push_back(hits[b] ? sum_r[b] / hits[b] : kNaN);
        }
        r.summaries.push_back(std::move(s));
    }
    return r;
}

std::vector<OutputFile> VShapeResult::files() const {
    std::ostringstream rows_csv, summary_csv, bins_csv;
    rows_csv << "randomizations,unitary,pauli,ideal,measured,rescaled\n";
    for (const auto& row : rows)
        rows_csv << row.randomizations << ',' << row.unitary << ',' << row.pauli.str() << ',' << num(row.ideal) << ','
                 << num(row.measured) << ',' << num(row.rescaled) << '\n';
    summary_csv << "randomizations,slope,predicted_slope,v_fraction,mean_error,mean_rescaled_error,max_bin_rescaled_error\n";
    bins_csv << "randomizations,bin,lo,hi,error,rescaled_error\n";
    for (const auto& s : summaries) {
        summary_csv << s.randomizations << ',' << num(s.slope) << ',' << num(predicted_slope) << ',' << num(s.v_fraction)
                    << ',' << num(s.mean_error) << ',' << num(s.mean_rescaled_error) << ','
                    << num(s.max_bin_rescaled_error()) << '\n';
        const int bins = static_cast<int>(s.bin_error.size());
        for (int b = 0; b < bins; ++b)
            bins_csv << s.randomizations << ',' << b << ',' << num(-1.0 + 2.0 * b / bins) << ','
                     << num(-1.0 + 2.0 * (b + 1) / bins) << ',' << num(s.bin_error[b]) << ','
                     << num(s.bin_rescaled_error[b]) << '\n';
    }
    json j{{"lambda_bar", lambda_bar}, {"n_cz", n_cz}, {"predicted_slope", predicted_slope}};
    return {{"vshape_points.csv", rows_csv.str()},
            {"vshape_summary.csv", summary_csv.str()},
            {"vshape_bins.csv", bins_csv.str()},
            {"vshape.json", j.dump(2) + "\n"}};
}

// ---------------------------------------------------------------------------
// Depth sweep

DepthSweepConfig DepthSweepConfig::from_json(std::string_view text) {
    const json j = parse_section(text, "depth-sweep",
                                 {"preset", "noise", "depths", "circuits", "randomizations", "shots", "exact", "seed"});
    DepthSweepConfig c;
    read(j, "preset", c.preset);
    read_noise(j, c.noise);
    read(j, "depths", c.depths);
    read(j, "circuits", c.circuits);
    read(j, "randomizations", c.randomizations);
    read(j, "shots", c.shots);
    read(j, "exact", c.exact);
    read(j, "seed", c.seed);
    return c;
}

std::string DepthSweepConfig::to_json() const {
    json j{{"preset", preset}, {"depths", depths}, {"circuits", circuits}, {"randomizations", randomizations},
           {"shots", shots},   {"exact", exact},   {"seed", seed}};
    write_noise(j, noise);
    return j.dump(2);
}

DepthSweepResult run_depth_sweep(const DepthSweepConfig& cfg) {
    require(cfg.circuits >= 1, "depth-sweep: circuits must be >= 1");
    require(cfg.randomizations >= 0, "depth-sweep: randomizations must be >= 0");
    for (int d : cfg.depths) require(d >= 0 && d % 3 == 0, "depth-sweep: depths must be non-negative multiples of 3");

    DepthSweepResult r;
    r.config = cfg;
    const NoiseModel noise = make_noise(2, cfg.preset, cfg.noise);
    const SimulatorBackend backend(noise);
    r.lambda_bar = mean_decay(noise, HardCycle{{{0, 1}}});
    const auto paulis = non_identity(2);
    const auto settings = tomography_settings(2);

    for (int d : cfg.depths) {
        std::vector<double> f, len, cosv;
        for (int i = 0; i < cfg.circuits; ++i) {
            Rng rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i)));
            Circuit c(2);
            if (d == 0) {
                const Mat2 a = haar_random_unitary(1, rng);
                const Mat2 b = haar_random_unitary(1, rng);
                c.apply_after(0, {a, b});
            } else {
                c = random_blocks(d / 3, rng);
            }
            const DensityMatrix sigma = apply_circuit(DensityMatrix::zero_state(2), c);
            const MeasureOptions opt{cfg.randomizations, cfg.shots, cfg.exact, derive_seed(cfg.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(i), 1)};
            const DensityMatrix rho = tomography(measure_paulis(c, paulis, settings, backend, opt), 2);

            DepthRow row;
            row.depth = d;
            row.circuit = i;
            row.fidelity = fidelity(rho, sigma);
            const ExpectationSet er = ExpectationSet::from_state(rho);
            row.bloch_length = bloch_length(er);
            row.cos_angle = angle_error(er, ExpectationSet::from_state(sigma), 0.0);
            row.identity_gap = std::abs(row.fidelity - (0.25 + 0.75 * row.bloch_length * row.cos_angle));
            f.push_back(row.fidelity);
            len.push_back(row.bloch_length);
            cosv.push_back(row.cos_angle);
            r.rows.push_back(row);
        }
        const WindowStats fs = stats(f);
        r.summaries.push_back({d, fs.mean, fs.stddev, stats(len).mean, stats(cosv).mean,
                               predict_fidelity(r.lambda_bar, d, 2), std::pow(r.lambda_bar, d)});
    }
    return r;
}

std::vector<OutputFile> DepthSweepResult::files() const {
    std::ostringstream rows_csv, summary_csv;
    rows_csv << "depth,circuit,fidelity,bloch_length,cos_angle,identity_gap\n";
    for (const auto& row : rows)
        rows_csv << row.depth << ',' << row.circuit << ',' << num(row.fidelity) << ',' << num(row.bloch_length) << ','
                 << num(row.cos_angle) << ',' << num(row.identity_gap) << '\n';
    summary_csv << "depth,fidelity,fidelity_std,bloch_length,cos_angle,predicted_fidelity,predicted_length\n";
    for (const auto& s : summaries)
        summary_csv << s.depth << ',' << num(s.fidelity) << ',' << num(s.fidelity_std) << ',' << num(s.bloch_length)
                    << ',' << num(s.cos_angle) << ',' << num(s.predicted_fidelity) << ',' << num(s.predicted_length)
                    << '\n';
    json j{{"lambda_bar", lambda_bar}};
    return {{"depth_points.csv", rows_csv.str()},
            {"depth_summary.csv", summary_csv.str()},
            {"depth.json", j.dump(2) + "\n"}};
}

// ---------------------------------------------------------------------------
// Cycle benchmarking

CbRunConfig CbRunConfig::from_json(std::string_view text) {
    const json j = parse_section(text, "cb",
                                 {"preset", "noise", "cycles", "lengths", "n_random", "shots", "seed", "sample_paulis", "exact"});
    CbRunConfig c;
    read(j, "preset", c.preset);
    read_noise(j, c.noise);
    if (const auto it = j.find("cycles"); it != j.end()) {
        require(it->is_array(), "cb config: cycles must be an array");
        c.cycles.clear();
        for (const auto& e : *it) {
            CbCycle cy;
            read(e, "n_qubits", cy.n_qubits);
            std::vector<std::pair<int, int>> pairs;
            read(e, "cz", pairs);
            for (auto [a, b] : pairs) cy.cycle.cz.push_back({a, b});
            c.cycles.push_back(std::move(cy));
        }
    }
    read(j, "lengths", c.options.lengths);
    read(j, "n_random", c.options.n_random);
    read(j, "shots", c.options.shots);
    read(j, "seed", c.options.seed);
    read(j, "sample_paulis", c.options.sample_paulis);
    read(j, "exact", c.options.exact);
    return c;
}

std::string CbRunConfig::to_json() const {
    json cy = json::array();
    for (const auto& c : cycles) {
        json pairs = json::array();
        for (const auto& p : c.cycle.cz) pairs.push_back({p.a, p.b});
        cy.push_back({{"n_qubits", c.n_qubits}, {"cz", pairs}});
    }
    json j{{"preset", preset},         {"cycles", cy},           {"lengths", options.lengths},
           {"n_random", options.n_random}, {"shots", options.shots}, {"seed", options.seed},
           {"sample_paulis", options.sample_paulis}, {"exact", options.exact}};
    write_noise(j, noise);
    return j.dump(2);
}

CbRunResult run_cb(const CbRunConfig& cfg) {
    require(!cfg.cycles.empty(), "cb: no cycles");
    CbRunResult r;
    r.config = cfg;
    for (std::size_t i = 0; i < cfg.cycles.size(); ++i) {
        const auto& cy = cfg.cycles[i];
        const NoiseModel noise = make_noise(cy.n_qubits, cfg.preset, cfg.noise);
        const SimulatorBackend backend(noise);
        CbOptions opt = cfg.options;
        opt.seed = derive_seed(cfg.options.seed, i);
        r.results.push_back(rcq::run_cb(backend, cy.cycle, opt));
        r.expected.push_back(expected_cb_decays(noise, cy.cycle));
    }
    return r;
}

std::vector<OutputFile> CbRunResult::files() const {
    std::vector<OutputFile> out;
    std::ostringstream decays;
    decays << "cycle,n_qubits,pauli,lambda,expected,std_error\n";
    json summary = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& res = results[i];
        std::ostringstream raw;
        res.write_csv(raw);
        out.push_back({"cb_" + std::to_string(i) + ".csv", raw.str()});
        double max_dev = 0;
        for (const auto& [p, lambda] : res.decays) {
            const double expect = expected[i].at(p);
            max_dev = std::max(max_dev, std::abs(lambda - expect));
            decays << i << ',' << res.n_qubits << ',' << p.str() << ',' << num(lambda) << ',' << num(expect) << ','
                   << num(res.fits.at(p).std_error) << '\n';
        }
        json s = json::parse(res.summary_json());
        s["index"] = i;
        s["max_abs_deviation"] = max_dev;
        summary.push_back(s);
    }
    out.push_back({"cb_decays.csv", decays.str()});
    out.push_back({"cb_summary.json", summary.dump(2) + "\n"});
    return out;
}

// ---------------------------------------------------------------------------
// QITE trajectories

std::vector<QiteExperiment> standard_experiments() {
    return {{1, MitigationMode::None, 0, 20000},
            {2, MitigationMode::None, 20, 1000},
            {3, MitigationMode::Rescale, 0, 20000},
            {4, MitigationMode::Rescale, 20, 1000},
            {5, MitigationMode::RescaleMcWeeny, 20, 1000}};
}

QiteRunConfig QiteRunConfig::from_json(std::string_view text) {
    const json j = parse_section(text, "qite", {"preset", "noise", "qite", "experiments", "window", "seed"});
    QiteRunConfig c;
    read(j, "preset", c.preset);
    read_noise(j, c.noise);
    if (const auto it = j.find("qite"); it != j.end()) c.base = QiteConfig::from_json(it->dump());
    read(j, "experiments", c.experiments);
    read(j, "window", c.window);
    read(j, "seed", c.seed);
    return c;
}

std::string QiteRunConfig::to_json() const {
    json j{{"preset", preset}, {"qite", json::parse(base.to_json())}, {"experiments", experiments},
           {"window", window}, {"seed", seed}};
    write_noise(j, noise);
    return j.dump(2);
}

QiteRunResult run_qite(const QiteRunConfig& cfg) {
    require(cfg.window >= 1, "qite: window must be >= 1");
    const auto standard = standard_experiments();
    QiteRunResult r;
    r.config = cfg;
    const NoiseModel noise = make_noise(cfg.base.n_qubits, cfg.preset, cfg.noise);
    const SimulatorBackend backend(noise);
    const int parity = oracle_parity(cfg.base);
    for (int id : cfg.experiments) {
        const auto it = std::find_if(standard.begin(), standard.end(), [&](const auto& e) { return e.id == id; });
        require(it != standard.end(), "qite: unknown experiment " + std::to_string(id));
        QiteConfig c = cfg.base;
        c.mitigation = it->mitigation;
        c.randomizations = it->randomizations;
        c.shots = it->shots;
        c.parity = parity;
        c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(id));
        r.ids.push_back(id);
        r.trajectories.push_back(qite_run(c, backend));
    }
    return r;
}

std::vector<OutputFile> QiteRunResult::files() const {
    std::vector<OutputFile> out;
    std::ostringstream summary;
    summary << "experiment,mitigation,randomizations,shots,rel_error_mean,rel_error_std,infidelity_mean,infidelity_std\n";
    json all = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& t = trajectories[i];
        std::ostringstream csv;
        t.write_csv(csv);
        out.push_back({"qite_exp" + std::to_string(ids[i]) + ".csv", csv.str()});
        const WindowStats rel = t.rel_error(config.window);
        const WindowStats inf = t.infidelity(config.window);
        summary << ids[i] << ',' << to_string(t.config.mitigation) << ',' << t.config.randomizations << ','
                << t.config.shots << ',' << num(rel.mean) << ',' << num(rel.stddev) << ',' << num(inf.mean) << ','
                << num(inf.stddev) << '\n';
        json tj = json::parse(t.to_json());
        tj["experiment"] = ids[i];
        all.push_back(tj);
    }
    out.push_back({"qite_summary.csv", summary.str()});
    out.push_back({"qite_trajectories.json", all.dump(2) + "\n"});
    return out;
}

// ---------------------------------------------------------------------------
// Phase diagram

PhaseDiagramConfig PhaseDiagramConfig::from_json(std::string_view text) {
    const json j = parse_section(text, "phase-diagram", {"preset", "noise", "qite", "h_values", "window", "seed"});
    PhaseDiagramConfig c;
    read(j, "preset", c.preset);
    read_noise(j, c.noise);
    if (const auto it = j.find("qite"); it != j.end()) {
        // Missing keys keep the phase-diagram defaults rather than the plain QITE ones.
        json merged = json::parse(c.base.to_json());
        merged.merge_patch(*it);
        c.base = QiteConfig::from_json(merged.dump());
    }
    read(j, "h_values", c.h_values);
    read(j, "window", c.window);
    read(j, "seed", c.seed);
    return c;
}

std::string PhaseDiagramConfig::to_json() const {
    json j{{"preset", preset}, {"qite", json::parse(base.to_json())}, {"h_values", h_values},
           {"window", window}, {"seed", seed}};
    write_noise(j, noise);
    return j.dump(2);
}

PhaseDiagramResult run_phase_diagram(const PhaseDiagramConfig& cfg) {
    require(cfg.window >= 1, "phase-diagram: window must be >= 1");
    require(!cfg.h_values.empty(), "phase-diagram: no field values");
    PhaseDiagramResult r;
    r.config = cfg;
    const NoiseModel noise = make_noise(cfg.base.n_qubits, cfg.preset, cfg.noise);
    const SimulatorBackend backend(noise);
    for (std::size_t i = 0; i < cfg.h_values.size(); ++i) {
        QiteConfig c = cfg.base;
        c.h = cfg.h_values[i];
        const Hamiltonian ham = tfim(c.n_qubits, c.J, c.h);
        const Spectrum spec = exact_ground(ham);
        c.parity = sector_parity(spec.ground());
        const Eigenpair excited = lowest_in_sector(ham, -c.parity);

        auto level = [&](const QiteTrajectory& t, double energy, const Vector& state) {
            PhaseLevel l;
            l.exact_energy = energy;
            l.energy = t.energy(cfg.window);
            l.exact_magnetization = magnetization(ExpectationSet::from_state(DensityMatrix::from_pure(state)));
            l.magnetization = t.magnetization(cfg.window);
            return l;
        };
        PhasePoint p;
        p.h = c.h;
        c.seed = derive_seed(cfg.seed, i, 0);
        p.ground = level(qite_run(c, backend), spec.e0(), spec.ground());
        c.seed = derive_seed(cfg.seed, i, 1);
        p.excited = level(excited_run(c, backend), excited.energy, excited.state);
        r.points.push_back(p);
    }
    return r;
}

std::vector<OutputFile> PhaseDiagramResult::files() const {
    std::ostringstream csv;
    csv << "h,level,exact_energy,energy_mean,energy_std,rel_error,exact_magnetization,magnetization_mean,"
           "magnetization_std,magnetization_error\n";
    for (const auto& p : points) {
        for (const auto& [name, l] : {std::pair{"ground", &p.ground}, std::pair{"excited", &p.excited}}) {
            csv << num(p.h) << ',' << name << ',' << num(l->exact_energy) << ',' << num(l->energy.mean) << ','
                << num(l->energy.stddev) << ',' << num(l->rel_error()) << ',' << num(l->exact_magnetization) << ','
                << num(l->magnetization.mean) << ',' << num(l->magnetization.stddev) << ','
                << num(l->magnetization_error()) << '\n';
        }
    }
    return {{"phase_diagram.csv", csv.str()}};
}

// ---------------------------------------------------------------------------
// RC variance

VarianceConfig VarianceConfig::from_json(std::string_view text) {
    const json j = parse_section(text, "variance", {"preset", "noise", "m_values", "n_values", "repetitions",
                                                    "sigma_samples", "blocks", "observable", "seed"});
    VarianceConfig c;
    read(j, "preset", c.preset);
    read_noise(j, c.noise);
    read(j, "m_values", c.m_values);
    read(j, "n_values", c.n_values);
    read(j, "repetitions", c.repetitions);
    read(j, "sigma_samples", c.sigma_samples);
    read(j, "blocks", c.blocks);
    read(j, "observable", c.observable);
    read(j, "seed", c.seed);
    return c;
}

std::string VarianceConfig::to_json() const {
    json j{{"preset", preset},           {"m_values", m_values}, {"n_values", n_values},
           {"repetitions", repetitions}, {"sigma_samples", sigma_samples}, {"blocks", blocks},
           {"observable", observable},   {"seed", seed}};
    write_noise(j, noise);
    return j.dump(2);
}

VarianceResult run_variance_study(const VarianceConfig& cfg) {
    require(cfg.repetitions >= 2 && cfg.sigma_samples >= 2, "variance: repetitions and sigma_samples must be >= 2");
    require(cfg.blocks >= 1, "variance: blocks must be >= 1");
    for (int m : cfg.m_values) require(m >= 1, "variance: M values must be >= 1");
    for (auto n : cfg.n_values) require(n >= 1, "variance: N values must be >= 1");

    VarianceResult r;
    r.config = cfg;
    const NoiseModel noise = make_noise(2, cfg.preset, cfg.noise);
    const SimulatorBackend backend(noise);
    Rng rng = make_rng(derive_seed(cfg.seed, 0));
    const Circuit c = random_blocks(cfg.blocks, rng);

    std::vector<PauliString> candidates;
    if (cfg.observable.empty()) {
        candidates = non_identity(2);
    } else {
        const PauliString p = PauliString::parse(cfg.observable);
        require(p.n_qubits() == 2 && !p.is_identity() && p.phase() == 0, "variance: observable must be an unsigned two-qubit Pauli");
        candidates = {p};
    }

    // Infinite-shot value of every candidate for each twirl draw.
    const auto samples = static_cast<std::size_t>(cfg.sigma_samples);
    std::vector<std::vector<double>> values(samples);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < cfg.sigma_samples; ++k) {
        try {
            Rng tr = make_rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(k)));
            const DensityMatrix rho = backend.state(randomize(c, tr));
            for (const auto& p : candidates) values[static_cast<std::size_t>(k)].push_back(expectation(rho, p));
        } catch (...) {
#pragma omp critical(variance_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    double best = -1;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        std::vector<double> v(samples);
        for (std::size_t k = 0; k < samples; ++k) v[k] = values[k][j];
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(samples);
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sigma = std::sqrt(ss / static_cast<double>(samples));
        if (sigma > best) {
            best = sigma;
            r.observable = candidates[j];
            r.e = mean;
            r.sigma = sigma;
        }
    }

    for (int m : cfg.m_values)
        for (auto n : cfg.n_values) {
            std::vector<double> est(static_cast<std::size_t>(cfg.repetitions));
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                const RcPlan plan = RcPlan::make(c, m, n, derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(m), n,
                                                                       static_cast<std::uint64_t>(rep)));
                est[static_cast<std::size_t>(rep)] = rc_estimate(plan, r.observable, backend).mean;
            }
            const WindowStats s = stats(est);
            r.rows.push_back({m, n, s.stddev * s.stddev, rc_variance(r.e, r.sigma, m, n)});
        }
    return r;
}

std::vector<OutputFile> VarianceResult::files() const {
    std::ostringstream csv;
    csv << "m,n,empirical,model,ratio,plateau\n";
    for (const auto& row : rows)
        csv << row.m << ',' << row.n << ',' << num(row.empirical) << ',' << num(row.model) << ',' << num(row.ratio())
            << ',' << num(sigma * sigma / row.m) << '\n';
    json j{{"observable", observable.str()}, {"e", e}, {"sigma", sigma}};
    return {{"variance.csv", csv.str()}, {"variance.json", j.dump(2) + "\n"}};
}

}  // namespace rcq::harness
