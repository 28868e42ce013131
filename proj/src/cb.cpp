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

#include "rcq/cb.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace rcq {

CbSequence make_cb_sequence(const HardCycle& cycle, int n_qubits, const PauliString& p, int length, Rng& rng) {
    if (length <= 0 || length % 4 != 0) throw std::invalid_argument("CB lengths must be positive multiples of 4");
    if (p.n_qubits() != n_qubits) throw std::invalid_argument("CB Pauli width mismatch");
    if (p.is_identity()) throw std::invalid_argument("CB needs a non-identity Pauli");

    std::uniform_int_distribution<std::uint32_t> pick(0, (1u << (2 * n_qubits)) - 1);
    std::vector<EasyCycle> easy;
    easy.reserve(static_cast<std::size_t>(length) + 1);
    PauliString frame = p.unsigned_part();
    for (int j = 0; j < length; ++j) {
        const auto t = PauliString::from_index(n_qubits, pick(rng));
        std::vector<Mat2> gates;
        for (int q = 0; q < n_qubits; ++q) {
            Mat2 g = letter_matrix(t.letter(q));
            if (j == 0) g = g * preparation_rotation(p.letter(q));
            gates.push_back(g);
        }
        easy.push_back(EasyCycle::from_matrices(gates));
        if (!commutes(t, frame)) frame = frame.negated();
        for (const auto& cz : cycle.cz) frame = conjugate_through(frame, CliffordGate::cz(cz.a, cz.b));
    }
    std::vector<Mat2> last;
    for (int q = 0; q < n_qubits; ++q) last.push_back(measurement_rotation(frame.letter(q)));
    easy.push_back(EasyCycle::from_matrices(last));

    CbSequence seq;
    seq.circuit = Circuit(n_qubits, std::move(easy), std::vector<HardCycle>(static_cast<std::size_t>(length), cycle));
    seq.prepared = p.unsigned_part();
    seq.measured = frame.unsigned_part();
    seq.observable = PauliString(n_qubits, 0, frame.support_mask());
    seq.sign = frame.sign();
    seq.length = length;
    return seq;
}

std::vector<CbSequence> cb_sequences(const HardCycle& cycle, int n_qubits, const PauliString& p,
                                     const std::vector<int>& lengths, int n_random, Rng& rng) {
    if (n_random < 1) throw std::invalid_argument("need at least one randomization per length");
    std::vector<CbSequence> out;
    for (int m : lengths)
        for (int r = 0; r < n_random; ++r) out.push_back(make_cb_sequence(cycle, n_qubits, p, m, rng));
    return out;
}

DecayFit fit_decay(const std::map<int, double>& points, const std::map<int, double>* variances) {
    if (points.size() < 2) throw std::invalid_argument("decay fit needs at least two lengths");
    std::vector<double> x, t, w;
    bool weighted = variances != nullptr;
    for (const auto& [m, y] : points) {
        if (!(y > 0)) continue;
        x.push_back(m);
        t.push_back(std::log(y));
        double wt = 1.0;
        if (weighted) {
            const auto it = variances->find(m);
            if (it == variances->end() || !(it->second > 0)) {
                weighted = false;
            } else {
                wt = y * y / it->second;
            }
        }
        w.push_back(wt);
    }
    DecayFit fit;
    if (x.size() < 2) return fit;
    if (!weighted) std::fill(w.begin(), w.end(), 1.0);

    const double sw = std::accumulate(w.begin(), w.end(), 0.0);
    double xm = 0, tm = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += w[i] * x[i] / sw;
        tm += w[i] * t[i] / sw;
    }
    double sxx = 0, sxt = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xm) * (x[i] - xm);
        sxt += w[i] * (x[i] - xm) * (t[i] - tm);
    }
    const double slope = sxt / sxx;
    const double intercept = tm - slope * xm;
    double rss = 0, wrss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = t[i] - intercept - slope * x[i];
        rss += r * r;
        wrss += w[i] * r * r;
    }
    double se_slope = 0;
    if (weighted)
        se_slope = std::sqrt(1.0 / sxx);
    else if (x.size() > 2)
        se_slope = std::sqrt(wrss / static_cast<double>(x.size() - 2) / sxx);

    fit.amplitude = std::exp(intercept);
    fit.lambda = std::min(std::exp(slope), 1.05);
    fit.std_error = fit.lambda * se_slope;
    fit.residual = std::sqrt(rss / static_cast<double>(x.size()));
    fit.ok = true;
    return fit;
}

CbSummary cb_summary(const std::map<PauliString, double>& decays, double tolerance) {
    if (decays.empty()) throw std::invalid_argument("no decays to summarize");
    CbSummary s;
    for (const auto& [p, l] : decays) s.mean += l;
    s.mean /= static_cast<double>(decays.size());
    for (const auto& [p, l] : decays) s.stddev += (l - s.mean) * (l - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(decays.size()));
    for (const auto& [p, l] : decays)
        if (l < s.lower_bound() - tolerance || l > 1.0 + tolerance) s.violations.push_back(p);
    return s;
}

void CbResult::write_csv(std::ostream& out) const {
    out << "pauli,lambda,amplitude,residual,std_error\n";
    for (const auto& [p, l] : decays) {
        const auto& f = fits.at(p);
        out << p.str() << ',' << l << ',' << f.amplitude << ',' << f.residual << ',' << f.std_error << '\n';
    }
}

std::string CbResult::summary_json() const {
    nlohmann::json j;
    j["signature"] = signature;
    j["n_qubits"] = n_qubits;
    j["n_decays"] = decays.size();
    j["lambda_bar"] = mean;
    j["std"] = stddev;
    j["lower_bound"] = 2.0 * mean - 1.0;
    j["upper_bound"] = 1.0;
    j["violations"] = nlohmann::json::array();
    if (!decays.empty())
        for (const auto& p : summary().violations) j["violations"].push_back(p.str());
    j["failed"] = nlohmann::json::array();
    for (const auto& p : failed) j["failed"].push_back(p.str());
    return j.dump(2);
}

CbResult run_cb(const Backend& backend, const HardCycle& cycle, const CbOptions& options) {
    const int n = backend.n_qubits();
    if (options.n_random < 1) throw std::invalid_argument("need at least one randomization per length");
    if (options.shots < 1 && !options.exact) throw std::invalid_argument("need at least one shot");
    if (options.lengths.size() < 2) throw std::invalid_argument("CB needs at least two lengths");

    std::vector<PauliString> paulis;
    for (const auto& p : all_paulis(n))
        if (!p.is_identity()) paulis.push_back(p);
    if (options.sample_paulis > 0 && options.sample_paulis < static_cast<int>(paulis.size())) {
        Rng rng = make_rng(derive_seed(options.seed, 0x5a3b1e));
        for (std::size_t i = paulis.size() - 1; i > 0; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(paulis[i], paulis[pick(rng)]);
        }
        paulis.resize(static_cast<std::size_t>(options.sample_paulis));
        std::sort(paulis.begin(), paulis.end());
    }

    const int n_len = static_cast<int>(options.lengths.size());
    const int n_rand = options.n_random;
    const long long tasks = static_cast<long long>(paulis.size()) * n_len * n_rand;
    std::vector<double> values(static_cast<std::size_t>(tasks));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long long task = 0; task < tasks; ++task) {
        try {
            const auto pi = static_cast<std::size_t>(task / (n_len * n_rand));
            const int li = static_cast<int>((task / n_rand) % n_len);
            const int r = static_cast<int>(task % n_rand);
            const auto& p = paulis[pi];
            const int m = options.lengths[static_cast<std::size_t>(li)];
            Rng rng = make_rng(derive_seed(options.seed, p.index(), static_cast<std::uint64_t>(m),
                                           static_cast<std::uint64_t>(r)));
            const CbSequence seq = make_cb_sequence(cycle, n, p, m, rng);
            double e;
            if (options.exact) {
                e = backend.exact(seq.circuit, seq.observable);
            } else {
                Rng shots = make_rng(derive_seed(options.seed, p.index(), static_cast<std::uint64_t>(m),
                                                 static_cast<std::uint64_t>(r), 1));
                e = estimate_expectation(backend.run(seq.circuit, seq.observable, options.shots, shots));
            }
            values[static_cast<std::size_t>(task)] = seq.sign * e;
        } catch (...) {
#pragma omp critical(run_cb_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    CbResult result;
    result.signature = cycle.signature();
    result.n_qubits = n;
    for (std::size_t pi = 0; pi < paulis.size(); ++pi) {
        std::map<int, double> points, vars;
        for (int li = 0; li < n_len; ++li) {
            const auto base = (pi * static_cast<std::size_t>(n_len) + static_cast<std::size_t>(li)) * static_cast<std::size_t>(n_rand);
            double mean = 0;
            for (int r = 0; r < n_rand; ++r) mean += values[base + static_cast<std::size_t>(r)];
            mean /= n_rand;
            double var = 0;
            for (int r = 0; r < n_rand; ++r) {
                const double d = values[base + static_cast<std::size_t>(r)] - mean;
                var += d * d;
            }
            const int m = options.lengths[static_cast<std::size_t>(li)];
            points[m] = mean;
            vars[m] = n_rand > 1 ? var / (n_rand - 1) / n_rand : 0.0;
        }
        const DecayFit fit = fit_decay(points, &vars);
        result.fits[paulis[pi]] = fit;
        if (fit.ok)
            result.decays[paulis[pi]] = fit.lambda;
        else
            result.failed.push_back(paulis[pi]);
    }
    if (!result.decays.empty()) {
        const auto s = cb_summary(result.decays);
        result.mean = s.mean;
        result.stddev = s.stddev;
    }
    return result;
}

Ptm cycle_error_ptm(const NoiseModel& noise, const HardCycle& cycle) {
    const int n = noise.n_qubits();
    const CycleNoise* cn = noise.find(cycle);
    if (!cn) return Ptm::identity(n);
    Ptm total = ptm_of(UnitaryChannel{cn->coherent_unitary(n)});
    for (const auto& ch : cn->channels) total = ptm_of(ch).after(total);
    return total;
}

std::map<PauliString, double> expected_cb_decays(const NoiseModel& noise, const HardCycle& cycle) {
    const RealVector d = cycle_error_ptm(noise, cycle).diagonal();
    std::map<PauliString, double> out;
    for (const auto& p : all_paulis(noise.n_qubits())) {
        if (p.is_identity()) continue;
        PauliString q = p;
        for (const auto& cz : cycle.cz) q = conjugate_through(q, CliffordGate::cz(cz.a, cz.b));
        out[p] = std::sqrt(std::max(0.0, d[p.index()] * d[q.unsigned_part().index()]));
    }
    return out;
}

double predict_fidelity(double lambda_bar, int n_cycles, int n_qubits) {
    if (!(lambda_bar >= 0.0 && lambda_bar <= 1.0)) throw std::invalid_argument("lambda_bar outside [0, 1]");
    if (n_cycles < 0 || n_qubits < 1) throw std::invalid_argument("bad cycle or qubit count");
    const double floor = 1.0 / dim_of(n_qubits);
    return floor + (1.0 - floor) * std::pow(lambda_bar, n_cycles);
}

double effective_lambda(const std::map<std::string, double>& cycle_decays, const std::map<std::string, int>& counts) {
    double out = 1.0;
    for (const auto& [cycle, count] : counts) {
        if (count < 0) throw std::invalid_argument("negative cycle count for " + cycle);
        if (count == 0) continue;
        const auto it = cycle_decays.find(cycle);
        if (it == cycle_decays.end()) throw std::invalid_argument("no decay for cycle " + cycle);
        out *= std::pow(it->second, count);
    }
    return out;
}

}  // namespace rcq
