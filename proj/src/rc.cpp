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

#include "rcq/rc.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>

#include "json.hpp"
#include "rcq/kernels.hpp"

namespace rcq {

namespace {

std::vector<Mat2> letter_layer(const PauliString& p) {
    std::vector<Mat2> out;
    out.reserve(static_cast<std::size_t>(p.n_qubits()));
    for (int q = 0; q < p.n_qubits(); ++q) out.push_back(letter_matrix(p.letter(q)));
    return out;
}

}  // namespace

std::vector<PauliString> sample_twirls(const Circuit& c, Rng& rng) {
    const int n = c.n_qubits();
    std::uniform_int_distribution<std::uint32_t> pick(0, (1u << (2 * n)) - 1);
    std::vector<PauliString> out;
    out.reserve(static_cast<std::size_t>(c.hard_cycle_count()));
    for (int k = 0; k < c.hard_cycle_count(); ++k) out.push_back(PauliString::from_index(n, pick(rng)));
    return out;
}

PauliString twirl_correction(const PauliString& twirl, const HardCycle& hard) {
    PauliString p = twirl;
    for (const auto& g : hard.cz) p = conjugate_through(p, CliffordGate::cz(g.a, g.b));
    return p.unsigned_part();
}

Circuit randomize_with(const Circuit& c, const std::vector<PauliString>& twirls) {
    if (static_cast<int>(twirls.size()) != c.hard_cycle_count())
        throw std::invalid_argument("need exactly one twirl per hard cycle");
    Circuit out = c;
    for (int k = 0; k < c.hard_cycle_count(); ++k) {
        const auto& t = twirls[static_cast<std::size_t>(k)];
        if (t.n_qubits() != c.n_qubits()) throw std::invalid_argument("twirl width mismatch");
        if (t.is_identity()) continue;
        out.apply_after(k, letter_layer(t));
        out.apply_before(k + 1, letter_layer(twirl_correction(t, c.hard(k))));
    }
    return out;
}

Circuit randomize(const Circuit& c, Rng& rng) { return randomize_with(c, sample_twirls(c, rng)); }

// ---------------------------------------------------------------------------

RcPlan RcPlan::make(const Circuit& base, int m, std::uint64_t shots_per_randomization, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("need at least one randomization");
    RcPlan plan{base, m, shots_per_randomization, seed, {}};
    plan.twirls.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        plan.twirls.push_back(sample_twirls(base, rng));
    }
    plan.validate();
    return plan;
}

Circuit RcPlan::circuit(int k) const { return randomize_with(base, twirls.at(static_cast<std::size_t>(k))); }

void RcPlan::validate() const {
    if (m < 1) throw std::invalid_argument("need at least one randomization");
    if (shots_per_randomization < 1) throw std::invalid_argument("need at least one shot per randomization");
    if (static_cast<int>(twirls.size()) != m) throw std::invalid_argument("twirl list does not match M");
    for (const auto& row : twirls) {
        if (static_cast<int>(row.size()) != base.hard_cycle_count())
            throw std::invalid_argument("twirl row does not match the hard-cycle count");
        for (const auto& t : row)
            if (t.n_qubits() != base.n_qubits()) throw std::invalid_argument("twirl width mismatch");
    }
}

std::string RcPlan::to_json() const {
    nlohmann::json j;
    j["base"] = base.to_text();
    j["m"] = m;
    j["shots_per_randomization"] = shots_per_randomization;
    j["seed"] = seed;
    j["twirls"] = nlohmann::json::array();
    for (const auto& row : twirls) {
        auto r = nlohmann::json::array();
        for (const auto& t : row) r.push_back(t.str());
        j["twirls"].push_back(r);
    }
    return j.dump(2);
}

RcPlan RcPlan::from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RcPlan plan;
        plan.base = Circuit::from_text(j.at("base").get<std::string>());
        plan.m = j.at("m").get<int>();
        plan.shots_per_randomization = j.at("shots_per_randomization").get<std::uint64_t>();
        plan.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& row : j.at("twirls")) {
            std::vector<PauliString> r;
            for (const auto& t : row) r.push_back(PauliString::parse(t.get<std::string>()));
            plan.twirls.push_back(std::move(r));
        }
        plan.validate();
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("rc plan: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

DensityMatrix SimulatorBackend::state(const Circuit& c) const {
    if (c.n_qubits() != n_qubits()) throw std::invalid_argument("circuit width does not match backend");
    return apply_circuit(DensityMatrix::zero_state(n_qubits()), c, &noise_);
}

ShotRecord SimulatorBackend::run(const Circuit& c, const PauliString& observable, std::uint64_t shots, Rng& rng) const {
    return sample_shots(state(c), observable, shots, rng, &noise_);
}

double SimulatorBackend::exact(const Circuit& c, const PauliString& observable) const {
    return expectation(state(c), observable);
}

RcEstimate rc_estimate(const RcPlan& plan, const PauliString& observable, const Backend& backend, bool exact) {
    plan.validate();
    if (observable.is_identity()) throw std::invalid_argument("cannot estimate the identity observable");
    if (observable.n_qubits() != plan.base.n_qubits()) throw std::invalid_argument("observable width mismatch");

    RcEstimate out;
    out.per_randomization.assign(static_cast<std::size_t>(plan.m), 0.0);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < plan.m; ++k) {
        try {
            const Circuit c = plan.circuit(k);
            double e;
            if (exact) {
                e = backend.exact(c, observable);
            } else {
                Rng rng = make_rng(derive_seed(plan.seed, static_cast<std::uint64_t>(k), 1));
                e = estimate_expectation(backend.run(c, observable, plan.shots_per_randomization, rng));
            }
            out.per_randomization[static_cast<std::size_t>(k)] = e;
        } catch (...) {
#pragma omp critical(rc_estimate_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    double sum = 0.0;
    for (double e : out.per_randomization) sum += e;
    out.mean = sum / plan.m;
    return out;
}

ExpectationMap measure_paulis(const Circuit& c, const std::vector<PauliString>& paulis,
                              const std::vector<PauliString>& settings, const Backend& backend,
                              const MeasureOptions& options) {
    if (options.randomizations < 0) throw std::invalid_argument("randomizations must be >= 0");
    if (!options.exact && options.shots == 0) throw std::invalid_argument("shots must be positive");
    std::vector<std::vector<std::size_t>> groups(settings.size());
    std::vector<int> covers(paulis.size(), 0);
    for (std::size_t i = 0; i < paulis.size(); ++i)
        for (std::size_t s = 0; s < settings.size(); ++s)
            if (frame_covers(settings[s], paulis[i])) {
                groups[s].push_back(i);
                ++covers[i];
            }
    for (std::size_t i = 0; i < paulis.size(); ++i)
        if (covers[i] == 0) throw std::invalid_argument("no setting covers " + paulis[i].str());

    const bool rc = options.randomizations > 0;
    const int m = std::max(1, options.randomizations);
    std::vector<RcPlan> plans;
    for (std::size_t s = 0; s < settings.size(); ++s)
        plans.push_back(rc ? RcPlan::make(c, m, options.shots, derive_seed(options.seed, s))
                           : RcPlan{c, 1, options.shots, derive_seed(options.seed, s), {}});

    const int tasks = static_cast<int>(settings.size()) * m;
    std::vector<std::vector<double>> values(static_cast<std::size_t>(tasks));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < tasks; ++t) {
        try {
            const auto s = static_cast<std::size_t>(t / m);
            const int k = t % m;
            const RcPlan& plan = plans[s];
            const Circuit run = rc ? plan.circuit(k) : c;
            auto& out = values[static_cast<std::size_t>(t)];
            if (options.exact) {
                for (std::size_t i : groups[s]) out.push_back(backend.exact(run, paulis[i]));
            } else {
                Rng rng(derive_seed(plan.seed, static_cast<std::uint64_t>(k), 1));
                const ShotRecord rec = backend.run(run, settings[s], options.shots, rng);
                for (std::size_t i : groups[s]) out.push_back(estimate_expectation(rec, paulis[i]));
            }
        } catch (...) {
#pragma omp critical(measure_paulis_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> sums(paulis.size(), 0.0);
    for (std::size_t s = 0; s < settings.size(); ++s)
        for (int k = 0; k < m; ++k) {
            const auto& row = values[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < groups[s].size(); ++j) sums[groups[s][j]] += row[j];
        }
    ExpectationMap result;
    for (std::size_t i = 0; i < paulis.size(); ++i) result[paulis[i]] = sums[i] / (covers[i] * m);
    return result;
}

Ptm twirled_ptm(const Ptm& lambda) {
    const int n = lambda.n_qubits;
    if (n < 1 || n > 4) throw std::invalid_argument("twirled_ptm supports 1..4 qubits");
    const auto paulis = all_paulis(n);
    const auto count = static_cast<Eigen::Index>(paulis.size());
    if (lambda.matrix.rows() != count || lambda.matrix.cols() != count) throw std::invalid_argument("PTM shape mismatch");
    RealMatrix acc = RealMatrix::Zero(count, count);
    RealVector s(count);
    for (const auto& t : paulis) {
        for (Eigen::Index i = 0; i < count; ++i) s[i] = commutes(t, paulis[static_cast<std::size_t>(i)]) ? 1.0 : -1.0;
        acc += s.asDiagonal() * lambda.matrix * s.asDiagonal();
    }
    return Ptm{n, acc / static_cast<double>(count)};
}

Ptm circuit_ptm(const Circuit& c, const NoiseModel* noise) {
    const int n = c.n_qubits();
    if (n > 4) throw std::invalid_argument("circuit_ptm supports at most 4 qubits");
    const auto paulis = all_paulis(n);
    const auto count = static_cast<Eigen::Index>(paulis.size());
    const double d = dim_of(n);
    RealMatrix r(count, count);
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index j = 0; j < count; ++j) {
        // Pauli operators are not states; the shape-only constructor lets them pass through.
        const DensityMatrix out = apply_circuit(DensityMatrix(n, paulis[static_cast<std::size_t>(j)].to_matrix()), c, noise);
        for (Eigen::Index i = 0; i < count; ++i)
            r(i, j) = kernels::pauli_trace(out.matrix(), paulis[static_cast<std::size_t>(i)]).real() / d;
    }
    return Ptm{n, r};
}

double rc_variance(double e, double sigma, int m, std::uint64_t n) {
    if (!(std::abs(e) <= 1.0)) throw std::invalid_argument("expectation value outside [-1, 1]");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
    if (m < 1 || n < 1) throw std::invalid_argument("M and N must be at least 1");
    const double nn = static_cast<double>(n);
    return ((1.0 - e) * (1.0 + e) / nn + (nn - 1.0) / nn * sigma * sigma) / m;
}

}  // namespace rcq
