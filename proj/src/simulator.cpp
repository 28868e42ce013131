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

#include "rcq/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "rcq/kernels.hpp"

namespace rcq {

namespace {

using json = nlohmann::json;

constexpr int kMaxDenseQubits = 10;

void check_width(int a, int b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + " width mismatch: " + std::to_string(a) + " vs " +
                                    std::to_string(b));
}

void enumerate_matchings(int n, int q, std::uint32_t used, std::vector<CzPair>& current,
                         std::vector<HardCycle>& out) {
    while (q < n && (used & (1u << q))) ++q;
    if (q >= n) {
        out.push_back(HardCycle{current});
        return;
    }
    enumerate_matchings(n, q + 1, used | (1u << q), current, out);
    for (int r = q + 1; r < n; ++r) {
        if (used & (1u << r)) continue;
        current.push_back({q, r});
        enumerate_matchings(n, q + 1, used | (1u << q) | (1u << r), current, out);
        current.pop_back();
    }
}

std::uint32_t parse_bits(const std::string& s) {
    std::uint32_t v = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring '" + s + "'");
        v = (v << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return v;
}

std::string format_bits(std::uint32_t v, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q)
        if (v & qubit_bit(n, q)) s[static_cast<std::size_t>(q)] = '1';
    return s;
}

json cycle_to_json(const CycleNoise& c) {
    json j;
    j["rotations"] = json::array();
    for (const auto& [p, a] : c.rotations) j["rotations"].push_back({{"pauli", p.str()}, {"angle", a}});
    j["pauli_channels"] = json::array();
    for (const auto& ch : c.channels) {
        json m = json::object();
        for (const auto& [p, w] : ch.terms) m[p.str()] = w;
        j["pauli_channels"].push_back(m);
    }
    return j;
}

CycleNoise cycle_from_json(const json& j, int n) {
    CycleNoise c;
    if (j.contains("rotations"))
        for (const auto& r : j.at("rotations"))
            c.rotations.emplace_back(PauliString::parse(r.at("pauli").get<std::string>()), r.at("angle").get<double>());
    if (j.contains("pauli_channels"))
        for (const auto& m : j.at("pauli_channels")) {
            PauliChannel ch{n, {}};
            for (const auto& [k, v] : m.items()) ch.terms.emplace_back(PauliString::parse(k), v.get<double>());
            c.channels.push_back(std::move(ch));
        }
    return c;
}

void validate_cycle(const CycleNoise& c, int n) {
    for (const auto& [p, a] : c.rotations) {
        check_width(p.n_qubits(), n, "noise rotation");
        if (!p.is_hermitian() || !std::isfinite(a)) throw std::invalid_argument("noise rotation must be a Hermitian Pauli with finite angle");
    }
    for (const auto& ch : c.channels) {
        check_width(ch.n_qubits, n, "noise channel");
        (void)ch.normalized_terms();
    }
}

}  // namespace

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(int n_qubits, Matrix rho) : n_(n_qubits), rho_(std::move(rho)) {
    if (n_ < 1 || n_ > kMaxDenseQubits) throw std::invalid_argument("unsupported density-matrix width");
    if (rho_.rows() != dim_of(n_) || rho_.cols() != dim_of(n_)) throw std::invalid_argument("density-matrix shape mismatch");
}

DensityMatrix DensityMatrix::zero_state(int n_qubits) { return basis_state(n_qubits, 0); }

DensityMatrix DensityMatrix::basis_state(int n_qubits, std::uint32_t bits) {
    if (n_qubits < 1 || n_qubits > kMaxDenseQubits || bits >= static_cast<std::uint32_t>(dim_of(n_qubits)))
        throw std::invalid_argument("basis state out of range");
    Matrix m = Matrix::Zero(dim_of(n_qubits), dim_of(n_qubits));
    m(bits, bits) = 1.0;
    return DensityMatrix(n_qubits, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxDenseQubits) throw std::invalid_argument("unsupported density-matrix width");
    const int d = dim_of(n_qubits);
    return DensityMatrix(n_qubits, Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::from_pure(const Vector& psi) {
    const int n = std::countr_zero(static_cast<unsigned>(psi.size()));
    if (psi.size() < 2 || dim_of(n) != psi.size()) throw std::invalid_argument("state length is not a power of two");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::invalid_argument("state vector is not normalized");
    return DensityMatrix(n, psi * psi.adjoint());
}

DensityMatrix DensityMatrix::from_matrix(const Matrix& rho) {
    const int n = std::countr_zero(static_cast<unsigned>(rho.rows()));
    if (rho.rows() < 2 || dim_of(n) != rho.rows()) throw std::invalid_argument("matrix size is not a power of two");
    DensityMatrix out(n, rho);
    out.check();
    return out;
}

double DensityMatrix::hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - 1.0); }

double DensityMatrix::min_eigenvalue() const {
    const Matrix h = (rho_ + rho_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

void DensityMatrix::check() const {
    if (hermiticity_error() > 1e-10) throw std::domain_error("density matrix is not Hermitian");
    if (trace_error() > 1e-10) throw std::domain_error("density matrix does not have unit trace");
    if (min_eigenvalue() < -1e-8) throw std::domain_error("density matrix has a negative eigenvalue");
}

// ---------------------------------------------------------------------------

Matrix CycleNoise::coherent_unitary(int n_qubits) const {
    const int d = dim_of(n_qubits);
    Matrix u = Matrix::Identity(d, d);
    for (const auto& [p, a] : rotations) {
        check_width(p.n_qubits(), n_qubits, "noise rotation");
        const Matrix r = std::cos(a / 2) * Matrix::Identity(d, d) - cplx(0, std::sin(a / 2)) * p.to_matrix();
        u = r * u;
    }
    return u;
}

NoiseParams NoiseParams::preset(std::string_view name) {
    if (name == "paper-like") return {0.11, 0.05, 0.0145, 0.01};
    if (name == "coherent-heavy") return {0.25, 0.12, 0.002, 0.04};
    if (name == "literal") return {0.04, 0.02, 0.01, 0.01};
    if (name == "ideal") return {};
    throw std::invalid_argument("unknown noise preset '" + std::string(name) + "'");
}

NoiseModel NoiseModel::from_params(int n_qubits, const NoiseParams& params) {
    if (n_qubits < 1 || n_qubits > 4) throw std::invalid_argument("noise presets support 1..4 qubits");
    NoiseModel model(n_qubits);
    std::vector<HardCycle> matchings;
    std::vector<CzPair> scratch;
    enumerate_matchings(n_qubits, 0, 0, scratch, matchings);
    for (const auto& hard : matchings) {
        CycleNoise noise;
        std::uint32_t busy = 0;
        for (const auto& p : hard.cz) {
            busy |= (1u << p.a) | (1u << p.b);
            const auto zz = PauliString::single(n_qubits, p.a, Letter::Z) * PauliString::single(n_qubits, p.b, Letter::Z);
            if (params.zz_angle != 0) noise.rotations.emplace_back(zz, params.zz_angle);
            if (params.z_angle != 0) {
                noise.rotations.emplace_back(PauliString::single(n_qubits, p.a, Letter::Z), params.z_angle);
                noise.rotations.emplace_back(PauliString::single(n_qubits, p.b, Letter::Z), params.z_angle);
            }
            if (params.pauli_total > 0) {
                PauliChannel ch{n_qubits, {}};
                for (int la = 0; la < 4; ++la)
                    for (int lb = 0; lb < 4; ++lb) {
                        if (la == 0 && lb == 0) continue;
                        const auto pa = PauliString::single(n_qubits, p.a, static_cast<Letter>(la));
                        const auto pb = PauliString::single(n_qubits, p.b, static_cast<Letter>(lb));
                        ch.terms.emplace_back(pa * pb, params.pauli_total / 15.0);
                    }
                noise.channels.push_back(std::move(ch));
            }
        }
        if (params.spectator_z != 0)
            for (int q = 0; q < n_qubits; ++q)
                if (!(busy & (1u << q)))
                    noise.rotations.emplace_back(PauliString::single(n_qubits, q, Letter::Z), params.spectator_z);
        model.set(hard.signature(), std::move(noise));
    }
    return model;
}

NoiseModel NoiseModel::from_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("noise config: ") + e.what());
    }
    try {
        const int n = j.at("n_qubits").get<int>();
        NoiseModel model(n);
        if (j.contains("preset")) {
            const auto& p = j.at("preset");
            if (p.is_string()) {
                model = preset(n, p.get<std::string>());
            } else {
                NoiseParams params;
                params.zz_angle = p.value("zz_angle", 0.0);
                params.z_angle = p.value("z_angle", 0.0);
                params.pauli_total = p.value("pauli_total", 0.0);
                params.spectator_z = p.value("spectator_z", 0.0);
                model = from_params(n, params);
            }
        }
        model.set_strict(j.value("strict", false));
        if (j.contains("cycles"))
            for (const auto& [sig, c] : j.at("cycles").items()) model.set(sig, cycle_from_json(c, n));
        if (j.contains("default")) {
            auto c = cycle_from_json(j.at("default"), n);
            validate_cycle(c, n);
            model.set_default(std::move(c));
        }
        if (j.contains("readout")) {
            std::vector<ReadoutError> ro;
            for (const auto& r : j.at("readout")) ro.push_back({r.value("p01", 0.0), r.value("p10", 0.0)});
            model.set_readout(std::move(ro));
        }
        return model;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("noise config: ") + e.what());
    }
}

std::string NoiseModel::to_config() const {
    json j;
    j["n_qubits"] = n_;
    j["strict"] = strict_;
    j["cycles"] = json::object();
    for (const auto& [sig, c] : entries_) j["cycles"][sig] = cycle_to_json(c);
    if (default_) j["default"] = cycle_to_json(*default_);
    if (!readout_.empty()) {
        j["readout"] = json::array();
        for (const auto& r : readout_) j["readout"].push_back({{"p01", r.p01}, {"p10", r.p10}});
    }
    return j.dump(2);
}

void NoiseModel::set(const std::string& signature, CycleNoise noise) {
    if (signature.empty()) throw std::invalid_argument("empty hard-cycle signature");
    validate_cycle(noise, n_);
    entries_[signature] = std::move(noise);
}

const CycleNoise* NoiseModel::find(const HardCycle& hard) const {
    const auto it = entries_.find(hard.signature());
    if (it != entries_.end()) return &it->second;
    if (default_) return &*default_;
    if (strict_) throw std::out_of_range("no noise entry for hard cycle " + hard.signature());
    return nullptr;
}

void NoiseModel::set_readout(std::vector<ReadoutError> readout) {
    if (!readout.empty()) check_width(static_cast<int>(readout.size()), n_, "readout");
    for (const auto& r : readout)
        if (!(r.p01 >= 0 && r.p01 <= 1 && r.p10 >= 0 && r.p10 <= 1))
            throw std::invalid_argument("readout probability outside [0,1]");
    readout_ = std::move(readout);
}

void write_shots_csv(std::ostream& out, const std::vector<ShotRecord>& records) {
    out << "observable,bitstring,count\n";
    for (const auto& r : records)
        for (const auto& [bits, count] : r.counts) out << r.observable.str() << ',' << bits << ',' << count << '\n';
}

// ---------------------------------------------------------------------------

DensityMatrix apply_circuit(const DensityMatrix& rho, const Circuit& c, const NoiseModel* noise) {
    const int n = rho.n_qubits();
    check_width(c.n_qubits(), n, "circuit");
    if (noise) check_width(noise->n_qubits(), n, "noise model");
    DensityMatrix out = rho;
    Matrix& m = out.matrix();
    for (int i = 0; i <= c.hard_cycle_count(); ++i) {
        const auto& easy = c.easy(i);
        for (int q = 0; q < n; ++q)
            if (!(easy.gates[q] == ZxzxzAngles{})) kernels::apply_1q(m, n, q, easy.gates[q].matrix());
        if (i == c.hard_cycle_count()) break;
        const auto& hard = c.hard(i);
        for (const auto& p : hard.cz) kernels::apply_cz(m, n, p.a, p.b);
        if (const CycleNoise* cn = noise ? noise->find(hard) : nullptr) {
            if (!cn->rotations.empty()) kernels::apply_unitary(m, cn->coherent_unitary(n));
            for (const auto& ch : cn->channels) kernels::apply_pauli_channel(m, ch.normalized_terms());
        }
    }
    return out;
}

double expectation(const DensityMatrix& rho, const PauliString& p) {
    check_width(p.n_qubits(), rho.n_qubits(), "observable");
    if (!p.is_hermitian()) throw std::invalid_argument("observable must be Hermitian");
    return kernels::pauli_trace(rho.matrix(), p).real();
}

ShotRecord sample_shots(const DensityMatrix& rho, const PauliString& q, std::uint64_t n_shots, Rng& rng,
                        const NoiseModel* noise) {
    const int n = rho.n_qubits();
    check_width(q.n_qubits(), n, "observable");
    if (n_shots == 0) throw std::invalid_argument("n_shots must be positive");
    if (q.is_identity()) throw std::invalid_argument("cannot sample the identity observable");

    Matrix m = rho.matrix();
    for (int k = 0; k < n; ++k) {
        const Letter l = q.letter(k);
        if (l == Letter::X || l == Letter::Y) kernels::apply_1q(m, n, k, measurement_rotation(l));
    }
    RealVector probs = kernels::z_probabilities(m);
    if (noise && !noise->readout().empty()) {
        for (int k = 0; k < n; ++k) {
            const auto& r = noise->readout()[static_cast<std::size_t>(k)];
            const std::uint32_t bit = qubit_bit(n, k);
            for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(probs.size()); ++b) {
                if (b & bit) continue;
                const double p0 = probs[b], p1 = probs[b | bit];
                probs[b] = (1 - r.p01) * p0 + r.p10 * p1;
                probs[b | bit] = r.p01 * p0 + (1 - r.p10) * p1;
            }
        }
    }
    const double total = probs.sum();
    if (!(total > 0)) throw std::domain_error("state has no probability mass");

    ShotRecord rec{q, {}, n_shots};
    std::uint64_t remaining = n_shots;
    double mass = total;
    for (Eigen::Index k = 0; k < probs.size() && remaining > 0; ++k) {
        std::uint64_t count = remaining;
        if (k + 1 < probs.size()) {
            const double p = mass > 0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
            count = std::binomial_distribution<std::uint64_t>(remaining, p)(rng);
        }
        mass -= probs[k];
        remaining -= count;
        if (count > 0) rec.counts[format_bits(static_cast<std::uint32_t>(k), n)] = count;
    }
    return rec;
}

bool frame_covers(const PauliString& frame, const PauliString& p) {
    if (frame.n_qubits() != p.n_qubits()) return false;
    for (int k = 0; k < p.n_qubits(); ++k) {
        const Letter l = p.letter(k);
        if (l != Letter::I && frame.letter(k) != l) return false;
    }
    return true;
}

double estimate_expectation(const ShotRecord& rec) { return estimate_expectation(rec, rec.observable); }

double estimate_expectation(const ShotRecord& rec, const PauliString& p) {
    if (!frame_covers(rec.observable, p)) throw std::invalid_argument("record frame does not cover " + p.str());
    if (rec.n_shots == 0) throw std::invalid_argument("empty shot record");
    const std::uint32_t mask = p.support_mask();
    std::int64_t acc = 0;
    std::uint64_t seen = 0;
    for (const auto& [bits, count] : rec.counts) {
        if (static_cast<int>(bits.size()) != p.n_qubits()) throw std::invalid_argument("bitstring width mismatch");
        const bool odd = std::popcount(parse_bits(bits) & mask) & 1;
        acc += odd ? -static_cast<std::int64_t>(count) : static_cast<std::int64_t>(count);
        seen += count;
    }
    if (seen != rec.n_shots) throw std::invalid_argument("shot counts do not sum to n_shots");
    return p.sign() * static_cast<double>(acc) / static_cast<double>(rec.n_shots);
}

std::vector<PauliString> tomography_settings(int n_qubits) {
    std::vector<PauliString> out;
    for (const auto& p : all_paulis(n_qubits))
        if (p.weight() == n_qubits) out.push_back(p);
    return out;
}

std::vector<PauliString> group_settings(const std::vector<PauliString>& paulis) {
    std::vector<PauliString> groups;
    for (const auto& raw : paulis) {
        if (raw.is_identity()) continue;
        const auto p = raw.unsigned_part();
        bool placed = false;
        for (auto& g : groups) {
            check_width(g.n_qubits(), p.n_qubits(), "setting");
            bool ok = true;
            for (int k = 0; k < p.n_qubits() && ok; ++k) {
                const Letter a = g.letter(k), b = p.letter(k);
                ok = a == Letter::I || b == Letter::I || a == b;
            }
            if (!ok) continue;
            g = PauliString(p.n_qubits(), g.x_bits() | p.x_bits(), g.z_bits() | p.z_bits());
            placed = true;
            break;
        }
        if (!placed) groups.push_back(p);
    }
    for (auto& g : groups) {
        const std::uint32_t idle = ~g.support_mask() & ((1u << g.n_qubits()) - 1);
        g = PauliString(g.n_qubits(), g.x_bits(), g.z_bits() | idle);
    }
    return groups;
}

DensityMatrix tomography(const ExpectationMap& expectations, int n_qubits, bool missing_as_zero, bool* projected) {
    if (n_qubits < 1 || n_qubits > 4) throw std::invalid_argument("tomography supports 1..4 qubits");
    const std::size_t count = std::size_t{1} << (2 * n_qubits);
    std::vector<std::optional<double>> value(count);
    for (const auto& [p, e] : expectations) {
        check_width(p.n_qubits(), n_qubits, "tomography entry");
        value[p.index()] = p.sign() * e;
    }
    const int d = dim_of(n_qubits);
    Matrix rho = Matrix::Identity(d, d);
    for (std::uint32_t k = 1; k < count; ++k) {
        if (!value[k] && !missing_as_zero)
            throw std::invalid_argument("missing expectation for " + PauliString::from_index(n_qubits, k).str());
        const double e = value[k].value_or(0.0);
        if (e != 0.0) rho += e * PauliString::from_index(n_qubits, k).to_matrix();
    }
    rho /= static_cast<double>(d);
    rho = (rho + rho.adjoint()) / 2.0;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
    const bool project = eig.eigenvalues().minCoeff() < -1e-8;
    if (projected) *projected = project;
    if (project) {
        RealVector ev = eig.eigenvalues().cwiseMax(0.0);
        ev /= ev.sum();
        rho = eig.eigenvectors() * ev.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
    }
    return DensityMatrix(n_qubits, std::move(rho));
}

double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    check_width(sigma.n_qubits(), rho.n_qubits(), "fidelity");
    if (purity(sigma) < 1.0 - 1e-8) throw std::domain_error("fidelity reference state is not pure");
    return (rho.matrix() * sigma.matrix()).trace().real();
}

}  // namespace rcq
