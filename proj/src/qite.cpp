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

#include "rcq/qite.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace rcq {

namespace {

void check_qubits(int n, int max, const char* what) {
    if (n < 1 || n > max) throw std::invalid_argument(std::string(what) + ": unsupported qubit count " + std::to_string(n));
}

// <p> including the phase of p.
cplx expect(const ExpectationSet& e, const PauliString& p) {
    if (p.is_identity()) return p.phase_factor();
    return p.phase_factor() * e.value(p.unsigned_part());
}

// exp(-i t h) for Hermitian h.
Matrix expm_herm(const Matrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    const Vector phases = (eig.eigenvalues() * -t).unaryExpr([](double x) { return std::polar(1.0, x); }).eval();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

const Mat2& hadamard() {
    static const Mat2 h = (Mat2() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
    return h;
}

// Accumulates single-qubit gates between CZ layers.
class Builder {
  public:
    explicit Builder(int n) : c_(n), pending_(static_cast<std::size_t>(n), Mat2::Identity()) {}

    void gate(int q, const Mat2& g) { pending_[static_cast<std::size_t>(q)] = g * pending_[static_cast<std::size_t>(q)]; }
    void layer(const HardCycle& hard) {
        flush();
        c_.push_back(hard, EasyCycle::identity(c_.n_qubits()));
    }
    void cz(int a, int b) { layer(HardCycle{{CzPair{a, b}}}); }
    void cnot(int control, int target) {
        gate(target, hadamard());
        cz(control, target);
        gate(target, hadamard());
    }
    // Runs `sub` with its qubit k mapped to qubits[k].
    void embed(const Circuit& sub, const std::vector<int>& qubits) {
        for (int i = 0; i < static_cast<int>(sub.easy_cycles().size()); ++i) {
            const auto gates = sub.easy(i).matrices();
            for (std::size_t k = 0; k < qubits.size(); ++k) gate(qubits[k], gates[k]);
            if (i < sub.hard_cycle_count()) {
                HardCycle mapped;
                for (const auto& p : sub.hard(i).cz)
                    mapped.cz.push_back({qubits[static_cast<std::size_t>(p.a)], qubits[static_cast<std::size_t>(p.b)]});
                layer(mapped);
            }
        }
    }
    Circuit finish() {
        flush();
        return c_;
    }

  private:
    void flush() {
        c_.apply_after(static_cast<int>(c_.easy_cycles().size()) - 1, pending_);
        for (auto& g : pending_) g = Mat2::Identity();
    }

    Circuit c_;
    std::vector<Mat2> pending_;
};

// exp(-i theta P) as a basis change around a CNOT ladder.
void phase_gadget(Builder& b, const PauliString& p, double theta) {
    const int n = p.n_qubits();
    std::vector<int> support;
    for (int q = 0; q < n; ++q)
        if (p.letter(q) != Letter::I) support.push_back(q);
    if (support.empty()) return;
    for (int q : support) b.gate(q, measurement_rotation(p.letter(q)));
    for (std::size_t j = 0; j + 1 < support.size(); ++j) b.cnot(support[j], support[j + 1]);
    b.gate(support.back(), rz(2 * theta));
    for (std::size_t j = support.size() - 1; j > 0; --j) b.cnot(support[j - 1], support[j]);
    for (int q : support) b.gate(q, measurement_rotation(p.letter(q)).adjoint());
}

// Unitary whose columns at `positions` are the given orthonormal vectors.
Matrix complete_unitary(int dim, const std::vector<std::pair<int, Vector>>& columns) {
    Matrix a = Matrix::Zero(dim, dim + static_cast<int>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = columns[k].second;
    a.rightCols(dim) = Matrix::Identity(dim, dim);
    Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
    Matrix u(dim, dim);
    std::vector<bool> used(static_cast<std::size_t>(dim), false);
    for (const auto& [pos, v] : columns) {
        u.col(pos) = v;
        used[static_cast<std::size_t>(pos)] = true;
    }
    int next = static_cast<int>(columns.size());
    for (int j = 0; j < dim; ++j)
        if (!used[static_cast<std::size_t>(j)]) u.col(j) = q.col(next++);
    return u;
}

Matrix single_qubit_layer(int n, const Mat2& g) {
    return kron_layer(std::vector<Mat2>(static_cast<std::size_t>(n), g));
}

}  // namespace

// ---------------------------------------------------------------------------
// Hamiltonian and oracles
// ---------------------------------------------------------------------------

void Hamiltonian::add(const PauliString& p, double coefficient) {
    if (p.n_qubits() != n_qubits) throw std::invalid_argument("Hamiltonian term width mismatch");
    terms[p.unsigned_part()] += p.sign() * coefficient;
}

Matrix Hamiltonian::matrix() const {
    const int d = dim_of(n_qubits);
    Matrix m = Matrix::Zero(d, d);
    for (const auto& [p, c] : terms) m += c * p.to_matrix();
    return m;
}

double Hamiltonian::energy(const ExpectationSet& e) const {
    double sum = 0;
    for (const auto& [p, c] : terms) sum += c * (p.is_identity() ? 1.0 : e.value(p));
    return sum;
}

Hamiltonian tfim(int n, double J, double h) {
    check_qubits(n, kMaxPauliQubits, "tfim");
    Hamiltonian H{n, {}};
    for (int i = 0; i + 1 < n; ++i) {
        PauliString xx = pauli_mul(PauliString::single(n, i, Letter::X), PauliString::single(n, i + 1, Letter::X));
        H.add(xx, J);
    }
    for (int i = 0; i < n; ++i) H.add(PauliString::single(n, i, Letter::Z), h);
    return H;
}

PauliString parity_operator(int n) {
    PauliString s(n);
    for (int q = 0; q < n; ++q) s = pauli_mul(s, PauliString::single(n, q, Letter::Z));
    return s;
}

Spectrum exact_ground(const Hamiltonian& h) {
    check_qubits(h.n_qubits, 4, "exact_ground");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h.matrix());
    Spectrum s{eig.eigenvalues(), eig.eigenvectors(), false};
    s.degenerate_ground = s.energies.size() > 1 && s.energies(1) - s.energies(0) < 1e-9;
    return s;
}

Eigenpair lowest_in_sector(const Hamiltonian& h, int parity) {
    check_qubits(h.n_qubits, 4, "lowest_in_sector");
    if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +1 or -1");
    const int d = dim_of(h.n_qubits);
    std::vector<int> basis;
    for (int i = 0; i < d; ++i)
        if ((__builtin_popcount(static_cast<unsigned>(i)) % 2 == 0) == (parity == 1)) basis.push_back(i);
    const Matrix full = h.matrix();
    const int k = static_cast<int>(basis.size());
    Matrix block(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) block(i, j) = full(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(block);
    Eigenpair out{eig.eigenvalues()(0), Vector::Zero(d)};
    for (int i = 0; i < k; ++i) out.state(basis[static_cast<std::size_t>(i)]) = eig.eigenvectors()(i, 0);
    return out;
}

int sector_parity(const Vector& state) {
    double even = 0, odd = 0;
    for (Eigen::Index i = 0; i < state.size(); ++i)
        (__builtin_popcount(static_cast<unsigned>(i)) % 2 == 0 ? even : odd) += std::norm(state(i));
    if (odd < 1e-10) return 1;
    if (even < 1e-10) return -1;
    throw std::domain_error("state is not a Z-parity eigenstate");
}

// ---------------------------------------------------------------------------
// Symmetry filters
// ---------------------------------------------------------------------------

std::vector<PauliString> generator_support(int n, bool use_z2, bool use_time_reversal) {
    check_qubits(n, 8, "generator_support");
    const PauliString s = parity_operator(n);
    std::vector<PauliString> out;
    for (const auto& p : all_paulis(n)) {
        if (p.is_identity()) continue;
        if (use_z2 && !commutes(p, s)) continue;
        if (use_time_reversal && p.y_count() % 2 == 0) continue;
        out.push_back(p);
    }
    return out;
}

int StateSupport::class_count() const { return static_cast<int>(measured.size()) + (paired ? 0 : 1); }

ExpectationSet StateSupport::complete(const ExpectationMap& values) const {
    ExpectationSet e(n_qubits);
    for (const auto& p : measured) {
        const auto it = values.find(p);
        if (it == values.end()) throw std::out_of_range("no measured value for " + p.str());
        e.set(p, it->second);
    }
    for (const auto& r : partners) e.set(r.pauli, r.factor * e.value(r.source), Provenance::SymmetryPartner);
    for (const auto& p : forced_zero) e.set_symmetry_zero(p);
    return e;
}

StateSupport state_support(int n, bool use_z2, bool use_time_reversal, int parity) {
    check_qubits(n, 8, "state_support");
    if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +1 or -1");
    const PauliString s = parity_operator(n);
    StateSupport out{n, parity, use_z2, {}, {}, {}};
    const auto before = [](const PauliString& a, const PauliString& b) {
        return a.weight() != b.weight() ? a.weight() < b.weight() : a.index() < b.index();
    };
    for (const auto& p : all_paulis(n)) {
        if (p.is_identity()) continue;
        const bool allowed = (!use_z2 || commutes(p, s)) && (!use_time_reversal || p.y_count() % 2 == 0);
        if (!allowed) {
            out.forced_zero.push_back(p);
            continue;
        }
        if (!use_z2 || p == s) {
            out.measured.push_back(p);
            continue;
        }
        const PauliString sp = pauli_mul(s, p);
        const PauliString partner = sp.unsigned_part();
        if (before(p, partner))
            out.measured.push_back(p);
        else
            out.partners.push_back({p, partner, static_cast<double>(sp.sign() * parity)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// QITE step and synthesis
// ---------------------------------------------------------------------------

Matrix GeneratorSet::unitary() const {
    if (static_cast<Eigen::Index>(paulis.size()) != coefficients.size())
        throw std::invalid_argument("generator set has mismatched coefficient count");
    const int d = dim_of(n_qubits);
    Matrix a = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < paulis.size(); ++k) a += coefficients(static_cast<Eigen::Index>(k)) * paulis[k].to_matrix();
    return expm_herm(a, 1.0);
}

GeneratorSet qite_step(const ExpectationSet& e, const Hamiltonian& h, double dtau, double ridge,
                       const std::vector<PauliString>& generators) {
    if (!(dtau > 0)) throw std::invalid_argument("dtau must be positive");
    if (!(ridge >= 0)) throw std::invalid_argument("ridge must be non-negative");
    if (h.n_qubits != e.n_qubits()) throw std::invalid_argument("Hamiltonian and expectation widths differ");
    double h2 = 0;
    for (const auto& [p, cp] : h.terms)
        for (const auto& [q, cq] : h.terms) h2 += cp * cq * expect(e, pauli_mul(p, q)).real();
    const double c = 1.0 - 2.0 * dtau * h.energy(e) + 2.0 * dtau * dtau * h2;
    if (c <= 0) throw std::domain_error("estimated norm of exp(-dtau H)|psi> is not positive; reduce dtau");
    const auto g = static_cast<Eigen::Index>(generators.size());
    RealMatrix s(g, g);
    RealVector b(g);
    for (Eigen::Index i = 0; i < g; ++i) {
        const auto& pi = generators[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < g; ++j) s(i, j) = expect(e, pauli_mul(pi, generators[static_cast<std::size_t>(j)])).real();
        double acc = 0;
        for (const auto& [q, coeff] : h.terms) acc += coeff * expect(e, pauli_mul(pi, q)).imag();
        b(i) = acc / std::sqrt(c);
    }
    RealVector a;
    if (ridge == 0) {
        Eigen::FullPivLU<RealMatrix> lu(s);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) throw std::domain_error("QITE system is singular; use a positive ridge");
        a = lu.solve(b);
    } else {
        a = (s + ridge * RealMatrix::Identity(g, g)).colPivHouseholderQr().solve(b);
    }
    return {e.n_qubits(), generators, dtau * a};
}

Circuit synthesize(const GeneratorSet& a, const SynthesisOptions& options) {
    const int n = a.n_qubits;
    check_qubits(n, 3, "synthesize");
    if (static_cast<Eigen::Index>(a.paulis.size()) != a.coefficients.size())
        throw std::invalid_argument("generator set has mismatched coefficient count");
    std::vector<std::pair<PauliString, double>> terms;
    for (std::size_t k = 0; k < a.paulis.size(); ++k) {
        const double c = a.coefficients(static_cast<Eigen::Index>(k));
        if (a.paulis[k].is_identity() || c == 0.0) continue;
        terms.emplace_back(a.paulis[k].unsigned_part(), a.paulis[k].sign() * c);
    }
    if (terms.empty()) return Circuit(n);
    const Matrix target = a.unitary();
    if (n == 1) {
        Circuit c(1);
        c.apply_after(0, {target});
        return c;
    }
    if (n == 2) return kak_decompose(target);

    int per_round = 0;
    for (const auto& [p, c] : terms) per_round += 2 * (p.weight() - 1);
    for (int r = 1; r <= 4096; ++r) {
        if (per_round * r > options.cz_cap)
            throw std::domain_error("Trotter synthesis needs more than " + std::to_string(options.cz_cap) + " CZs");
        Builder b(n);
        for (int k = 0; k < r; ++k)
            for (const auto& [p, c] : terms) phase_gadget(b, p, c / r);
        Circuit out = b.finish();
        if (phase_distance(net_unitary(out), target) <= options.tolerance) return out;
    }
    throw std::domain_error("Trotter synthesis did not reach the tolerance");
}

Circuit prepare_state(const Vector& state) {
    const int d = static_cast<int>(state.size());
    int n = 0;
    while ((1 << n) < d) ++n;
    if (d < 2 || (1 << n) != d) throw std::invalid_argument("state length must be a power of two");
    check_qubits(n, 3, "prepare_state");
    if (std::abs(state.norm() - 1.0) > 1e-8) throw std::invalid_argument("state is not normalized");
    if (n == 1) {
        Circuit c(1);
        c.apply_after(0, {complete_unitary(2, {{0, state}})});
        return c;
    }
    if (n == 2) return kak_decompose(complete_unitary(4, {{0, state}}));

    // psi = sum_k s_k |u_k> (x) |w_k> across qubit 0 | qubits 1,2.
    Matrix m(2, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = state(4 * i + j);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector sv = svd.singularValues();
    const Matrix v = svd.matrixV().conjugate();
    Builder b(3);
    b.gate(0, ry(2 * std::atan2(sv(1), sv(0))));
    b.cnot(0, 1);
    const Matrix w = complete_unitary(4, {{0, v.col(0)}, {2, v.col(1)}});
    b.embed(kak_decompose(w), {1, 2});
    b.gate(0, svd.matrixU());
    return b.finish();
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::string to_string(MitigationMode mode) {
    switch (mode) {
        case MitigationMode::None: return "none";
        case MitigationMode::Rescale: return "rescale";
        case MitigationMode::RescaleMcWeeny: return "rescale+mcweeny";
    }
    return "";
}

MitigationMode mitigation_mode_from(std::string_view name) {
    if (name == "none") return MitigationMode::None;
    if (name == "rescale") return MitigationMode::Rescale;
    if (name == "rescale+mcweeny") return MitigationMode::RescaleMcWeeny;
    throw std::invalid_argument("unknown mitigation mode '" + std::string(name) + "'");
}

void QiteConfig::validate() const {
    check_qubits(n_qubits, 3, "qite");
    if (!(dtau > 0)) throw std::invalid_argument("dtau must be positive");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    if (!(ridge >= 0)) throw std::invalid_argument("ridge must be non-negative");
    if (randomizations < 0) throw std::invalid_argument("randomizations must be non-negative");
    if (!exact && shots == 0) throw std::invalid_argument("shots must be positive");
    if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +1 or -1");
    if (!(rescale_floor > 0 && rescale_floor <= 1)) throw std::invalid_argument("rescale_floor must lie in (0, 1]");
    if (!(shift_alpha >= 0)) throw std::invalid_argument("shift_alpha must be non-negative");
}

std::string QiteConfig::to_json() const {
    nlohmann::json j;
    j["n_qubits"] = n_qubits;
    j["J"] = J;
    j["h"] = h;
    j["dtau"] = dtau;
    j["n_steps"] = n_steps;
    j["ridge"] = ridge;
    j["mitigation"] = to_string(mitigation);
    j["randomizations"] = randomizations;
    j["shots"] = shots;
    j["exact"] = exact;
    j["parity"] = parity;
    j["seed"] = seed;
    j["use_z2"] = use_z2;
    j["use_time_reversal"] = use_time_reversal;
    j["rescale_floor"] = rescale_floor;
    j["excited_method"] = excited_method == ExcitedMethod::Parity ? "parity" : "shift";
    j["shift_alpha"] = shift_alpha;
    return j.dump(2);
}

QiteConfig QiteConfig::from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    QiteConfig c;
    c.n_qubits = j.value("n_qubits", c.n_qubits);
    c.J = j.value("J", c.J);
    c.h = j.value("h", c.h);
    c.dtau = j.value("dtau", c.dtau);
    c.n_steps = j.value("n_steps", c.n_steps);
    c.ridge = j.value("ridge", c.ridge);
    c.mitigation = mitigation_mode_from(j.value("mitigation", to_string(c.mitigation)));
    c.randomizations = j.value("randomizations", c.randomizations);
    c.shots = j.value("shots", c.shots);
    c.exact = j.value("exact", c.exact);
    c.parity = j.value("parity", c.parity);
    c.seed = j.value("seed", c.seed);
    c.use_z2 = j.value("use_z2", c.use_z2);
    c.use_time_reversal = j.value("use_time_reversal", c.use_time_reversal);
    c.rescale_floor = j.value("rescale_floor", c.rescale_floor);
    const std::string method = j.value("excited_method", std::string("parity"));
    if (method == "parity")
        c.excited_method = ExcitedMethod::Parity;
    else if (method == "shift")
        c.excited_method = ExcitedMethod::Shift;
    else
        throw std::invalid_argument("unknown excited_method '" + method + "'");
    c.shift_alpha = j.value("shift_alpha", c.shift_alpha);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

double magnetization(const ExpectationSet& e) {
    const int n = e.n_qubits();
    double sum = 0;
    for (int q = 0; q < n; ++q) sum += e.value(PauliString::single(n, q, Letter::Z));
    return sum / n;
}

namespace {

ExpectationMap measure(const Circuit& c, const std::vector<PauliString>& paulis, const Backend& backend,
                       const QiteConfig& cfg, std::uint64_t seed) {
    return measure_paulis(c, paulis, group_settings(paulis), backend, {cfg.randomizations, cfg.shots, cfg.exact, seed});
}

struct RunSetup {
    Hamiltonian evolve;
    Hamiltonian report;
    Eigenpair target;
    Matrix initial;  // unitary with the start state as column 0
    std::vector<PauliString> generators;
    StateSupport support;
};

Circuit compile_state(const Matrix& total, const Vector& psi) {
    // Two qubits: re-synthesize the accumulated unitary; otherwise prepare the state directly.
    if (total.rows() == 4) return kak_decompose(total);
    return prepare_state(psi);
}

WindowStats window(const std::vector<QiteStep>& steps, int last, double QiteStep::*field) {
    if (steps.empty()) return {};
    const std::size_t k = std::min(steps.size(), static_cast<std::size_t>(std::max(1, last)));
    double sum = 0, sq = 0;
    for (std::size_t i = steps.size() - k; i < steps.size(); ++i) sum += steps[i].*field;
    const double mean = sum / static_cast<double>(k);
    for (std::size_t i = steps.size() - k; i < steps.size(); ++i) sq += (steps[i].*field - mean) * (steps[i].*field - mean);
    return {mean, k > 1 ? std::sqrt(sq / static_cast<double>(k - 1)) : 0.0};
}

QiteTrajectory run(const QiteConfig& cfg, const Backend& backend, const RunSetup& setup) {
    const int n = cfg.n_qubits;
    if (backend.n_qubits() != n) throw std::invalid_argument("backend width does not match the configuration");
    QiteTrajectory traj{cfg, setup.generators, setup.target.energy, {}};

    const Vector psi0 = setup.initial.col(0);
    if (std::norm(setup.target.state.dot(psi0)) < 1e-12)
        throw std::domain_error("initial state has no overlap with the target state");

    // Dense e^{-dtau H} for the per-step oracle check.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(setup.evolve.matrix());
    const Vector decay = (eig.eigenvalues() * -cfg.dtau).array().exp().cast<cplx>();
    const Matrix imaginary_step = eig.eigenvectors() * decay.asDiagonal() * eig.eigenvectors().adjoint();

    const ExpectationSet target = ExpectationSet::from_state(DensityMatrix::from_pure(setup.target.state));
    Matrix total = setup.initial;
    Vector psi = psi0;
    for (int k = 0; k <= cfg.n_steps; ++k) {
        QiteStep rec;
        rec.step = k;
        const Circuit c = compile_state(total, psi);
        rec.cz_count = c.cz_count();
        ExpectationSet e = setup.support.complete(
            measure(c, setup.support.measured, backend, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(k))));
        try {
            rec.bloch_length = bloch_length(e);
        } catch (const std::domain_error&) {
            rec.bloch_length = 0;
        }
        if (cfg.mitigation != MitigationMode::None) {
            try {
                e = rescale(e, cfg.rescale_floor);
                rec.rescaled = true;
            } catch (const std::domain_error& ex) {
                rec.note = std::string("rescale refused: ") + ex.what();
            }
        }
        if (cfg.mitigation == MitigationMode::RescaleMcWeeny && rec.rescaled) {
            const auto res = mcweeny(tomography(e.to_map(), n, true));
            if (res.converged) {
                rec.mcweeny_iterations = res.iterations;
                ExpectationMap values;
                for (const auto& p : setup.support.measured) values[p] = expectation(res.rho, p);
                e = setup.support.complete(values);
            } else {
                rec.note = "mcweeny refused: " + res.error;
            }
        }
        rec.energy = setup.report.energy(e);
        rec.rel_error = std::abs(rec.energy - setup.target.energy) / std::abs(setup.target.energy);
        rec.infidelity = 1.0 - fidelity_from_expectations(e, target);
        rec.magnetization = magnetization(e);
        rec.step_fidelity = std::numeric_limits<double>::quiet_NaN();
        if (k < cfg.n_steps) {
            const GeneratorSet a = qite_step(e, setup.evolve, cfg.dtau, cfg.ridge, setup.generators);
            const Matrix u = a.unitary();
            const Vector next = u * psi;
            const Vector exact = (imaginary_step * psi).normalized();
            rec.step_fidelity = std::norm(exact.dot(next));
            rec.coefficients.assign(a.coefficients.data(), a.coefficients.data() + a.coefficients.size());
            total = u * total;
            psi = next;
        }
        traj.steps.push_back(std::move(rec));
    }
    return traj;
}

Matrix basis_start(int n, int parity) {
    // |0...0> or |0...01>.
    std::vector<Mat2> gates(static_cast<std::size_t>(n), Mat2::Identity());
    if (parity == -1) gates.back() = letter_matrix(Letter::X);
    return kron_layer(gates);
}

int ground_parity(const Spectrum& s) {
    if (s.degenerate_ground) throw std::domain_error("ground state is degenerate; its parity is not defined");
    return sector_parity(s.ground());
}

}  // namespace

WindowStats QiteTrajectory::rel_error(int last) const { return window(steps, last, &QiteStep::rel_error); }
WindowStats QiteTrajectory::infidelity(int last) const { return window(steps, last, &QiteStep::infidelity); }
WindowStats QiteTrajectory::energy(int last) const { return window(steps, last, &QiteStep::energy); }
WindowStats QiteTrajectory::magnetization(int last) const { return window(steps, last, &QiteStep::magnetization); }

void QiteTrajectory::write_csv(std::ostream& out) const {
    out << "step,energy,rel_error,infidelity,magnetization,bloch_length,step_fidelity,cz_count,rescaled,"
           "mcweeny_iterations,note\n";
    for (const auto& s : steps) {
        out << s.step << ',' << s.energy << ',' << s.rel_error << ',' << s.infidelity << ',' << s.magnetization << ','
            << s.bloch_length << ',';
        if (!std::isnan(s.step_fidelity)) out << s.step_fidelity;
        out << ',' << s.cz_count << ',' << (s.rescaled ? 1 : 0) << ',' << s.mcweeny_iterations << ',' << s.note << '\n';
    }
}

std::string QiteTrajectory::to_json() const {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["target_energy"] = target_energy;
    auto& gens = j["generators"] = nlohmann::json::array();
    for (const auto& g : generators) gens.push_back(g.str());
    auto& rows = j["coefficients"] = nlohmann::json::array();
    for (const auto& s : steps)
        if (!s.coefficients.empty()) rows.push_back(s.coefficients);
    const auto put = [&](const char* key, WindowStats w) { j["last10"][key] = {{"mean", w.mean}, {"std", w.stddev}}; };
    put("rel_error", rel_error());
    put("infidelity", infidelity());
    put("energy", energy());
    put("magnetization", magnetization());
    return j.dump(2);
}

QiteTrajectory qite_run(const QiteConfig& cfg, const Backend& backend) {
    cfg.validate();
    const Hamiltonian h = tfim(cfg.n_qubits, cfg.J, cfg.h);
    const Spectrum spec = exact_ground(h);
    if (cfg.use_z2 && cfg.parity != ground_parity(spec))
        throw std::invalid_argument("configured parity differs from the ground-state parity");
    RunSetup setup{h,
                   h,
                   {spec.e0(), spec.ground()},
                   basis_start(cfg.n_qubits, cfg.parity),
                   generator_support(cfg.n_qubits, cfg.use_z2, cfg.use_time_reversal),
                   state_support(cfg.n_qubits, cfg.use_z2, cfg.use_time_reversal, cfg.parity)};
    return run(cfg, backend, setup);
}

QiteTrajectory excited_run(const QiteConfig& cfg_in, const Backend& backend) {
    cfg_in.validate();
    QiteConfig cfg = cfg_in;
    const int n = cfg.n_qubits;
    const Hamiltonian h = tfim(n, cfg.J, cfg.h);
    const Spectrum spec = exact_ground(h);
    if (n < 2) throw std::invalid_argument("a one-qubit chain has no excited state to target here");

    if (cfg.excited_method == ExcitedMethod::Parity) {
        cfg.parity = -ground_parity(spec);
        const Eigenpair sector = lowest_in_sector(h, cfg.parity);
        if (std::abs(sector.energy - spec.e1()) > 1e-9)
            throw std::domain_error("the first excited state shares the ground-state parity");
        RunSetup setup{h,
                       h,
                       sector,
                       basis_start(n, cfg.parity),
                       generator_support(n, cfg.use_z2, cfg.use_time_reversal),
                       state_support(n, cfg.use_z2, cfg.use_time_reversal, cfg.parity)};
        return run(cfg, backend, setup);
    }

    // H + alpha |GS><GS| has the first excited state as its ground state once alpha > E1 - E0.
    if (cfg.shift_alpha > 0 && cfg.shift_alpha <= spec.e1() - spec.e0())
        throw std::invalid_argument("shift_alpha must exceed E1 - E0");
    cfg.use_z2 = false;
    Hamiltonian shifted = h;
    if (cfg.shift_alpha > 0) {
        const Matrix projector = spec.ground() * spec.ground().adjoint();
        for (const auto& p : all_paulis(n)) {
            const double c = (p.to_matrix() * projector).trace().real() / dim_of(n);
            if (std::abs(c) > 1e-14) shifted.add(p, cfg.shift_alpha * c);
        }
    }
    const Eigenpair target = cfg.shift_alpha > 0 ? Eigenpair{spec.e1(), spec.first_excited()}
                                                 : Eigenpair{spec.e0(), spec.ground()};
    RunSetup setup{shifted,
                   h,
                   target,
                   single_qubit_layer(n, ry(M_PI / 4)),
                   generator_support(n, false, cfg.use_time_reversal),
                   state_support(n, false, cfg.use_time_reversal, 1)};
    return run(cfg, backend, setup);
}

}  // namespace rcq
