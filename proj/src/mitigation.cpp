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

#include "rcq/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rcq {

namespace {

PauliString key_of(const PauliString& p, int n) {
    if (p.n_qubits() != n) throw std::invalid_argument("expectation key width mismatch");
    if (p.is_identity()) throw std::invalid_argument("the identity is not stored in an expectation set");
    return p.unsigned_part();
}

std::size_t pauli_count(int n) { return (std::size_t{1} << (2 * n)) - 1; }

// A pure state has sum E_P^2 = 2^N - 1.
double pure_norm(int n) { return static_cast<double>(dim_of(n) - 1); }

void require_complete(const ExpectationSet& e) {
    if (!e.complete())
        throw std::invalid_argument("expectation set is incomplete; flag missing Paulis as symmetry-forced zeros");
}

}  // namespace

ExpectationSet::ExpectationSet(int n_qubits) : n_(n_qubits) {
    if (n_ < 1 || n_ > 4) throw std::invalid_argument("expectation sets support 1..4 qubits");
}

ExpectationSet ExpectationSet::from_state(const DensityMatrix& rho) {
    ExpectationSet e(rho.n_qubits());
    for (const auto& p : all_paulis(rho.n_qubits()))
        if (!p.is_identity()) e.set(p, expectation(rho, p));
    return e;
}

ExpectationSet ExpectationSet::from_map(int n_qubits, const ExpectationMap& values) {
    ExpectationSet e(n_qubits);
    for (const auto& [p, v] : values)
        if (!p.is_identity()) e.set(p, v);
    return e;
}

void ExpectationSet::set(const PauliString& p, double value, Provenance provenance) {
    const auto key = key_of(p, n_);
    const double v = p.sign() * value;
    if (!(std::abs(v) <= kHardCap)) throw std::invalid_argument("expectation value of " + p.str() + " exceeds 1.1");
    if (provenance == Provenance::SymmetryZero && v != 0.0)
        throw std::invalid_argument("a symmetry-forced zero must have value 0");
    entries_[key] = {v, provenance};
}

void ExpectationSet::set_symmetry_zero(const PauliString& p) { entries_[key_of(p, n_)] = {0.0, Provenance::SymmetryZero}; }

bool ExpectationSet::contains(const PauliString& p) const { return entries_.count(key_of(p, n_)) > 0; }

double ExpectationSet::value(const PauliString& p) const {
    const auto it = entries_.find(key_of(p, n_));
    if (it == entries_.end()) throw std::out_of_range("no expectation for " + p.str());
    return p.sign() * it->second.value;
}

Provenance ExpectationSet::provenance(const PauliString& p) const {
    const auto it = entries_.find(key_of(p, n_));
    if (it == entries_.end()) throw std::out_of_range("no expectation for " + p.str());
    return it->second.provenance;
}

bool ExpectationSet::complete() const { return n_ > 0 && entries_.size() == pauli_count(n_); }

ExpectationMap ExpectationSet::to_map() const {
    ExpectationMap out;
    for (const auto& [p, e] : entries_) out[p] = e.value;
    return out;
}

void ExpectationSet::write_csv(std::ostream& out) const {
    out << "pauli,value,provenance\n";
    for (const auto& [p, e] : entries_)
        out << p.str() << ',' << e.value << ',' << provenance_name(e.provenance) << '\n';
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Measured: return "measured";
        case Provenance::SymmetryZero: return "symmetry_zero";
        case Provenance::SymmetryPartner: return "symmetry_partner";
    }
    return "";
}

double bloch_length(const ExpectationSet& e) {
    require_complete(e);
    double sum = 0;
    for (const auto& [p, entry] : e.entries()) sum += entry.value * entry.value;
    if (sum == 0.0) throw std::domain_error("all expectations vanish; the Bloch length is zero");
    return std::sqrt(sum / pure_norm(e.n_qubits()));
}

ExpectationSet rescale(const ExpectationSet& e, double floor) {
    if (std::abs(bloch_length(e) - 1.0) <= 1e-12) return e;
    ExpectationSet out = e;
    for (auto& [p, entry] : out.entries_) entry.value = std::clamp(entry.value, -1.0, 1.0);
    const double length = bloch_length(out);
    if (length < floor)
        throw std::domain_error("Bloch length " + std::to_string(length) + " is below the mitigation floor");
    // Rescaled values may legitimately exceed the input cap, so entries are written directly.
    for (auto& [p, entry] : out.entries_) entry.value /= length;
    return out;
}

Matrix mcweeny_step(const Matrix& rho) {
    const Matrix sq = rho * rho;
    return 3.0 * sq - 2.0 * sq * rho;
}

McWeenyResult mcweeny(const DensityMatrix& rho, double tol, int max_iter) {
    rho.check();
    if (!(tol > 0) || max_iter < 1) throw std::invalid_argument("bad McWeeny tolerance or iteration cap");
    McWeenyResult out{rho, 0, false, {}};
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig((rho.matrix() + rho.matrix().adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        if (ev.size() >= 2 && ev[ev.size() - 1] - ev[ev.size() - 2] <= 1e-6) {
            out.error = "degenerate dominant eigenvalue";
            return out;
        }
    }
    Matrix m = rho.matrix();
    for (int it = 0; it <= max_iter; ++it) {
        if (std::abs(m.squaredNorm() - 1.0) < tol) {
            out.rho = DensityMatrix(rho.n_qubits(), m);
            out.iterations = it;
            out.converged = true;
            return out;
        }
        if (it == max_iter) break;
        m = mcweeny_step(m);
        m = (m + m.adjoint()) / 2.0;
        m /= m.trace().real();
    }
    out.iterations = max_iter;
    out.error = "maximum iterations reached";
    return out;
}

double angle_error(const ExpectationSet& rho, const ExpectationSet& sigma, double floor) {
    if (rho.n_qubits() != sigma.n_qubits()) throw std::invalid_argument("expectation set width mismatch");
    const double lr = bloch_length(rho);
    if (lr < floor) throw std::domain_error("Bloch length below the mitigation floor");
    if (std::abs(bloch_length(sigma) - 1.0) > 1e-6) throw std::invalid_argument("reference set is not pure");
    double dot = 0;
    for (const auto& [p, entry] : rho.entries()) dot += entry.value * sigma.entries().at(p).value;
    return dot / (pure_norm(rho.n_qubits()) * lr);
}

double fidelity_from_expectations(const ExpectationSet& rho, const ExpectationSet& sigma) {
    if (rho.n_qubits() != sigma.n_qubits()) throw std::invalid_argument("expectation set width mismatch");
    require_complete(rho);
    require_complete(sigma);
    double dot = 0;
    for (const auto& [p, entry] : rho.entries()) dot += entry.value * sigma.entries().at(p).value;
    return (1.0 + dot) / dim_of(rho.n_qubits());
}

}  // namespace rcq
