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

#include "rcq/pauli.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "rcq/kernels.hpp"

namespace rcq {

namespace {

void require_same_width(const PauliString& p, const PauliString& q) {
    if (p.n_qubits() != q.n_qubits())
        throw std::invalid_argument("Pauli width mismatch: " + std::to_string(p.n_qubits()) + " vs " +
                                    std::to_string(q.n_qubits()));
}

cplx i_pow(int k) {
    static constexpr std::array<double, 4> re{1, 0, -1, 0};
    static constexpr std::array<double, 4> im{0, 1, 0, -1};
    k &= 3;
    return {re[k], im[k]};
}

// Image of a single-qubit letter under a named Clifford: {letter, sign}.
struct Image1 {
    Letter letter;
    int sign;
};

constexpr std::array<Image1, 4> kH{{{Letter::I, 1}, {Letter::Z, 1}, {Letter::Y, -1}, {Letter::X, 1}}};
constexpr std::array<Image1, 4> kS{{{Letter::I, 1}, {Letter::Y, 1}, {Letter::X, -1}, {Letter::Z, 1}}};
constexpr std::array<Image1, 4> kSdg{{{Letter::I, 1}, {Letter::Y, -1}, {Letter::X, 1}, {Letter::Z, 1}}};
constexpr std::array<Image1, 4> kX{{{Letter::I, 1}, {Letter::X, 1}, {Letter::Y, -1}, {Letter::Z, -1}}};
constexpr std::array<Image1, 4> kY{{{Letter::I, 1}, {Letter::X, -1}, {Letter::Y, 1}, {Letter::Z, -1}}};
constexpr std::array<Image1, 4> kZ{{{Letter::I, 1}, {Letter::X, -1}, {Letter::Y, -1}, {Letter::Z, 1}}};

// CZ images indexed by 4*letter(a) + letter(b).
struct Image2 {
    Letter a;
    Letter b;
    int sign;
};

using L = Letter;
constexpr std::array<Image2, 16> kCz{{
    {L::I, L::I, 1}, {L::Z, L::X, 1}, {L::Z, L::Y, 1}, {L::I, L::Z, 1},
    {L::X, L::Z, 1}, {L::Y, L::Y, 1}, {L::Y, L::X, -1}, {L::X, L::I, 1},
    {L::Y, L::Z, 1}, {L::X, L::Y, -1}, {L::X, L::X, 1}, {L::Y, L::I, 1},
    {L::Z, L::I, 1}, {L::I, L::X, 1}, {L::I, L::Y, 1}, {L::Z, L::Z, 1},
}};

const std::array<Image1, 4>& single_table(CliffordKind kind) {
    switch (kind) {
        case CliffordKind::H: return kH;
        case CliffordKind::S: return kS;
        case CliffordKind::Sdg: return kSdg;
        case CliffordKind::X: return kX;
        case CliffordKind::Y: return kY;
        case CliffordKind::Z: return kZ;
        default: throw std::invalid_argument("not a single-qubit Clifford");
    }
}

void set_letter(std::uint32_t& x, std::uint32_t& z, std::uint32_t bit, Letter l) {
    x &= ~bit;
    z &= ~bit;
    if (l == Letter::X || l == Letter::Y) x |= bit;
    if (l == Letter::Z || l == Letter::Y) z |= bit;
}

}  // namespace

PauliString::PauliString(int n_qubits) : PauliString(n_qubits, 0, 0, 0) {}

PauliString::PauliString(int n_qubits, std::uint32_t x_bits, std::uint32_t z_bits, int phase)
    : n_(n_qubits), x_(x_bits), z_(z_bits), phase_(((phase % 4) + 4) % 4) {
    if (n_qubits < 0 || n_qubits > kMaxPauliQubits) throw std::invalid_argument("unsupported Pauli width");
    const std::uint32_t mask = n_qubits == 0 ? 0u : ((1u << n_qubits) - 1u);
    if ((x_bits | z_bits) & ~mask) throw std::invalid_argument("Pauli bits outside register");
}

PauliString PauliString::parse(std::string_view text) {
    int phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') phase = 2;
        ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
        phase += 1;
        ++pos;
    }
    const auto body = text.substr(pos);
    if (body.empty()) throw std::invalid_argument("empty Pauli string");
    const int n = static_cast<int>(body.size());
    if (n > kMaxPauliQubits) throw std::invalid_argument("Pauli string too long");
    std::uint32_t x = 0, z = 0;
    for (int q = 0; q < n; ++q) {
        const std::uint32_t bit = qubit_bit(n, q);
        switch (body[q]) {
            case 'I': case '_': break;
            case 'X': x |= bit; break;
            case 'Y': x |= bit; z |= bit; break;
            case 'Z': z |= bit; break;
            default: throw std::invalid_argument("bad Pauli letter in '" + std::string(text) + "'");
        }
    }
    return PauliString(n, x, z, phase);
}

PauliString PauliString::from_index(int n_qubits, std::uint32_t index) {
    std::uint32_t x = 0, z = 0;
    for (int q = n_qubits - 1; q >= 0; --q) {
        set_letter(x, z, qubit_bit(n_qubits, q), static_cast<Letter>(index & 3u));
        index >>= 2;
    }
    if (index != 0) throw std::invalid_argument("Pauli index out of range");
    return PauliString(n_qubits, x, z, 0);
}

PauliString PauliString::single(int n_qubits, int qubit, Letter letter) {
    if (qubit < 0 || qubit >= n_qubits) throw std::out_of_range("qubit index out of range");
    std::uint32_t x = 0, z = 0;
    set_letter(x, z, qubit_bit(n_qubits, qubit), letter);
    return PauliString(n_qubits, x, z, 0);
}

cplx PauliString::phase_factor() const { return i_pow(phase_); }

Letter PauliString::letter(int qubit) const {
    const std::uint32_t bit = qubit_bit(n_, qubit);
    const bool xb = x_ & bit, zb = z_ & bit;
    if (xb && zb) return Letter::Y;
    if (xb) return Letter::X;
    if (zb) return Letter::Z;
    return Letter::I;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

int PauliString::sign() const {
    if (!is_hermitian()) throw std::domain_error("Pauli string " + str() + " has an imaginary phase");
    return phase_ == 0 ? 1 : -1;
}

int PauliString::y_count() const { return std::popcount(x_ & z_); }

std::uint32_t PauliString::index() const {
    std::uint32_t idx = 0;
    for (int q = 0; q < n_; ++q) idx = (idx << 2) | static_cast<std::uint32_t>(letter(q));
    return idx;
}

std::string PauliString::letters() const {
    std::string s(static_cast<std::size_t>(n_), 'I');
    for (int q = 0; q < n_; ++q) s[q] = "IXYZ"[static_cast<int>(letter(q))];
    return s;
}

std::string PauliString::str() const {
    static constexpr std::array<const char*, 4> prefix{"", "i", "-", "-i"};
    return prefix[phase_] + letters();
}

Matrix PauliString::to_matrix() const {
    const int dim = dim_of(n_);
    Matrix m = Matrix::Zero(dim, dim);
    const cplx base = i_pow(phase_ + y_count());
    for (int k = 0; k < dim; ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        const double s = (std::popcount(kk & z_) & 1) ? -1.0 : 1.0;
        m(kk ^ x_, k) = base * s;
    }
    return m;
}

bool operator<(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    const auto ia = a.index(), ib = b.index();
    if (ia != ib) return ia < ib;
    return a.phase_ < b.phase_;
}

PauliString pauli_mul(const PauliString& p, const PauliString& q) {
    require_same_width(p, q);
    // sigma(x,z) = i^{xz} X^x Z^z, so the product picks up i^{x1 z1 + x2 z2 + 2 z1 x2 - x3 z3}.
    const auto x1 = p.x_bits(), z1 = p.z_bits(), x2 = q.x_bits(), z2 = q.z_bits();
    const auto x3 = x1 ^ x2, z3 = z1 ^ z2;
    const int e = std::popcount(x1 & z1) + std::popcount(x2 & z2) + 2 * std::popcount(z1 & x2) -
                  std::popcount(x3 & z3);
    return PauliString(p.n_qubits(), x3, z3, p.phase() + q.phase() + e);
}

PauliString operator*(const PauliString& p, const PauliString& q) { return pauli_mul(p, q); }

bool commutes(const PauliString& p, const PauliString& q) {
    require_same_width(p, q);
    return ((std::popcount(p.x_bits() & q.z_bits()) + std::popcount(p.z_bits() & q.x_bits())) & 1) == 0;
}

std::vector<PauliString> all_paulis(int n_qubits) {
    const std::uint32_t count = 1u << (2 * n_qubits);
    std::vector<PauliString> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) out.push_back(PauliString::from_index(n_qubits, i));
    return out;
}

CliffordGate CliffordGate::inverse() const {
    switch (kind) {
        case CliffordKind::S: return {CliffordKind::Sdg, q0, q1};
        case CliffordKind::Sdg: return {CliffordKind::S, q0, q1};
        default: return *this;
    }
}

Matrix CliffordGate::local_matrix() const {
    const cplx i1(0, 1);
    const double r = 1.0 / std::sqrt(2.0);
    Matrix m(2, 2);
    switch (kind) {
        case CliffordKind::H: m << r, r, r, -r; break;
        case CliffordKind::S: m << 1, 0, 0, i1; break;
        case CliffordKind::Sdg: m << 1, 0, 0, -i1; break;
        case CliffordKind::X: m << 0, 1, 1, 0; break;
        case CliffordKind::Y: m << 0, -i1, i1, 0; break;
        case CliffordKind::Z: m << 1, 0, 0, -1; break;
        case CliffordKind::CZ: {
            Matrix cz = Matrix::Identity(4, 4);
            cz(3, 3) = -1;
            return cz;
        }
    }
    return m;
}

PauliString conjugate_through(const PauliString& p, const CliffordGate& gate) {
    const int n = p.n_qubits();
    auto check = [n](int q) {
        if (q < 0 || q >= n) throw std::out_of_range("Clifford qubit index out of range");
    };
    std::uint32_t x = p.x_bits(), z = p.z_bits();
    int phase = p.phase();
    check(gate.q0);
    if (gate.kind == CliffordKind::CZ) {
        check(gate.q1);
        if (gate.q0 == gate.q1) throw std::invalid_argument("CZ needs two distinct qubits");
        const auto img = kCz[4 * static_cast<int>(p.letter(gate.q0)) + static_cast<int>(p.letter(gate.q1))];
        set_letter(x, z, qubit_bit(n, gate.q0), img.a);
        set_letter(x, z, qubit_bit(n, gate.q1), img.b);
        if (img.sign < 0) phase += 2;
    } else {
        const auto img = single_table(gate.kind)[static_cast<int>(p.letter(gate.q0))];
        set_letter(x, z, qubit_bit(n, gate.q0), img.letter);
        if (img.sign < 0) phase += 2;
    }
    return PauliString(n, x, z, phase);
}

// ---------------------------------------------------------------------------

Ptm Ptm::identity(int n_qubits) {
    const int d = 1 << (2 * n_qubits);
    return {n_qubits, RealMatrix::Identity(d, d)};
}

double Ptm::trace_preservation_error() const {
    RealVector e1 = RealVector::Zero(matrix.cols());
    e1[0] = 1.0;
    return (matrix.row(0).transpose() - e1).cwiseAbs().maxCoeff();
}

double Ptm::orthogonality_error() const {
    return (matrix.transpose() * matrix - RealMatrix::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff();
}

Ptm Ptm::after(const Ptm& first) const {
    if (first.n_qubits != n_qubits) throw std::invalid_argument("PTM width mismatch");
    return {n_qubits, matrix * first.matrix};
}

std::vector<std::pair<PauliString, double>> PauliChannel::normalized_terms() const {
    double total = 0.0;
    bool has_identity = false;
    for (const auto& [p, prob] : terms) {
        if (p.n_qubits() != n_qubits) throw std::invalid_argument("Pauli channel term width mismatch");
        if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("Pauli probability outside [0,1]");
        total += prob;
        has_identity = has_identity || p.is_identity();
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("Pauli probabilities sum above 1");
    auto out = terms;
    for (auto& t : out) t.first = t.first.unsigned_part();
    if (!has_identity) out.emplace_back(PauliString(n_qubits), std::max(0.0, 1.0 - total));
    return out;
}

RealVector PauliChannel::decay_diagonal() const {
    const auto normalized = normalized_terms();
    const int count = 1 << (2 * n_qubits);
    RealVector d = RealVector::Zero(count);
    for (int i = 0; i < count; ++i) {
        const auto q = PauliString::from_index(n_qubits, static_cast<std::uint32_t>(i));
        for (const auto& [p, prob] : normalized) d[i] += commutes(p, q) ? prob : -prob;
    }
    return d;
}

namespace {

int channel_width(const Channel& channel) {
    return std::visit(
        [](const auto& c) -> int {
            using T = std::decay_t<decltype(c)>;
            int dim = 0;
            if constexpr (std::is_same_v<T, UnitaryChannel>) {
                dim = static_cast<int>(c.unitary.rows());
            } else if constexpr (std::is_same_v<T, PauliChannel>) {
                return c.n_qubits;
            } else {
                if (c.operators.empty()) throw std::invalid_argument("empty Kraus set");
                dim = static_cast<int>(c.operators.front().rows());
            }
            int n = 0;
            while ((1 << n) < dim) ++n;
            if ((1 << n) != dim) throw std::invalid_argument("channel dimension is not a power of two");
            return n;
        },
        channel);
}

}  // namespace

Matrix apply_channel(const Channel& channel, const Matrix& op) {
    return std::visit(
        [&op](const auto& c) -> Matrix {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, UnitaryChannel>) {
                return c.unitary * op * c.unitary.adjoint();
            } else if constexpr (std::is_same_v<T, PauliChannel>) {
                Matrix out = op;
                const auto terms = c.normalized_terms();
                kernels::apply_pauli_channel(out, terms);
                return out;
            } else {
                Matrix out = Matrix::Zero(op.rows(), op.cols());
                for (const auto& k : c.operators) out += k * op * k.adjoint();
                return out;
            }
        },
        channel);
}

Ptm ptm_of(const Channel& channel) {
    const int n = channel_width(channel);
    if (n > 4) throw std::invalid_argument("ptm_of supports at most 4 qubits");
    const int dim = dim_of(n);
    const int count = dim * dim;

    if (const auto* pc = std::get_if<PauliChannel>(&channel)) {
        return {n, RealMatrix(pc->decay_diagonal().asDiagonal())};
    }
    if (const auto* kc = std::get_if<KrausChannel>(&channel)) {
        Matrix completeness = Matrix::Zero(dim, dim);
        for (const auto& k : kc->operators) {
            if (k.rows() != dim || k.cols() != dim) throw std::invalid_argument("Kraus operator shape mismatch");
            completeness += k.adjoint() * k;
        }
        const double err = (completeness - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (err > 1e-10) throw std::invalid_argument("Kraus set is not trace preserving (error " + std::to_string(err) + ")");
    }

    const auto basis = all_paulis(n);
    RealMatrix m(count, count);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < count; ++j) {
        const Matrix image = apply_channel(channel, basis[j].to_matrix());
        for (int i = 0; i < count; ++i) m(i, j) = kernels::pauli_trace(image, basis[i]).real() / dim;
    }
    return {n, std::move(m)};
}

}  // namespace rcq
