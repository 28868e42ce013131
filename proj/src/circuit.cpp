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

#include "rcq/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rcq {

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 h;
    h << r, r, r, -r;
    return h;
}

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad number '" + std::string(s) + "' in circuit text");
    return v;
}

int parse_int(std::string_view s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad integer '" + std::string(s) + "' in circuit text");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// a (x) b == k for k in SU(2) x SU(2), via the rank-one realignment.
std::pair<Mat2, Mat2> kron_factor(const Matrix& k) {
    Eigen::Matrix4cd r;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2) r(2 * i1 + j1, 2 * i2 + j2) = k(2 * i1 + i2, 2 * j1 + j2);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s = std::sqrt(svd.singularValues()[0]);
    Mat2 a, b;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            a(i, j) = s * svd.matrixU()(2 * i + j, 0);
            b(i, j) = s * std::conj(svd.matrixV()(2 * i + j, 0));
        }
    return {a, b};
}

Matrix magic_basis() {
    const cplx i1(0, 1);
    Matrix b(4, 4);
    b << 1, 0, 0, i1,
         0, i1, 1, 0,
         0, i1, -1, 0,
         1, 0, 0, -i1;
    return b / std::sqrt(2.0);
}

}  // namespace

Mat2 rz(double theta) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::polar(1.0, -theta / 2);
    m(1, 1) = std::polar(1.0, theta / 2);
    return m;
}

Mat2 rx(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat2 m;
    m << c, cplx(0, -s), cplx(0, -s), c;
    return m;
}

Mat2 ry(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

Mat2 letter_matrix(Letter letter) {
    Mat2 m;
    switch (letter) {
        case Letter::I: m << 1, 0, 0, 1; break;
        case Letter::X: m << 0, 1, 1, 0; break;
        case Letter::Y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case Letter::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

Mat2 ZxzxzAngles::matrix() const { return rz(z3) * rx(x2) * rz(z2) * rx(x1) * rz(z1); }

EasyCycle EasyCycle::from_matrices(const std::vector<Mat2>& per_qubit) {
    EasyCycle e;
    e.gates.reserve(per_qubit.size());
    for (const auto& m : per_qubit) e.gates.push_back(zxzxz_angles(m));
    return e;
}

std::vector<Mat2> EasyCycle::matrices() const {
    std::vector<Mat2> out;
    out.reserve(gates.size());
    for (const auto& g : gates) out.push_back(g.matrix());
    return out;
}

std::string HardCycle::signature() const {
    if (cz.empty()) return "idle";
    auto pairs = cz;
    for (auto& p : pairs)
        if (p.a > p.b) std::swap(p.a, p.b);
    std::sort(pairs.begin(), pairs.end());
    std::string s;
    for (const auto& p : pairs) {
        if (!s.empty()) s += '+';
        s += "cz(" + std::to_string(p.a) + "," + std::to_string(p.b) + ")";
    }
    return s;
}

Circuit::Circuit(int n_qubits) : Circuit(n_qubits, {EasyCycle::identity(n_qubits)}, {}) {}

Circuit::Circuit(int n_qubits, std::vector<EasyCycle> easy, std::vector<HardCycle> hard)
    : n_(n_qubits), easy_(std::move(easy)), hard_(std::move(hard)) {
    if (n_ < 1 || n_ > kMaxPauliQubits) throw std::invalid_argument("unsupported circuit width");
    if (easy_.size() != hard_.size() + 1)
        throw std::invalid_argument("circuit must alternate easy/hard cycles and start and end with an easy cycle");
    for (const auto& e : easy_)
        if (static_cast<int>(e.gates.size()) != n_) throw std::invalid_argument("easy cycle width mismatch");
    for (const auto& h : hard_) {
        std::uint32_t used = 0;
        for (const auto& p : h.cz) {
            if (p.a < 0 || p.b < 0 || p.a >= n_ || p.b >= n_ || p.a == p.b)
                throw std::invalid_argument("CZ qubit index out of range");
            const std::uint32_t m = (1u << p.a) | (1u << p.b);
            if (used & m) throw std::invalid_argument("CZ pairs within a hard cycle must be disjoint");
            used |= m;
        }
    }
}

int Circuit::cz_count() const {
    int total = 0;
    for (const auto& h : hard_) total += static_cast<int>(h.cz.size());
    return total;
}

void Circuit::apply_after(int easy_index, const std::vector<Mat2>& gates) {
    auto& e = easy_.at(static_cast<std::size_t>(easy_index));
    if (static_cast<int>(gates.size()) != n_) throw std::invalid_argument("gate layer width mismatch");
    for (int q = 0; q < n_; ++q) e.gates[q] = zxzxz_angles(gates[q] * e.gates[q].matrix());
}

void Circuit::apply_before(int easy_index, const std::vector<Mat2>& gates) {
    auto& e = easy_.at(static_cast<std::size_t>(easy_index));
    if (static_cast<int>(gates.size()) != n_) throw std::invalid_argument("gate layer width mismatch");
    for (int q = 0; q < n_; ++q) e.gates[q] = zxzxz_angles(e.gates[q].matrix() * gates[q]);
}

void Circuit::push_back(const HardCycle& hard, const EasyCycle& easy) {
    Circuit probe(n_, {EasyCycle::identity(n_), easy}, {hard});
    hard_.push_back(hard);
    easy_.push_back(easy);
}

Circuit Circuit::then(const Circuit& next) const {
    if (next.n_ != n_) throw std::invalid_argument("circuit width mismatch");
    auto easy = easy_;
    auto hard = hard_;
    {
        const auto first = next.easy_.front().matrices();
        auto& last = easy.back();
        for (int q = 0; q < n_; ++q) last.gates[q] = zxzxz_angles(first[q] * last.gates[q].matrix());
    }
    easy.insert(easy.end(), next.easy_.begin() + 1, next.easy_.end());
    hard.insert(hard.end(), next.hard_.begin(), next.hard_.end());
    return Circuit(n_, std::move(easy), std::move(hard));
}

std::string Circuit::to_text() const {
    std::string out;
    for (std::size_t i = 0; i < easy_.size(); ++i) {
        out += "easy";
        for (int q = 0; q < n_; ++q) {
            const auto& g = easy_[i].gates[q];
            out += " q" + std::to_string(q) + ":(";
            append_double(out, g.z1);
            out += ',';
            append_double(out, g.x1);
            out += ',';
            append_double(out, g.z2);
            out += ',';
            append_double(out, g.x2);
            out += ',';
            append_double(out, g.z3);
            out += ')';
        }
        out += '\n';
        if (i < hard_.size()) {
            out += "hard";
            for (const auto& p : hard_[i].cz) out += " cz:(" + std::to_string(p.a) + "," + std::to_string(p.b) + ")";
            out += '\n';
        }
    }
    return out;
}

Circuit Circuit::from_text(std::string_view text) {
    std::vector<EasyCycle> easy;
    std::vector<HardCycle> hard;
    int n = -1;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto tokens = split(line, ' ');
        std::erase_if(tokens, [](std::string_view t) { return t.empty(); });
        if (tokens.front() == "easy") {
            EasyCycle e;
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                const auto tok = tokens[t];
                const auto colon = tok.find(':');
                if (tok.size() < 4 || tok[0] != 'q' || colon == std::string_view::npos || tok[colon + 1] != '(' ||
                    tok.back() != ')')
                    throw std::invalid_argument("bad easy-cycle token '" + std::string(tok) + "'");
                if (parse_int(tok.substr(1, colon - 1)) != static_cast<int>(t - 1))
                    throw std::invalid_argument("easy-cycle qubits must be listed in order");
                const auto nums = split(tok.substr(colon + 2, tok.size() - colon - 3), ',');
                if (nums.size() != 5) throw std::invalid_argument("easy-cycle gate needs five angles");
                e.gates.push_back({parse_double(nums[0]), parse_double(nums[1]), parse_double(nums[2]),
                                   parse_double(nums[3]), parse_double(nums[4])});
            }
            if (n < 0) n = static_cast<int>(e.gates.size());
            easy.push_back(std::move(e));
        } else if (tokens.front() == "hard") {
            HardCycle h;
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                const auto tok = tokens[t];
                if (tok.substr(0, 4) != "cz:(" || tok.back() != ')')
                    throw std::invalid_argument("bad hard-cycle token '" + std::string(tok) + "'");
                const auto nums = split(tok.substr(4, tok.size() - 5), ',');
                if (nums.size() != 2) throw std::invalid_argument("cz needs two qubits");
                h.cz.push_back({parse_int(nums[0]), parse_int(nums[1])});
            }
            hard.push_back(std::move(h));
        } else {
            throw std::invalid_argument("unknown circuit line '" + std::string(line) + "'");
        }
    }
    if (n < 1) throw std::invalid_argument("circuit text has no easy cycle");
    return Circuit(n, std::move(easy), std::move(hard));
}

// ---------------------------------------------------------------------------

Matrix haar_random_unitary(int n_qubits, Rng& rng) {
    if (n_qubits < 1 || n_qubits > 4) throw std::invalid_argument("haar_random_unitary supports 1..4 qubits");
    const int d = dim_of(n_qubits);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = cplx(re, im) / std::sqrt(2.0);
        }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const auto rdiag = qr.matrixQR().diagonal();
    for (int j = 0; j < d; ++j) q.col(j) *= rdiag[j] / std::abs(rdiag[j]);
    const cplx det = q.determinant();
    q *= std::polar(1.0, -std::arg(det) / d);
    return q;
}

double unitarity_error(const Matrix& u) {
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double phase_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("shape mismatch");
    const cplx overlap = (b.adjoint() * a).trace();
    const cplx phase = std::abs(overlap) > 1e-300 ? overlap / std::abs(overlap) : cplx(1, 0);
    const Matrix diff = a - phase * b;
    Eigen::JacobiSVD<Matrix> svd(diff);
    return svd.singularValues()[0];
}

ZxzxzAngles zxzxz_angles(const Mat2& v) {
    if (unitarity_error(v) > 1e-8) throw std::invalid_argument("zxzxz_angles: input is not unitary");
    if (std::abs(v(0, 1)) < 1e-14 && std::abs(v(1, 0)) < 1e-14 && std::abs(v(0, 0) - v(1, 1)) < 1e-14) return {};
    const Mat2 s = v / std::sqrt(v.determinant());
    const cplx a = s(0, 0), b = s(1, 0);
    const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    const double sum = std::abs(a) > 1e-15 ? -2.0 * std::arg(a) : 0.0;
    const double diff = std::abs(b) > 1e-15 ? 2.0 * std::arg(b) : 0.0;
    const double phi = 0.5 * (sum + diff);
    const double lambda = 0.5 * (sum - diff);
    // Rz(phi) Ry(theta) Rz(lambda) == Rz(phi) Rx(pi/2) Rz(pi - theta) Rx(pi/2) Rz(lambda - pi) up to phase.
    return {lambda - kPi, kPi / 2, kPi - theta, kPi / 2, phi};
}

Matrix kron_layer(const std::vector<Mat2>& gates) {
    Matrix full = Matrix::Identity(1, 1);
    for (const auto& g : gates) {
        Matrix next(full.rows() * 2, full.cols() * 2);
        for (int i = 0; i < full.rows(); ++i)
            for (int j = 0; j < full.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = full(i, j) * g;
        full = std::move(next);
    }
    return full;
}

Matrix cz_layer(int n_qubits, const HardCycle& hard) {
    const int d = dim_of(n_qubits);
    Matrix m = Matrix::Identity(d, d);
    for (const auto& p : hard.cz) {
        const std::uint32_t mask = qubit_bit(n_qubits, p.a) | qubit_bit(n_qubits, p.b);
        for (int k = 0; k < d; ++k)
            if ((static_cast<std::uint32_t>(k) & mask) == mask) m(k, k) = -m(k, k);
    }
    return m;
}

Matrix net_unitary(const Circuit& c) {
    if (c.n_qubits() > 4) throw std::invalid_argument("net_unitary supports at most 4 qubits");
    Matrix u = Matrix::Identity(dim_of(c.n_qubits()), dim_of(c.n_qubits()));
    for (int i = 0; i <= c.hard_cycle_count(); ++i) {
        u = kron_layer(c.easy(i).matrices()) * u;
        if (i < c.hard_cycle_count()) u = cz_layer(c.n_qubits(), c.hard(i)) * u;
    }
    return u;
}

Circuit kak_decompose(const Matrix& u) {
    if (u.rows() != 4 || u.cols() != 4) throw std::invalid_argument("kak_decompose needs a 4x4 unitary");
    if (unitarity_error(u) > 1e-8) throw std::invalid_argument("kak_decompose: input is not unitary");

    const Matrix un = u * std::polar(1.0, -std::arg(u.determinant()) / 4.0);
    const Matrix b = magic_basis();
    const Matrix ub = b.adjoint() * un * b;
    const Matrix m = ub.transpose() * ub;

    // Re(M) and Im(M) commute; a generic real combination shares their eigenbasis.
    RealMatrix p;
    bool found = false;
    for (double r : {0.5377, 1.8339, -2.2588, 0.8622, 0.3188, -1.3077}) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(m.real() + r * m.imag());
        p = eig.eigenvectors();
        const Matrix dm = p.transpose().cast<cplx>() * m * p.cast<cplx>();
        const Matrix off = dm - Matrix(dm.diagonal().asDiagonal());
        if (off.cwiseAbs().maxCoeff() < 1e-10) {
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("kak_decompose: simultaneous diagonalization failed");
    if (p.determinant() < 0) p.col(0) *= -1.0;

    const Matrix pc = p.cast<cplx>();
    const Eigen::Vector4cd d = (pc.transpose() * m * pc).diagonal();
    Eigen::Vector4d theta;
    for (int k = 0; k < 4; ++k) theta[k] = std::arg(d[k]) / 2.0;
    auto k1_of = [&](const Eigen::Vector4d& th) {
        Eigen::Vector4cd ph;
        for (int k = 0; k < 4; ++k) ph[k] = std::polar(1.0, -th[k]);
        return Matrix(ub * pc * ph.asDiagonal());
    };
    Matrix k1m = k1_of(theta);
    if (k1m.determinant().real() < 0) {
        theta[0] += kPi;
        k1m = k1_of(theta);
    }

    // theta_k = phi + c_xx s_xx[k] + c_yy s_yy[k] + c_zz s_zz[k] with s the magic-basis eigenvalues.
    Eigen::Matrix4d signs;
    const std::array<PauliString, 3> two_body{PauliString::parse("XX"), PauliString::parse("YY"),
                                              PauliString::parse("ZZ")};
    for (int k = 0; k < 4; ++k) signs(k, 0) = 1.0;
    for (int j = 0; j < 3; ++j) {
        const Matrix diag = b.adjoint() * two_body[j].to_matrix() * b;
        for (int k = 0; k < 4; ++k) signs(k, j + 1) = diag(k, k).real();
    }
    const Eigen::Vector4d coeff = signs.fullPivLu().solve(theta);
    const double cxx = coeff[1], cyy = coeff[2], czz = coeff[3];

    const auto [a1, b1] = kron_factor(b * k1m * b.adjoint());
    const auto [a2, b2] = kron_factor(b * pc.transpose() * b.adjoint());

    // exp(i(cxx XX + cyy YY + czz ZZ)) as three CNOTs, each written as H-conjugated CZ.
    const double t1 = -2.0 * czz - kPi / 2, t2 = -2.0 * cxx - kPi / 2, t3 = 2.0 * cyy + kPi / 2;
    const Mat2 h = hadamard();
    std::vector<EasyCycle> easy{
        EasyCycle::from_matrices({h * a2, rz(kPi / 2) * b2}),
        EasyCycle::from_matrices({rz(t1) * h, h * ry(t2)}),
        EasyCycle::from_matrices({h, ry(t3) * h}),
        EasyCycle::from_matrices({a1 * rz(-kPi / 2) * h, b1}),
    };
    std::vector<HardCycle> hard(3, HardCycle{{{0, 1}}});
    Circuit c(2, std::move(easy), std::move(hard));

    const double err = phase_distance(net_unitary(c), u);
    if (err > 1e-8) throw std::runtime_error("kak_decompose: reconstruction error " + std::to_string(err));
    return c;
}

Mat2 measurement_rotation(Letter letter) {
    switch (letter) {
        case Letter::X: return ry(-kPi / 2);
        case Letter::Y: return rx(kPi / 2);
        default: return Mat2::Identity();
    }
}

Mat2 preparation_rotation(Letter letter) {
    switch (letter) {
        case Letter::X: return ry(kPi / 2);
        case Letter::Y: return rx(-kPi / 2);
        default: return Mat2::Identity();
    }
}

Circuit append_measurement_basis(const Circuit& c, const PauliString& q) {
    if (q.is_identity()) throw std::invalid_argument("cannot measure the identity observable");
    if (q.n_qubits() != c.n_qubits()) throw std::invalid_argument("observable width mismatch");
    std::vector<Mat2> gates;
    gates.reserve(static_cast<std::size_t>(c.n_qubits()));
    bool any = false;
    for (int k = 0; k < c.n_qubits(); ++k) {
        const Letter l = q.letter(k);
        any = any || l == Letter::X || l == Letter::Y;
        gates.push_back(measurement_rotation(l));
    }
    Circuit out = c;
    if (any) out.apply_after(c.hard_cycle_count(), gates);
    return out;
}

}  // namespace rcq
