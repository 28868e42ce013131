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

#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace rcq;

namespace {
constexpr double kPi = std::numbers::pi;

double phase_dist2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) { return phase_distance(Matrix(a), Matrix(b)); }
}  // namespace

TEST(gates, rotations_match_exponentials) {
    for (double t : {0.0, 0.3, -1.7, kPi}) {
        EXPECT_LT(oracle::max_abs(Matrix(rz(t)) - oracle::expm_herm(oracle::pauli("Z"), t / 2)), 1e-15);
        EXPECT_LT(oracle::max_abs(Matrix(rx(t)) - oracle::expm_herm(oracle::pauli("X"), t / 2)), 1e-15);
        EXPECT_LT(oracle::max_abs(Matrix(ry(t)) - oracle::expm_herm(oracle::pauli("Y"), t / 2)), 1e-15);
    }
}

TEST(zxzxz, reconstructs_random_and_special_gates) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix v = haar_random_unitary(1, rng);
        const auto ang = zxzxz_angles(v);
        EXPECT_DOUBLE_EQ(ang.x1, kPi / 2);
        EXPECT_DOUBLE_EQ(ang.x2, kPi / 2);
        EXPECT_LT(phase_dist2(ang.matrix(), v), 1e-12);
    }
    for (char c : {'X', 'Y', 'Z'}) EXPECT_LT(phase_dist2(zxzxz_angles(oracle::letter(c)).matrix(), oracle::letter(c)), 1e-12);
    EXPECT_EQ(zxzxz_angles(Eigen::Matrix2cd::Identity()), ZxzxzAngles{});
    EXPECT_EQ(zxzxz_angles(cplx(0, 1) * Eigen::Matrix2cd::Identity()), ZxzxzAngles{});
    EXPECT_THROW(zxzxz_angles(2.0 * Eigen::Matrix2cd::Identity()), std::invalid_argument);
}

TEST(haar, unitary_with_unit_determinant) {
    Rng rng(5);
    for (int n = 1; n <= 3; ++n) {
        const Matrix u = haar_random_unitary(n, rng);
        EXPECT_LT(unitarity_error(u), 1e-13);
        EXPECT_LT(std::abs(u.determinant() - 1.0), 1e-12);
    }
}

TEST(haar, first_moment_matches_haar_average) {
    // E|U_00|^2 = 1/d for Haar measure.
    Rng rng(9);
    double acc = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) acc += std::norm(haar_random_unitary(2, rng)(0, 0));
    EXPECT_NEAR(acc / trials, 0.25, 0.01);
}

TEST(kak, reconstructs_haar_random_two_qubit_unitaries) {
    Rng rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const Matrix u = haar_random_unitary(2, rng);
        const Circuit c = kak_decompose(u);
        EXPECT_EQ(c.cz_count(), 3);
        EXPECT_EQ(c.hard_cycle_count(), 3);
        EXPECT_LT(phase_distance(net_unitary(c), u), 1e-10);
    }
}

TEST(kak, handles_degenerate_inputs) {
    const Matrix cnot = oracle::embed(2, 1, Eigen::Matrix2cd(Matrix(oracle::letter('I')))) * 0.0 +
                        (oracle::pauli("II") + oracle::pauli("ZI") + oracle::pauli("IX") - oracle::pauli("ZX")) / 2.0;
    const std::vector<Matrix> cases{
        Matrix::Identity(4, 4),
        oracle::cz(2, 0, 1),
        cnot,
        oracle::pauli("XY"),
        oracle::expm_herm(oracle::pauli("ZZ"), 0.37),
        oracle::expm_herm(oracle::pauli("XX") + oracle::pauli("YY"), kPi / 4),
        oracle::kron(oracle::expm_herm(oracle::pauli("X"), 0.2), oracle::expm_herm(oracle::pauli("Y"), 1.1)),
    };
    for (const auto& u : cases) EXPECT_LT(phase_distance(net_unitary(kak_decompose(u)), u), 1e-10);
    EXPECT_THROW(kak_decompose(Matrix::Identity(2, 2)), std::invalid_argument);
    EXPECT_THROW(kak_decompose(2.0 * Matrix::Identity(4, 4)), std::invalid_argument);
}

TEST(circuit, validation) {
    EXPECT_THROW(Circuit(2, {EasyCycle::identity(2)}, {HardCycle{{{0, 1}}}}), std::invalid_argument);
    EXPECT_THROW(Circuit(2, {EasyCycle::identity(2), EasyCycle::identity(2)}, {HardCycle{{{0, 2}}}}),
                 std::invalid_argument);
    EXPECT_THROW(Circuit(3, {EasyCycle::identity(3), EasyCycle::identity(3)}, {HardCycle{{{0, 1}, {1, 2}}}}),
                 std::invalid_argument);
    EXPECT_THROW(Circuit(2, {EasyCycle::identity(3)}, {}), std::invalid_argument);
}

TEST(circuit, net_unitary_matches_dense_composition) {
    Rng rng(17);
    Circuit c(3);
    c.apply_after(0, {Mat2(haar_random_unitary(1, rng)), Mat2(haar_random_unitary(1, rng)), Mat2(haar_random_unitary(1, rng))});
    const auto e1 = EasyCycle::from_matrices({Mat2(haar_random_unitary(1, rng)), Mat2(haar_random_unitary(1, rng)),
                                              Mat2(haar_random_unitary(1, rng))});
    c.push_back(HardCycle{{{2, 1}}}, e1);
    Matrix expect = oracle::kron(oracle::kron(Matrix(c.easy(0).gates[0].matrix()), Matrix(c.easy(0).gates[1].matrix())),
                                 Matrix(c.easy(0).gates[2].matrix()));
    expect = oracle::cz(3, 1, 2) * expect;
    expect = oracle::kron(oracle::kron(Matrix(e1.gates[0].matrix()), Matrix(e1.gates[1].matrix())),
                          Matrix(e1.gates[2].matrix())) *
             expect;
    EXPECT_LT(phase_distance(net_unitary(c), expect), 1e-12);
}

TEST(circuit, then_merges_touching_easy_cycles) {
    Rng rng(19);
    const Circuit a = kak_decompose(haar_random_unitary(2, rng));
    const Circuit b = kak_decompose(haar_random_unitary(2, rng));
    const Circuit ab = a.then(b);
    EXPECT_EQ(ab.hard_cycle_count(), 6);
    EXPECT_EQ(ab.easy_cycles().size(), 7u);
    EXPECT_LT(phase_distance(net_unitary(ab), net_unitary(b) * net_unitary(a)), 1e-10);
}

TEST(circuit, text_round_trip_is_bit_exact) {
    Rng rng(23);
    const Circuit c = kak_decompose(haar_random_unitary(2, rng)).then(kak_decompose(haar_random_unitary(2, rng)));
    const std::string text = c.to_text();
    EXPECT_EQ(Circuit::from_text(text), c);
    EXPECT_EQ(Circuit::from_text(text).to_text(), text);
    EXPECT_THROW(Circuit::from_text("easy q0:(1,2,3)\n"), std::invalid_argument);
    EXPECT_THROW(Circuit::from_text("bogus\n"), std::invalid_argument);
    EXPECT_THROW(Circuit::from_text(""), std::invalid_argument);
}

TEST(measurement, rotation_maps_letter_to_z_frame) {
    for (char c : {'X', 'Y', 'Z'}) {
        const Letter l = c == 'X' ? Letter::X : c == 'Y' ? Letter::Y : Letter::Z;
        const Matrix r = measurement_rotation(l);
        // Measuring Z after r is measuring the letter before it.
        EXPECT_LT(oracle::max_abs(r.adjoint() * oracle::pauli("Z") * r - oracle::pauli(std::string(1, c))), 1e-14);
        const Matrix p = preparation_rotation(l);
        Vector zero = Vector::Zero(2);
        zero[0] = 1;
        const Vector s = p * zero;
        EXPECT_NEAR((s.adjoint() * oracle::pauli(std::string(1, c)) * s)(0, 0).real(), 1.0, 1e-14);
    }
}

TEST(measurement, append_basis_changes_expectation_frame) {
    Rng rng(29);
    const Circuit c = kak_decompose(haar_random_unitary(2, rng));
    const auto q = PauliString::parse("XY");
    const Circuit m = append_measurement_basis(c, q);
    const Matrix u = net_unitary(c), um = net_unitary(m);
    Vector psi = Vector::Zero(4);
    psi[0] = 1;
    const Vector a = u * psi, b = um * psi;
    const double direct = (a.adjoint() * oracle::pauli("XY") * a)(0, 0).real();
    const double framed = (b.adjoint() * oracle::pauli("ZZ") * b)(0, 0).real();
    EXPECT_NEAR(direct, framed, 1e-12);
    EXPECT_THROW(append_measurement_basis(c, PauliString::parse("II")), std::invalid_argument);
}
