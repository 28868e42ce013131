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

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace rcq;

TEST(pauli_string, parse_and_str_round_trip) {
    for (const char* s : {"XIZ", "-YY", "iXZ", "-iZ", "III"}) EXPECT_EQ(PauliString::parse(s).str(), s);
    EXPECT_EQ(PauliString::parse("+XZ").str(), "XZ");
    EXPECT_THROW(PauliString::parse("XQ"), std::invalid_argument);
    EXPECT_THROW(PauliString::parse(""), std::invalid_argument);
}

TEST(pauli_string, index_is_lexicographic_with_qubit0_major) {
    EXPECT_EQ(PauliString::parse("II").index(), 0u);
    EXPECT_EQ(PauliString::parse("IX").index(), 1u);
    EXPECT_EQ(PauliString::parse("XI").index(), 4u);
    EXPECT_EQ(PauliString::parse("ZZ").index(), 15u);
    const auto all = all_paulis(3);
    ASSERT_EQ(all.size(), 64u);
    for (std::uint32_t k = 0; k < 64; ++k) {
        EXPECT_EQ(all[k].index(), k);
        EXPECT_EQ(PauliString::from_index(3, k), all[k]);
    }
}

TEST(pauli_string, matrix_matches_kron_oracle) {
    for (const auto& p : all_paulis(3))
        EXPECT_LT(oracle::max_abs(p.to_matrix() - oracle::pauli(p.letters())), 1e-15) << p.str();
    EXPECT_LT(oracle::max_abs(PauliString::parse("-iXY").to_matrix() - cplx(0, -1) * oracle::pauli("XY")), 1e-15);
}

TEST(pauli_string, product_phase_matches_dense_product) {
    const auto all = all_paulis(2);
    for (const auto& a : all)
        for (const auto& b : all) {
            const auto c = a * b;
            EXPECT_LT(oracle::max_abs(c.to_matrix() - a.to_matrix() * b.to_matrix()), 1e-14) << a.str() << b.str();
            const Matrix ab = a.to_matrix() * b.to_matrix(), ba = b.to_matrix() * a.to_matrix();
            EXPECT_EQ(commutes(a, b), oracle::max_abs(ab - ba) < 1e-12);
        }
    EXPECT_EQ((PauliString::parse("X") * PauliString::parse("Y")).str(), "iZ");
    EXPECT_EQ((PauliString::parse("Y") * PauliString::parse("X")).str(), "-iZ");
    EXPECT_THROW(PauliString::parse("X") * PauliString::parse("XX"), std::invalid_argument);
}

TEST(pauli_string, weight_sign_and_hermiticity) {
    const auto p = PauliString::parse("-XIY");
    EXPECT_EQ(p.weight(), 2);
    EXPECT_EQ(p.sign(), -1);
    EXPECT_TRUE(p.is_hermitian());
    EXPECT_FALSE(PauliString::parse("iX").is_hermitian());
    EXPECT_THROW(PauliString::parse("iX").sign(), std::domain_error);
    EXPECT_EQ(p.letter(2), Letter::Y);
}

TEST(clifford, conjugation_matches_dense_for_every_two_qubit_pauli) {
    std::vector<CliffordGate> gates{CliffordGate::cz(0, 1)};
    for (auto k : {CliffordKind::H, CliffordKind::S, CliffordKind::Sdg, CliffordKind::X, CliffordKind::Y,
                   CliffordKind::Z})
        for (int q = 0; q < 2; ++q) gates.push_back(CliffordGate::single(k, q));
    for (const auto& g : gates) {
        Matrix full = g.kind == CliffordKind::CZ ? oracle::cz(2, 0, 1)
                                                 : oracle::embed(2, g.q0, Eigen::Matrix2cd(g.local_matrix()));
        for (const auto& p : all_paulis(2)) {
            const auto out = conjugate_through(p, g);
            EXPECT_LT(oracle::max_abs(out.to_matrix() - full * p.to_matrix() * full.adjoint()), 1e-14);
            EXPECT_EQ(conjugate_through(out, g.inverse()), p);
        }
    }
    EXPECT_EQ(conjugate_through(PauliString::parse("XY"), CliffordGate::cz(0, 1)).str(), "-YX");
    EXPECT_THROW(conjugate_through(PauliString::parse("XY"), CliffordGate::cz(0, 2)), std::out_of_range);
}

TEST(ptm, pauli_channel_is_diagonal_and_matches_generic_path) {
    PauliChannel ch{2, {{PauliString::parse("XI"), 0.02}, {PauliString::parse("ZZ"), 0.03}}};
    const Ptm fast = ptm_of(ch);
    KrausChannel kraus;
    for (const auto& [p, w] : ch.normalized_terms()) kraus.operators.push_back(std::sqrt(w) * p.to_matrix());
    const Ptm slow = ptm_of(kraus);
    EXPECT_LT((fast.matrix - slow.matrix).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((fast.diagonal() - ch.decay_diagonal()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(fast.matrix(0, 0), 1.0, 1e-15);
    // XI anticommutes with ZI: d = 1 - 2*0.02.
    EXPECT_NEAR(fast.matrix(12, 12), 0.96, 1e-15);
}

TEST(ptm, unitary_ptm_is_orthogonal_and_trace_preserving) {
    Rng rng(7);
    UnitaryChannel u{oracle::expm_herm(oracle::pauli("XY") + 0.3 * oracle::pauli("ZI"), 0.7)};
    const Ptm r = ptm_of(u);
    EXPECT_LT(r.orthogonality_error(), 1e-13);
    EXPECT_LT(r.trace_preservation_error(), 1e-13);
    const Ptm twice = r.after(r);
    UnitaryChannel u2{u.unitary * u.unitary};
    EXPECT_LT((twice.matrix - ptm_of(u2).matrix).cwiseAbs().maxCoeff(), 1e-13);
    const Matrix rho = oracle::random_density(2, rng);
    EXPECT_LT(oracle::max_abs(apply_channel(u, rho) - u.unitary * rho * u.unitary.adjoint()), 1e-14);
}

TEST(ptm, rejects_incomplete_kraus_and_bad_probabilities) {
    KrausChannel bad{{0.9 * Matrix::Identity(2, 2)}};
    EXPECT_THROW(ptm_of(bad), std::invalid_argument);
    PauliChannel over{1, {{PauliString::parse("X"), 0.7}, {PauliString::parse("Z"), 0.6}}};
    EXPECT_THROW(ptm_of(over), std::invalid_argument);
    PauliChannel neg{1, {{PauliString::parse("X"), -0.1}}};
    EXPECT_THROW(ptm_of(neg), std::invalid_argument);
}
