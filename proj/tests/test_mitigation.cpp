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

#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rcq/rc.hpp"

using namespace rcq;

namespace {

ExpectationSet one_qubit(double x, double y, double z) {
    ExpectationSet e(1);
    e.set(PauliString::parse("X"), x);
    e.set(PauliString::parse("Y"), y);
    e.set(PauliString::parse("Z"), z);
    return e;
}

DensityMatrix random_pure(int n, Rng& rng) { return DensityMatrix::from_pure(haar_random_unitary(n, rng).col(0)); }

DensityMatrix depolarize(const DensityMatrix& rho, double lambda) {
    const int d = dim_of(rho.n_qubits());
    return DensityMatrix(rho.n_qubits(), lambda * rho.matrix() + (1 - lambda) * Matrix::Identity(d, d) / double(d));
}

}  // namespace

TEST(expectation_set, keys_signs_and_provenance) {
    ExpectationSet e(2);
    e.set(PauliString::parse("-XZ"), 0.4);
    EXPECT_DOUBLE_EQ(e.value(PauliString::parse("XZ")), -0.4);
    EXPECT_DOUBLE_EQ(e.value(PauliString::parse("-XZ")), 0.4);
    e.set_symmetry_zero(PauliString::parse("YY"));
    e.set(PauliString::parse("ZX"), -0.4, Provenance::SymmetryPartner);
    EXPECT_EQ(e.provenance(PauliString::parse("ZX")), Provenance::SymmetryPartner);
    EXPECT_THROW(e.set(PauliString::parse("XX"), 0.1, Provenance::SymmetryZero), std::invalid_argument);
    EXPECT_EQ(e.provenance(PauliString::parse("YY")), Provenance::SymmetryZero);
    EXPECT_FALSE(e.complete());
    EXPECT_THROW(e.set(PauliString::parse("II"), 1.0), std::invalid_argument);
    EXPECT_THROW(e.set(PauliString::parse("ZZ"), 1.2), std::invalid_argument);
    EXPECT_NO_THROW(e.set(PauliString::parse("ZZ"), 1.05));
    EXPECT_THROW(e.value(PauliString::parse("IX")), std::out_of_range);
    std::ostringstream csv;
    e.write_csv(csv);
    EXPECT_NE(csv.str().find("YY,0,symmetry_zero"), std::string::npos);
}

TEST(bloch_length, examples) {
    EXPECT_DOUBLE_EQ(bloch_length(one_qubit(0, 0, 1)), 1.0);
    EXPECT_NEAR(bloch_length(one_qubit(0, 0, 0.9)), 0.9, 1e-15);
    Rng rng(401);
    for (int n = 1; n <= 3; ++n) EXPECT_NEAR(bloch_length(ExpectationSet::from_state(random_pure(n, rng))), 1.0, 1e-10);
    EXPECT_THROW(bloch_length(one_qubit(0, 0, 0)), std::domain_error);
    ExpectationSet partial(2);
    partial.set(PauliString::parse("ZZ"), 1.0);
    EXPECT_THROW(bloch_length(partial), std::invalid_argument);
    for (const auto& p : all_paulis(2))
        if (!p.is_identity() && !partial.contains(p)) partial.set_symmetry_zero(p);
    EXPECT_NEAR(bloch_length(partial), std::sqrt(1.0 / 3.0), 1e-15);
}

TEST(rescale, examples_and_idempotence) {
    const auto up = rescale(one_qubit(0, 0, 0.9));
    EXPECT_NEAR(up.value(PauliString::parse("Z")), 1.0, 1e-15);
    Rng rng(403);
    const auto pure = ExpectationSet::from_state(random_pure(2, rng));
    const auto same = rescale(pure);
    for (const auto& [p, e] : pure.entries()) EXPECT_DOUBLE_EQ(same.value(p), e.value);
    const auto shrunk = ExpectationSet::from_state(depolarize(random_pure(2, rng), 0.8));
    const auto once = rescale(shrunk);
    EXPECT_NEAR(bloch_length(once), 1.0, 1e-12);
    const auto twice = rescale(once);
    for (const auto& [p, e] : once.entries()) EXPECT_DOUBLE_EQ(twice.value(p), e.value);
    EXPECT_THROW(rescale(one_qubit(0, 0, 0.01)), std::domain_error);
}

TEST(rescale, clips_inputs_but_not_outputs) {
    const auto out = rescale(one_qubit(0.0, 0.3, 1.05));
    const double length = std::sqrt(0.09 + 1.0);
    EXPECT_NEAR(out.value(PauliString::parse("Z")), 1.0 / length, 1e-15);
    const auto big = rescale(one_qubit(0.0, 0.0, 0.5));
    EXPECT_NEAR(big.value(PauliString::parse("Z")), 1.0, 1e-15);
}

TEST(rescale, output_may_exceed_the_input_cap) {
    const DensityMatrix rho(2, oracle::kron(oracle::letter('I') + oracle::letter('Z'), oracle::letter('I')) / 4.0);
    const auto out = rescale(ExpectationSet::from_state(rho));
    EXPECT_NEAR(out.value(PauliString::parse("ZI")), std::sqrt(3.0), 1e-12);
}

TEST(rescale, keeps_symmetry_zeros) {
    ExpectationSet e(2);
    for (const auto& p : all_paulis(2))
        if (!p.is_identity()) e.set_symmetry_zero(p);
    e.set(PauliString::parse("ZI"), 0.5);
    e.set(PauliString::parse("IZ"), 0.5);
    e.set(PauliString::parse("ZZ"), 0.5);
    const auto out = rescale(e);
    EXPECT_EQ(out.provenance(PauliString::parse("XX")), Provenance::SymmetryZero);
    EXPECT_NEAR(out.value(PauliString::parse("ZZ")), 1.0, 1e-15);
}

TEST(rescale, recovers_ideal_values_under_depolarizing_backend) {
    const double p = 0.05;
    NoiseModel model(2);
    PauliChannel dep{2, {}};
    for (const auto& q : all_paulis(2))
        if (!q.is_identity()) dep.terms.emplace_back(q, p / 16.0);
    model.set_default(CycleNoise{{}, {dep}});
    const SimulatorBackend backend(model);
    Rng rng(405);
    const Circuit c = kak_decompose(haar_random_unitary(2, rng));
    const auto ideal = ExpectationSet::from_state(SimulatorBackend::ideal(2).state(c));
    const std::uint64_t shots = 200000;
    ExpectationSet measured(2);
    for (const auto& q : all_paulis(2))
        if (!q.is_identity()) measured.set(q, estimate_expectation(backend.run(c, q, shots, rng)));
    const auto fixed = rescale(measured);
    for (const auto& [q, e] : ideal.entries()) {
        const double se = std::sqrt((1 - e.value * e.value) / shots) / std::pow(1 - p, 3) + 1e-4;
        EXPECT_NEAR(fixed.value(q), e.value, 4 * se) << q.str();
    }
}

TEST(mcweeny, scalar_step_and_convergence) {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.9;
    rho(1, 1) = 0.1;
    const Matrix step = mcweeny_step(rho);
    EXPECT_NEAR(step(0, 0).real(), 0.972, 1e-15);
    EXPECT_NEAR(step(1, 1).real(), 0.028, 1e-15);
    const auto res = mcweeny(DensityMatrix::from_matrix(rho));
    EXPECT_TRUE(res.converged);
    EXPECT_TRUE(res.error.empty());
    EXPECT_NEAR(res.rho.matrix()(0, 0).real(), 1.0, 1e-10);
    EXPECT_GT(res.iterations, 0);
}

TEST(mcweeny, pure_input_is_a_fixed_point) {
    Rng rng(407);
    const auto pure = random_pure(3, rng);
    const auto res = mcweeny(pure);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 0);
    EXPECT_EQ(res.rho.matrix(), pure.matrix());
}

TEST(mcweeny, degenerate_input_is_refused) {
    const auto mixed = DensityMatrix::maximally_mixed(1);
    const auto res = mcweeny(mixed);
    EXPECT_FALSE(res.converged);
    EXPECT_FALSE(res.error.empty());
    EXPECT_EQ(res.rho.matrix(), mixed.matrix());
}

TEST(mcweeny, output_is_pure_and_closer_to_dominant_eigenvector) {
    Rng rng(409);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + t % 3;
        const DensityMatrix rho(n, oracle::random_density(n, rng));
        const auto res = mcweeny(rho);
        ASSERT_TRUE(res.converged) << res.error;
        EXPECT_NO_THROW(res.rho.check());
        EXPECT_NEAR(purity(res.rho), 1.0, 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.matrix());
        const auto top = DensityMatrix::from_pure(eig.eigenvectors().col(eig.eigenvectors().cols() - 1));
        EXPECT_GE(fidelity(res.rho, top), fidelity(rho, top) - 1e-12);
        EXPECT_NEAR(fidelity(res.rho, top), 1.0, 1e-9);
    }
}

TEST(angle_error, examples) {
    const auto sigma0 = one_qubit(0, 0, 1);
    EXPECT_NEAR(angle_error(one_qubit(0, 0, 0.7), sigma0), 1.0, 1e-15);
    EXPECT_NEAR(angle_error(one_qubit(0, 0, 0.7), one_qubit(0, 0, -1)), -1.0, 1e-15);
    Rng rng(411);
    const auto pure = random_pure(2, rng);
    EXPECT_NEAR(angle_error(ExpectationSet::from_state(depolarize(pure, 0.6)), ExpectationSet::from_state(pure)), 1.0, 1e-10);
    EXPECT_THROW(angle_error(one_qubit(0, 0, 0.01), sigma0), std::domain_error);
    EXPECT_THROW(angle_error(one_qubit(0, 0, 0.7), one_qubit(0, 0, 0.5)), std::invalid_argument);
}

TEST(angle_error, length_angle_identity_reproduces_fidelity) {
    Rng rng(413);
    for (int t = 0; t < 30; ++t) {
        const int n = 1 + t % 3;
        const DensityMatrix rho(n, oracle::random_density(n, rng));
        const auto sigma = random_pure(n, rng);
        const auto er = ExpectationSet::from_state(rho), es = ExpectationSet::from_state(sigma);
        const double floor = 1.0 / dim_of(n);
        const double reconstructed = floor + (1 - floor) * bloch_length(er) * angle_error(er, es, 0.0);
        EXPECT_NEAR(reconstructed, fidelity(rho, sigma), 1e-9);
        EXPECT_NEAR(fidelity_from_expectations(er, es), fidelity(rho, sigma), 1e-12);
    }
}
