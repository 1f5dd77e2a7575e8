// Copyright 2026 The chist Authors
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

#include "chist/hilbert.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace chist {
namespace {

using testing::random_ket;
using testing::random_operator;
using testing::xm;
using testing::xp;
using testing::zm;
using testing::zp;

TEST(TensorProduct, IdentityTimesIdentity) {
    EXPECT_LT((tensor_product(identity(2), identity(2)) - identity(4)).norm(), 1e-15);
}

TEST(TensorProduct, RankMultiplies) {
    const Projector p = tensor_product(Projector::onto(zp()), Projector::identity(3));
    EXPECT_EQ(p.rank(), 3);
}

TEST(TensorProduct, IndexExpansionOracle) {
    std::mt19937_64 rng(7);
    const Operator a = random_operator(rng, 2);
    const Operator b = random_operator(rng, 3);
    const Operator c = tensor_product(a, b);
    ASSERT_EQ(c.rows(), 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) EXPECT_EQ(c(i * 3 + k, j * 3 + l), a(i, j) * b(k, l));
    EXPECT_EQ(c(3, 4), a(1, 1) * b(0, 1));
}

TEST(TensorProduct, Associative) {
    std::mt19937_64 rng(8);
    const Operator a = random_operator(rng, 2), b = random_operator(rng, 3), c = random_operator(rng, 2);
    EXPECT_LT((tensor_product(tensor_product(a, b), c) - tensor_product(a, tensor_product(b, c))).norm(), 1e-14);
}

TEST(TensorProduct, RejectsNonFinite) {
    Operator a = identity(2);
    a(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(tensor_product(a, identity(2)), NotFinite);
}

TEST(OpInner, TraceOfIdentity) { EXPECT_NEAR(op_inner(identity(5), identity(5)).real(), 5.0, 1e-15); }

TEST(OpInner, SpinProjectorsGiveOneHalf) {
    const Complex v = op_inner(outer(zp(), zp()), outer(xp(), xp()));
    EXPECT_NEAR(v.real(), 0.5, 1e-15);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(OpInner, ConjugateSymmetryAndBruteForce) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Operator a = random_operator(rng, 4), b = random_operator(rng, 4);
        Complex brute;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) brute += std::conj(a(i, j)) * b(i, j);
        EXPECT_LT(std::abs(op_inner(a, b) - brute), 1e-12);
        EXPECT_LT(std::abs(op_inner(a, b) - std::conj(op_inner(b, a))), 1e-12);
        const Complex aa = op_inner(a, a);
        EXPECT_GE(aa.real(), 0.0);
        EXPECT_LT(std::abs(aa.imag()), 1e-12 * a.squaredNorm());
    }
}

TEST(OpInner, DimensionMismatch) { EXPECT_THROW(op_inner(identity(2), identity(3)), DimensionMismatch); }

TEST(RhoInner, MaximallyMixedReduces) {
    std::mt19937_64 rng(3);
    const Operator a = random_operator(rng, 3), b = random_operator(rng, 3);
    const Complex v = rho_inner(DensityOperator::maximally_mixed(3), a, b);
    EXPECT_LT(std::abs(v - op_inner(a, b) / 3.0), 1e-13);
}

TEST(RhoInner, PureStateExpansion) {
    std::mt19937_64 rng(4);
    const Ket psi = random_ket(rng, 3);
    const Operator a = random_operator(rng, 3), b = random_operator(rng, 3);
    // <psi| a^dagger b |psi> written out index by index.
    Complex want;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) want += std::conj(psi(i)) * std::conj(a(k, i)) * b(k, l) * psi(l);
    EXPECT_LT(std::abs(rho_inner(DensityOperator::pure(psi), a, b) - want), 1e-12);
}

TEST(RhoInner, UnitTrace) {
    std::mt19937_64 rng(5);
    const DensityOperator rho = DensityOperator::pure(random_ket(rng, 4));
    EXPECT_NEAR(rho_inner(rho, identity(4), identity(4)).real(), 1.0, 1e-14);
}

TEST(IsProjector, Examples) {
    EXPECT_TRUE(is_projector(identity(2)).ok);
    EXPECT_TRUE(is_projector(outer(zp(), zp())).ok);
    Operator x(2, 2);
    x << 0, 1, 1, 0;
    const ProjectorCheck c = is_projector(x);
    EXPECT_FALSE(c.ok);
    EXPECT_NEAR(c.idempotency_defect, (x - identity(2)).norm(), 1e-15);
    EXPECT_NEAR(c.hermiticity_defect, 0.0, 1e-15);
}

TEST(Projector, RejectsNonProjector) {
    Operator x(2, 2);
    x << 0, 1, 1, 0;
    EXPECT_THROW(Projector{x}, InvalidValue);
}

TEST(Decomposition, Examples) {
    const Decomposition z({{"zplus", Projector::onto(zp())}, {"zminus", Projector::onto(zm())}});
    EXPECT_TRUE(validate_decomposition(z).valid);

    const Decomposition bad({{"zplus", Projector::onto(zp())}, {"xminus", Projector::onto(xm())}});
    const DecompositionReport r = validate_decomposition(bad);
    EXPECT_FALSE(r.valid);
    // Direct sum: zplus + xminus = [[1.5,-0.5],[-0.5,0.5]], minus I = [[.5,-.5],[-.5,-.5]].
    EXPECT_NEAR(r.completeness_defect, 1.0, 1e-12);
    EXPECT_GT(r.completeness_defect, 0.5);
    EXPECT_THROW(make_decomposition(bad.members()), InvalidValue);

    EXPECT_TRUE(validate_decomposition(trivial_decomposition(2)).valid);
}

TEST(Decomposition, SplittingAMemberStaysValid) {
    std::mt19937_64 rng(9);
    const Ket a = random_ket(rng, 4);
    Ket b = random_ket(rng, 4);
    b -= a.dot(b) * a;
    b /= b.norm();
    const Projector pa = Projector::onto(a), pb = Projector::onto(b);
    const Projector both = projector_onto_span({a, b});
    const Decomposition coarse({{"ab", both}, {"rest", both.complement()}});
    const Decomposition fine({{"a", pa}, {"b", pb}, {"rest", both.complement()}});
    EXPECT_TRUE(validate_decomposition(coarse).valid);
    EXPECT_TRUE(validate_decomposition(fine).valid);
}

TEST(Decomposition, DuplicateLabelsRejected) {
    const Decomposition d({{"a", Projector::onto(zp())}, {"a", Projector::onto(zm())}});
    EXPECT_FALSE(validate_decomposition(d).valid);
}

TEST(ProjectorOntoSpan, Examples) {
    EXPECT_LT((projector_onto_span({zp()}).op() - outer(zp(), zp())).norm(), 1e-15);
    EXPECT_LT((projector_onto_span({zp(), zm()}).op() - identity(2)).norm(), 1e-15);
    const Projector p = projector_onto_span({zp(), xp()});
    EXPECT_EQ(p.rank(), 2);
    EXPECT_LT((p.op() - identity(2)).norm(), 1e-14);
}

TEST(ProjectorOntoSpan, DependentKetsAndZeroInput) {
    EXPECT_EQ(projector_onto_span({zp(), 2.0 * zp(), Ket(-zp())}).rank(), 1);
    EXPECT_THROW(projector_onto_span({Ket::Zero(2)}), InvalidValue);
    EXPECT_THROW(projector_onto_span({}), InvalidValue);
}

TEST(DensityOperator, Validation) {
    EXPECT_THROW(DensityOperator(identity(2)), InvalidValue);
    Operator neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    EXPECT_THROW(DensityOperator{neg}, InvalidValue);
    EXPECT_NO_THROW(DensityOperator::maximally_mixed(2));
}

}  // namespace
}  // namespace chist
