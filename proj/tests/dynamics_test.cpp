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

#include "chist/dynamics.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"

namespace chist {
namespace {

using testing::random_hermitian;
using testing::random_unitary;

TEST(TimeGrid, RejectsUnorderedAndDuplicate) {
    EXPECT_THROW(TimeGrid::from_values({0, 2, 1}), InvalidValue);
    EXPECT_THROW(TimeGrid::from_values({0, 1, 1}), DuplicateTime);
    EXPECT_THROW(TimeGrid::from_values({}), InvalidValue);
    EXPECT_EQ(TimeGrid::from_values({0, 1}).label(1), "t1");
}

TEST(Hamiltonian, ZeroGivesIdentity) {
    EXPECT_LT((propagator_from_hamiltonian(Operator::Zero(3, 3), 4.0, 1.0) - identity(3)).norm(), 1e-15);
}

TEST(Hamiltonian, SigmaZOverPi) {
    Operator sz(2, 2);
    sz << 1, 0, 0, -1;
    const Operator t = propagator_from_hamiltonian(sz, std::numbers::pi, 0.0);
    EXPECT_LT((t + identity(2)).norm(), 1e-14);
}

TEST(Hamiltonian, Composition) {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 10; ++rep) {
        const Operator h = random_hermitian(rng, 3);
        const Operator a = propagator_from_hamiltonian(h, 1.3, 0.2);
        const Operator b = propagator_from_hamiltonian(h, 2.9, 1.3);
        const Operator c = propagator_from_hamiltonian(h, 2.9, 0.2);
        EXPECT_LT((b * a - c).norm(), 1e-10);
        // Direct comparison with the series exponential.
        const Operator direct = (Complex(0, -2.7) * h).exp();
        EXPECT_LT((c - direct).norm(), 1e-10);
    }
}

TEST(Hamiltonian, RejectsNonHermitian) {
    Operator h(2, 2);
    h << 0, 1, 0, 0;
    EXPECT_THROW(propagator_from_hamiltonian(h, 1, 0), InvalidValue);
}

PropagatorSet random_set(std::mt19937_64 &rng, std::size_t n, Eigen::Index d) {
    std::vector<Operator> steps;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(static_cast<double>(i));
    for (std::size_t i = 0; i + 1 < n; ++i) steps.push_back(random_unitary(rng, d));
    return PropagatorSet("random", TimeGrid::from_values(values), steps);
}

TEST(PropagatorSet, Definitions) {
    std::mt19937_64 rng(22);
    const PropagatorSet ps = random_set(rng, 4, 3);
    EXPECT_LT((ps.propagator(2, 2) - identity(3)).norm(), 1e-15);
    EXPECT_LT((ps.propagator(2, 0) - ps.step(1) * ps.step(0)).norm(), 1e-14);
    EXPECT_LT((ps.propagator(0, 2) - ps.propagator(2, 0).adjoint()).norm(), 1e-14);
    EXPECT_THROW(ps.propagator(4, 0), IndexOutOfRange);
}

TEST(PropagatorSet, GroupoidLaws) {
    std::mt19937_64 rng(23);
    const PropagatorSet ps = random_set(rng, 6, 3);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            EXPECT_LT((ps.propagator(i, j).adjoint() - ps.propagator(j, i)).norm(), 1e-10);
            for (std::size_t k = 0; k < 6; ++k)
                EXPECT_LT((ps.propagator(i, j) * ps.propagator(j, k) - ps.propagator(i, k)).norm(), 1e-10);
        }
}

TEST(PropagatorSet, RejectsNonUnitaryStep) {
    Operator s(2, 2);
    s << 1, 0, 0, 2;
    EXPECT_THROW(PropagatorSet("bad", TimeGrid::from_values({0, 1}), {s}), InvalidValue);
}

TEST(Heisenberg, TrivialDynamicsIsIdentityMap) {
    const PropagatorSet ps = PropagatorSet::trivial("id", TimeGrid::from_values({0, 1, 2}), 2);
    const Projector p = Projector::onto(testing::xp());
    EXPECT_LT((heisenberg(p, ps, 2, 0).op() - p.op()).norm(), 1e-15);
}

TEST(Heisenberg, PreservesProjectorProperties) {
    std::mt19937_64 rng(24);
    for (int rep = 0; rep < 100; ++rep) {
        const PropagatorSet ps = random_set(rng, 3, 4);
        const Projector p = projector_onto_span({testing::random_ket(rng, 4), testing::random_ket(rng, 4)});
        const Projector h = heisenberg(p, ps, 2, 0);
        EXPECT_TRUE(is_projector(h.op()).ok);
        EXPECT_EQ(h.rank(), p.rank());
    }
}

TEST(Heisenberg, HadamardExchangesZAndX) {
    Operator had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    const PropagatorSet ps("had", TimeGrid::from_values({0, 1}), {had});
    const Projector zp = Projector::onto(testing::zp());
    EXPECT_LT((heisenberg(zp, ps, 1, 0).op() - outer(testing::xp(), testing::xp())).norm(), 1e-15);
}

TEST(Heisenberg, DimensionMismatch) {
    const PropagatorSet ps = PropagatorSet::trivial("id", TimeGrid::from_values({0, 1}), 2);
    EXPECT_THROW(heisenberg(Projector::identity(3), ps, 1, 0), DimensionMismatch);
}

}  // namespace
}  // namespace chist
