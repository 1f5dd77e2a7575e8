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

#include "chist/framework.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace chist {
namespace {

using testing::xm;
using testing::xp;
using testing::zm;
using testing::zp;

Decomposition zbasis() { return Decomposition({{"zplus", Projector::onto(zp())}, {"zminus", Projector::onto(zm())}}); }
Decomposition xbasis() { return Decomposition({{"xplus", Projector::onto(xp())}, {"xminus", Projector::onto(xm())}}); }

class SpinFamilies : public ::testing::Test {
   protected:
    PropagatorSetPtr ps =
        std::make_shared<const PropagatorSet>(PropagatorSet::trivial("free", TimeGrid::from_values({0, 1, 2, 3}), 2));

    Family make(const std::string &name, std::vector<Decomposition> later) const {
        later.insert(later.begin(), Decomposition());
        return Family(name, ps, later, InitialCondition::pure("zplus", zp()));
    }

    Family f0() const { return make("F0", {zbasis(), zbasis(), zbasis()}); }
    Family f1() const { return make("F1", {xbasis(), xbasis(), xbasis()}); }
    Family f2() const { return make("F2", {zbasis(), xbasis(), xbasis()}); }
};

TEST_F(SpinFamilies, ExtendKeepsWeights) {
    const Family f = f1();
    const Family e = extend(f, {1.5});
    ASSERT_EQ(e.size(), 5u);
    EXPECT_EQ(e.grid().label(2), "t@1.5");
    EXPECT_TRUE(e.decomposition(2).is_trivial());
    const WeightTable a = probabilities(f), b = probabilities(e);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        EXPECT_NEAR(a.entries[i].probability, b.entries[i].probability, 1e-15);
    EXPECT_EQ(support(extend(f0(), {0.5, 2.5})).size(), 1u);
}

TEST_F(SpinFamilies, ExtendRejectsDuplicatesAndTimesBeforeInitial) {
    EXPECT_THROW(extend(f1(), {1.0}), DuplicateTime);
    EXPECT_THROW(extend(f1(), {-1.0}), InvalidValue);
}

TEST_F(SpinFamilies, ExtendCommutes) {
    const Family a = extend(extend(f1(), {0.5}), {2.5});
    const Family b = extend(extend(f1(), {2.5}), {0.5});
    ASSERT_EQ(a.grid(), b.grid());
    for (std::size_t j = 0; j < a.size(); ++j) {
        ASSERT_EQ(a.decomposition(j).size(), b.decomposition(j).size());
        for (std::size_t m = 0; m < a.decomposition(j).size(); ++m)
            EXPECT_LT((a.decomposition(j)[m].projector.op() - b.decomposition(j)[m].projector.op()).norm(), 1e-15);
    }
    for (std::size_t s = 0; s + 1 < a.size(); ++s)
        EXPECT_LT((a.dynamics()->step(s) - b.dynamics()->step(s)).norm(), 1e-15);
}

TEST_F(SpinFamilies, ExtendThenRefineReproducesF2Shape) {
    // z+ at t0, {z} at t1, then extend by t1.5 and refine it with {x}.
    auto grid = TimeGrid::from_values({0, 1, 2});
    auto ps2 = std::make_shared<const PropagatorSet>(PropagatorSet::trivial("free", grid, 2));
    const Family base("base", ps2, {Decomposition(), zbasis(), xbasis()}, InitialCondition::pure("zplus", zp()));
    const Family e = extend(base, {1.5});
    std::vector<Decomposition> decs = e.decompositions();
    decs[2] = xbasis();
    const Family refined("refined", e.dynamics(), decs, e.initial());
    EXPECT_TRUE(is_refinement(base, refined));
    EXPECT_TRUE(consistency_check(refined).consistent);
    EXPECT_EQ(refined.decomposition(1).index_of("zplus"), 0);
    EXPECT_EQ(refined.decomposition(2).index_of("xplus"), 0);
}

TEST_F(SpinFamilies, RefinementExamples) {
    EXPECT_TRUE(is_refinement(f1(), f1()));
    const Family coarse = make("c", {Decomposition(), Decomposition(), Decomposition()});
    EXPECT_TRUE(is_refinement(coarse, f0()));
    EXPECT_FALSE(is_refinement(f0(), coarse));
    EXPECT_FALSE(is_refinement(f0(), f1()));
}

TEST_F(SpinFamilies, RefinementIsTransitive) {
    const Family a = make("a", {Decomposition(), Decomposition(), Decomposition()});
    const Family b = make("b", {zbasis(), Decomposition(), Decomposition()});
    const Family c = make("c", {zbasis(), xbasis(), Decomposition()});
    EXPECT_TRUE(is_refinement(a, b));
    EXPECT_TRUE(is_refinement(b, c));
    EXPECT_TRUE(is_refinement(a, c));
}

TEST_F(SpinFamilies, PropagatorMismatch) {
    Operator had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    auto other = std::make_shared<const PropagatorSet>("had", TimeGrid::from_values({0, 1, 2, 3}),
                                                       std::vector<Operator>{had, had, had});
    const Family g("g", other, {Decomposition(), zbasis(), zbasis(), zbasis()}, InitialCondition::pure("zplus", zp()));
    EXPECT_THROW(is_refinement(f0(), g), PropagatorMismatch);
    EXPECT_THROW(common_refinement(f0(), g), PropagatorMismatch);
}

TEST_F(SpinFamilies, KinematicIncompatibility) {
    const CompatibilityVerdict v = common_refinement(f1(), f2());
    EXPECT_FALSE(v.compatible);
    EXPECT_EQ(v.classification, "kinematic-incompatible");
    ASSERT_TRUE(v.kinematic);
    EXPECT_EQ(v.kinematic->time, "t1");
    // [z+, x+] has Frobenius norm 1/sqrt(2).
    EXPECT_NEAR(v.kinematic->commutator_norm, std::sqrt(0.5), 1e-12);
    EXPECT_EQ(common_refinement(f2(), f1()).classification, "kinematic-incompatible");
    EXPECT_EQ(common_refinement(f0(), f1()).classification, "kinematic-incompatible");
    EXPECT_EQ(common_refinement(f0(), f2()).classification, "kinematic-incompatible");
}

TEST_F(SpinFamilies, IdenticalAndRefinement) {
    const CompatibilityVerdict same = common_refinement(f1(), f1());
    EXPECT_TRUE(same.compatible);
    EXPECT_EQ(same.classification, "identical");
    const CompatibilityVerdict ext = common_refinement(f1(), extend(f1(), {0.5}));
    EXPECT_TRUE(ext.compatible);
    EXPECT_EQ(ext.classification, "refinement");
    EXPECT_EQ(common_refinement(extend(f1(), {0.5}), f1()).classification, "refinement");
}

TEST_F(SpinFamilies, DynamicIncompatibility) {
    const Family f = make("F", {xbasis(), Decomposition(), Decomposition()});
    const Family g = make("G", {Decomposition(), zbasis(), Decomposition()});
    EXPECT_TRUE(consistency_check(f).consistent);
    EXPECT_TRUE(consistency_check(g).consistent);
    const CompatibilityVerdict v = common_refinement(f, g);
    EXPECT_FALSE(v.compatible);
    EXPECT_EQ(v.classification, "dynamic-incompatible");
    ASSERT_TRUE(v.dynamic);
    ASSERT_FALSE(v.dynamic->violations.empty());
    EXPECT_NEAR(v.dynamic->violations.front().overlap, 0.25, 1e-12);
    EXPECT_EQ(common_refinement(g, f).classification, "dynamic-incompatible");
}

TEST_F(SpinFamilies, CommonRefinementFound) {
    const Family f = make("F", {zbasis(), Decomposition(), Decomposition()});
    const Family g = make("G", {Decomposition(), zbasis(), Decomposition()});
    const CompatibilityVerdict v = common_refinement(f, g);
    EXPECT_TRUE(v.compatible);
    EXPECT_EQ(v.classification, "common-refinement-found");
    ASSERT_TRUE(v.refinement);
    EXPECT_TRUE(is_refinement(f, *v.refinement));
    EXPECT_TRUE(is_refinement(g, *v.refinement));
}

TEST_F(SpinFamilies, DifferentInitialStates) {
    const Family g("G", ps, {Decomposition(), zbasis(), zbasis(), zbasis()}, InitialCondition::pure("xplus", xp()));
    const CompatibilityVerdict v = common_refinement(f0(), g);
    EXPECT_EQ(v.classification, "kinematic-incompatible");
    EXPECT_EQ(v.kinematic->time, "t0");
}

TEST_F(SpinFamilies, ProductLabelsUseAmpersand) {
    const Family f = make("F", {zbasis(), Decomposition(), Decomposition()});
    const Family g = make("G", {zbasis(), zbasis(), Decomposition()});
    const Family h = make("H", {Decomposition(), zbasis(), zbasis()});
    const CompatibilityVerdict v = common_refinement(g, h);
    ASSERT_TRUE(v.refinement);
    EXPECT_EQ(v.refinement->decomposition(2)[0].label, "zplus");
    EXPECT_TRUE(is_compatible(f, g));
}

}  // namespace
}  // namespace chist
