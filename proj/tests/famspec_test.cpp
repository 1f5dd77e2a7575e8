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

#include "chist/famspec.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "chist/scenarios.hpp"
#include "test_util.hpp"

namespace chist {
namespace {

using famspec::parse;
using famspec::serialize;

const char *kMinimal = R"(# spin half, free evolution
space q dim 2
ket z+ in q = [1, 0]
ket z- in q = [0, 1]
proj Pz+ on q = span(z+)
proj Pz- on q = span(z-)
decomp Z on q = {Pz+ as zplus, Pz- as zminus}
times grid = [0, 1, 2]
family F0 times grid initial z+ as zplus {
  at 0: identity
  at 1: Z
  at 2: Z
} steps { identity identity }
)";

std::string read(const std::string &path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

famspec::Diagnostic error_of(const std::string &text) {
    const famspec::ParseResult r = parse(text);
    EXPECT_FALSE(r.ok()) << text;
    if (r.ok()) return {};
    EXPECT_EQ(r.diagnostics.size(), 1u);
    return r.diagnostics.front();
}

TEST(Parse, MinimalDocumentMatchesHandBuiltFamily) {
    const famspec::Program p = famspec::load(kMinimal);
    const Family &f = p.family("F0");
    ASSERT_EQ(f.size(), 3u);

    const Decomposition z({{"zplus", Projector::onto(testing::zp())}, {"zminus", Projector::onto(testing::zm())}});
    const auto ps = std::make_shared<const PropagatorSet>(
        PropagatorSet::trivial("free", TimeGrid::from_values({0, 1, 2}), 2));
    const Family hand("F0", ps, {Decomposition(), z, z}, InitialCondition::pure("zplus", testing::zp()));

    const WeightTable a = weights(f), b = weights(hand);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].label, b.entries[i].label);
        EXPECT_NEAR(a.entries[i].weight, b.entries[i].weight, 1e-15);
    }
    EXPECT_NEAR(probabilities(f).probability("zplus/zplus/zplus"), 1.0, 1e-15);
}

TEST(Parse, ComplexLiterals) {
    const famspec::Program p = famspec::load(
        "space s dim 6\n"
        "ket k in s = [1, -0.5i, 0.7071+0.7071i, i, -i, 1e-3-2.5e2i]\n");
    const Ket &k = p.kets.at("k");
    EXPECT_EQ(k(0), Complex(1, 0));
    EXPECT_EQ(k(1), Complex(0, -0.5));
    EXPECT_EQ(k(2), Complex(0.7071, 0.7071));
    EXPECT_EQ(k(3), Complex(0, 1));
    EXPECT_EQ(k(4), Complex(0, -1));
    EXPECT_EQ(k(5), Complex(1e-3, -250));
}

TEST(Parse, MatricesAcceptBlanksOrCommas) {
    const famspec::Program p = famspec::load(
        "space s dim 2\n"
        "unitary A on s = [[0 1] [1 0]]\n"
        "unitary B on s = [\n  [0, 1],\n  [1, 0]\n]\n");
    EXPECT_EQ(p.unitaries.at("A"), p.unitaries.at("B"));
}

TEST(Parse, NonUnitaryMatrixReportsDefectAndPosition) {
    const famspec::Diagnostic d = error_of("space q dim 2\n\n   unitary U on q = [[1,0],[0,2]]\n");
    EXPECT_NE(d.message.find("non-unitary"), std::string::npos) << d.message;
    EXPECT_NE(d.message.find("defect 3"), std::string::npos) << d.message;
    EXPECT_NE(d.message.find("threshold 1e-09"), std::string::npos) << d.message;
    EXPECT_EQ(d.line, 3);
    EXPECT_EQ(d.column, 4);
}

TEST(Parse, SyntaxErrorsCarryPositions) {
    famspec::Diagnostic d = error_of("space q dim 2\nket a in q [1, 0]\n");
    EXPECT_EQ(d.line, 2);
    EXPECT_EQ(d.column, 12);
    EXPECT_NE(d.message.find("expected '='"), std::string::npos);

    d = error_of("space q dim\n");
    EXPECT_EQ(d.line, 2);
    EXPECT_NE(d.message.find("expected an integer"), std::string::npos);

    d = error_of("spaces q dim 2\n");
    EXPECT_EQ(d.line, 1);
    EXPECT_EQ(d.column, 1);

    d = error_of("space q dim 2 space r dim 2\n");
    EXPECT_EQ(d.column, 15);
    EXPECT_NE(d.message.find("after the declaration"), std::string::npos);

    d = error_of("space q dim 2\nunitary U on q = [[1, 0], [0]]\n");
    EXPECT_EQ(d.line, 2);
    EXPECT_EQ(d.column, 27);
    EXPECT_NE(d.message.find("row 2"), std::string::npos);

    d = error_of("space q dim 2\nket a in q = [1, 1e999]\n");
    EXPECT_NE(d.message.find("out of range"), std::string::npos);
}

TEST(Parse, ColumnsCountCodePoints) {
    const famspec::Diagnostic d = error_of("# \xc3\xa9t\xc3\xa9\nspace \xc3\xa9 dim 2\n");
    EXPECT_EQ(d.line, 2);
    EXPECT_EQ(d.column, 7);
}

TEST(Parse, SemanticErrors) {
    struct Case {
        std::string text;
        std::string needle;
        int line;
    };
    const std::string head = "space q dim 2\nket a in q = [1, 0]\nket b in q = [0, 1]\nproj A on q = span(a)\n";
    const std::vector<Case> cases = {
        {"ket a in r = [1, 0]\n", "undefined name 'r'", 1},
        {"space q dim 2\nket a in q = [1, 0, 0]\n", "dimension mismatch", 2},
        {"space q dim 0\n", "must be positive", 1},
        {"space q dim 99999\n", "too large", 1},
        {head + "decomp D on q = {A}\n", "incomplete decomposition", 5},
        {head + "proj B on q = span(a, b)\ndecomp D on q = {A, B}\n", "incomplete decomposition", 6},
        {head + "proj A on q = span(b)\n", "already declared", 5},
        {head + "proj P on q = [[1, 1], [0, 0]]\n", "not a projector", 5},
        {head + "decomp D on q = {a}\n", "'a' is a ket, expected a projector", 5},
        {"space q dim 2\nket z in q = [0, 0]\n", "is zero", 2},
        {"times g = [0, 1, 1]\n", "repeats", 1},
        {head + "proj B on q = span(b)\ndecomp D on q = {A, B}\ntimes g = [0, 1]\n"
                "family F times g initial a {\n  at 2: D\n} steps { identity }\n",
         "not in grid", 9},
        {head + "proj B on q = span(b)\ndecomp D on q = {A, B}\ntimes g = [0, 1]\n"
                "family F times g initial a {\n  at 1: D\n  at 1: D\n} steps { identity }\n",
         "assigned twice", 10},
        {head + "times g = [0, 1]\nfamily F times g initial a { } steps { }\n", "needs 1 steps", 6},
        {"times g = [0, 1]\nfamily F times g { } steps { identity }\n", "cannot infer the space", 2},
        {"space q dim 2\nket a in q = [1, 1]\ntimes g = [0]\nfamily F times g initial a { } steps { }\n",
         "unit norm", 4},
        {"space q dim 2\nket identity in q = [1, 0]\n", "reserved", 2},
        {"space q dim 2\ndensity r on q = [[1, 0], [0, 1]]\n", "trace", 2},
    };
    for (const Case &c : cases) {
        const famspec::Diagnostic d = error_of(c.text);
        EXPECT_NE(d.message.find(c.needle), std::string::npos) << c.text << "\n-> " << d.message;
        EXPECT_EQ(d.line, c.line) << c.text << "\n-> " << d.to_string();
        EXPECT_GE(d.column, 1);
    }
}

TEST(Parse, LoadThrowsSpecError) {
    try {
        famspec::load("space q dim 2\nunitary U on q = [[2, 0], [0, 1]]\n");
        FAIL() << "expected SpecError";
    } catch (const famspec::SpecError &e) {
        EXPECT_EQ(e.diagnostic().line, 2);
        EXPECT_NE(std::string(e.what()).find("line 2, column 1"), std::string::npos);
    }
}

TEST(Parse, DensityInitialMatchesPureState) {
    const std::string text = std::string(kMinimal) +
                             "density rho on q = [[1, 0], [0, 0]]\n"
                             "family F0rho times grid initial rho {\n  at 1: Z\n  at 2: Z\n} steps { identity identity }\n";
    const famspec::Program p = famspec::load(text);
    const WeightTable t = probabilities(p.family("F0rho"));
    EXPECT_NEAR(t.probability("I/zplus/zplus"), 1.0, 1e-15);
}

TEST(Parse, FamiliesWithEqualStepsShareDynamics) {
    const std::string text = std::string(kMinimal) +
                             "family F1 times grid initial z+ {\n  at 2: Z\n} steps { identity identity }\n";
    const famspec::Program p = famspec::load(text);
    EXPECT_EQ(p.family("F0").dynamics(), p.family("F1").dynamics());
}

TEST(Hardy, DocumentGivesOneTwelfth) {
    const famspec::Program p = famspec::load(read(std::string(CHIST_DATA_DIR) + "/hardy.fam"));
    const Family &f = p.family("unitary-output");
    EXPECT_NEAR(token_event_probability(f, probabilities(f), {"e", "ebar"}), 1.0 / 12.0, 1e-12);
    EXPECT_NEAR(conditional_probability(p.family("inference-prime"), "t1=d", "t1=ebar"), 1.0, 1e-12);
    EXPECT_NEAR(conditional_probability(p.family("inference-doubleprime"), "t1=dbar", "t1=e"), 1.0, 1e-12);
    EXPECT_FALSE(consistency_check(p.family("forbidden")).consistent);
}

TEST(Hardy, DocumentAgreesWithBuiltIn) {
    const famspec::Program p = famspec::load(read(std::string(CHIST_DATA_DIR) + "/hardy.fam"));
    const Scenario s = build_hardy();
    for (const char *name : {"unitary-output", "arm-pair", "inference-prime", "inference-doubleprime"}) {
        const WeightTable a = weights(p.family(name)), b = weights(s.family(name));
        ASSERT_EQ(a.entries.size(), b.entries.size()) << name;
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            EXPECT_EQ(a.entries[i].label, b.entries[i].label);
            EXPECT_NEAR(a.entries[i].weight, b.entries[i].weight, 1e-12) << name << " " << a.entries[i].label;
        }
    }
}

TEST(Serialize, EmptyDocumentIsHeaderOnly) {
    EXPECT_EQ(serialize(famspec::Document{}), "# famspec v1\n");
    EXPECT_EQ(serialize(famspec::load("# nothing here\n\n").document), "# famspec v1\n");
}

TEST(Serialize, RoundTripAndIdempotence) {
    for (const std::string &text : {std::string(kMinimal), read(std::string(CHIST_DATA_DIR) + "/hardy.fam")}) {
        const famspec::Program a = famspec::load(text);
        const std::string once = serialize(a.document);
        const famspec::Program b = famspec::load(once);
        EXPECT_TRUE(famspec::equivalent(a.document, b.document));
        EXPECT_EQ(serialize(b.document), once);
    }
}

TEST(Serialize, ComplexFormatting) {
    EXPECT_EQ(famspec::format_complex({1, 0}), "1");
    EXPECT_EQ(famspec::format_complex({0, -0.5}), "-0.5i");
    EXPECT_EQ(famspec::format_complex({0.25, -2}), "0.25-2i");
    EXPECT_EQ(famspec::format_complex({-1, 3}), "-1+3i");
    EXPECT_EQ(famspec::format_complex({0.1, 0}), "0.10000000000000001");
}

TEST(Serialize, RandomOperatorsSurviveExactly) {
    std::mt19937_64 rng(5);
    const Operator u = testing::random_unitary(rng, 3);
    famspec::Document doc;
    doc.declarations.emplace_back(famspec::SpaceDecl{"s", 3, {}});
    doc.declarations.emplace_back(famspec::UnitaryDecl{"U", "s", u, {}});
    const famspec::Program p = famspec::load(serialize(doc));
    EXPECT_EQ(p.unitaries.at("U"), u);
}

TEST(Serialize, DependencyOrder) {
    const famspec::Program p =
        famspec::load("times g = [0]\nspace q dim 1\nproj P on q = [[1]]\nket k in q = [1]\n");
    EXPECT_EQ(serialize(p.document),
              "# famspec v1\n\nspace q dim 1\n\nket k in q = [1]\n\nproj P on q = [\n  [1]\n]\n\ntimes g = [0]\n");
}

TEST(Parse, NamesMustBeDeclaredBeforeUse) {
    const famspec::Diagnostic d = error_of("space q dim 1\nproj P on q = span(k)\nket k in q = [1]\n");
    EXPECT_NE(d.message.find("undefined name 'k'"), std::string::npos);
    EXPECT_EQ(d.line, 2);
}

class ExportedScenario : public ::testing::TestWithParam<std::string> {};

TEST_P(ExportedScenario, ReproducesEveryFamily) {
    const Scenario s = build_scenario(GetParam());
    const famspec::Document doc = famspec::export_scenario(s);
    const std::string text = serialize(doc);
    const famspec::Program p = famspec::load(text);
    EXPECT_TRUE(famspec::equivalent(doc, p.document));
    EXPECT_EQ(serialize(p.document), text);
    for (const Family &f : s.families) {
        const Family &g = p.family(f.name());
        const WeightTable a = weights(f), b = weights(g);
        ASSERT_EQ(a.entries.size(), b.entries.size()) << f.name();
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            EXPECT_EQ(a.entries[i].label, b.entries[i].label);
            EXPECT_NEAR(a.entries[i].weight, b.entries[i].weight, 1e-15);
        }
        EXPECT_EQ(consistency_check(f).consistent, consistency_check(g).consistent) << f.name();
    }
}

INSTANTIATE_TEST_SUITE_P(Builtins, ExportedScenario, ::testing::Values("spin-half", "epr", "hardy"));

// Random edits of valid documents and random byte strings. The parser must
// return normally with either a program or one located diagnostic.
TEST(Fuzz, ParserIsTotal) {
    std::mt19937_64 rng(2026);
    const std::vector<std::string> seeds = {kMinimal, read(std::string(CHIST_DATA_DIR) + "/hardy.fam")};
    const std::string alphabet = "[]{}(),:=+-.ei0123456789 \n#abdfkmnoprstuyIP\t\xc3\xa9";
    std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet.size()) - 1);
    for (int rep = 0; rep < 2000; ++rep) {
        std::string text;
        if (rep % 4 == 0) {
            const int n = static_cast<int>(rng() % 200);
            for (int i = 0; i < n; ++i) text += alphabet[static_cast<std::size_t>(pick(rng))];
        } else {
            text = seeds[rng() % seeds.size()];
            const int edits = 1 + static_cast<int>(rng() % 4);
            for (int e = 0; e < edits && !text.empty(); ++e) {
                const std::size_t at = rng() % text.size();
                switch (rng() % 3) {
                    case 0:
                        text.erase(at, 1 + rng() % 8);
                        break;
                    case 1:
                        text.insert(at, 1, alphabet[static_cast<std::size_t>(pick(rng))]);
                        break;
                    default:
                        text[at] = alphabet[static_cast<std::size_t>(pick(rng))];
                }
            }
        }
        const famspec::ParseResult r = parse(text);
        if (r.ok()) continue;
        ASSERT_EQ(r.diagnostics.size(), 1u);
        const famspec::Diagnostic &d = r.diagnostics.front();
        const int lines = 1 + static_cast<int>(std::count(text.begin(), text.end(), '\n'));
        EXPECT_GE(d.line, 1) << text;
        EXPECT_LE(d.line, lines) << text;
        EXPECT_GE(d.column, 1) << text;
    }
}

}  // namespace
}  // namespace chist
