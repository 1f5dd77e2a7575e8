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


// Acceptance run: one PASS or FAIL line per criterion, exit status 1 if any
// criterion fails. Built without gtest so the output stays one line each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chist/chist.hpp"

using namespace chist;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first failed check and keeps going so the detail names it.
class Checker {
public:
    void expect(bool ok, const std::string &what) {
        if (!ok && out_.pass) {
            out_.pass = false;
            out_.detail = what;
        }
    }
    void near(double got, double want, double tol, const std::string &what) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: got %.12g, want %.12g", what.c_str(), got, want);
        expect(std::abs(got - want) <= tol, buf);
    }
    void note(const std::string &s) {
        if (out_.pass) out_.detail = s;
    }
    Outcome result() const { return out_; }

private:
    Outcome out_;
};

const Scenario &cached(const std::string &name) {
    static std::map<std::string, Scenario> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, build_scenario(name)).first;
    return it->second;
}

std::string data(const std::string &file) { return std::string(CHIST_DATA_DIR) + "/" + file; }

std::string read(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const famspec::Program &hardy_file() {
    static const famspec::Program p = famspec::load(read(data("hardy.fam")));
    return p;
}

Outcome criterion1() {
    Checker c;
    const Family &f = cached("hardy").family("unitary-output");
    c.near(token_event_probability(f, probabilities(f), {"e", "ebar"}), 1.0 / 12.0, 1e-12, "built-in P(e, ebar)");
    const Family &g = hardy_file().family("unitary-output");
    c.near(token_event_probability(g, probabilities(g), {"e", "ebar"}), 1.0 / 12.0, 1e-12, "hardy.fam P(e, ebar)");
    c.note("P(e, ebar) = 1/12");
    return c.result();
}

Outcome criterion2() {
    Checker c;
    const Scenario &s = cached("hardy");
    c.near(conditional_probability(s.family("inference-prime"), "t1=d", "t1=ebar"), 1.0, 1e-12, "P(d | ebar)");
    c.near(conditional_probability(s.family("inference-doubleprime"), "t1=dbar", "t1=e"), 1.0, 1e-12, "P(dbar | e)");
    c.near(probabilities(s.family("arm-pair")).probability("psi0/d.dbar/I"), 0.0, 1e-12, "P(d.dbar)");
    c.note("both inferences certain, d.dbar never occurs");
    return c.result();
}

Outcome criterion3() {
    Checker c;
    const ConsistencyReport r = consistency_check(cached("hardy").family("forbidden"));
    c.expect(!r.consistent, "forbidden family reported consistent");
    c.expect(r.max_normalized_overlap > 0.1, "normalized overlap not above 0.1");
    char buf[96];
    std::snprintf(buf, sizeof buf, "inconsistent, max normalized overlap %.6g", r.max_normalized_overlap);
    c.note(buf);
    return c.result();
}

Outcome criterion4() {
    Checker c;
    const Scenario &s = cached("spin-half");
    const auto sup = support(s.family("F1"));
    c.expect(sup.size() == 2, "F1 support is not two histories");
    for (const auto &e : sup) c.near(e.probability, 0.5, 1e-12, "F1 " + e.label);
    c.expect(!consistency_check(s.family("F1-remerge")).consistent, "remerge family reported consistent");
    c.near(conditional_probability(s.family("G1"), "t1=xplus", "t3=Xplus"), 1.0, 1e-12, "G1 P(xplus | Xplus)");
    c.note("F1 splits 1/2, 1/2; remerge refused; outcome reveals x spin");
    return c.result();
}

Outcome criterion5() {
    Checker c;
    const Scenario &s = cached("epr");
    const Family &f1 = s.family("F1");
    c.near(predicate_probability(f1, probabilities(f1), parse_predicate(f1, "t1=zaplus.zbplus|zaminus.zbminus")), 0.0,
           1e-12, "F1 parallel outcomes");
    const Family &f4 = s.family("F4");
    const WeightTable t = probabilities(f4);
    const auto sup = support(t);
    c.expect(sup.size() == 4, "F4 support is not four histories");
    for (const auto &e : sup) c.near(e.probability, 0.25, 1e-12, "F4 " + e.label);
    for (const char *a : {"zaplus", "zaminus"})
        for (const char *b : {"xbplus", "xbminus"}) {
            const std::string tb = std::string("t3=") + b;
            const double joint = predicate_probability(f4, t, parse_predicate(f4, std::string("t3=") + a + "," + tb));
            const double pa = predicate_probability(f4, t, parse_predicate(f4, std::string("t3=") + a));
            const double pb = predicate_probability(f4, t, parse_predicate(f4, tb));
            c.near(joint, pa * pb, 1e-12, std::string("F4 independence ") + a + "," + b);
            c.near(conditional_probability(f4, tb, std::string("t3=") + a), pb, 1e-12,
                   std::string("F4 conditional ") + b + " given " + a);
        }
    c.note("F1 anticorrelated; F4 four histories at 1/4, independent");
    return c.result();
}

Outcome criterion6() {
    Checker c;
    const Scenario &s = cached("wavepacket");
    const auto sup = support(s.family("F1"));
    c.expect(sup.size() == 2, "F1 support is not two histories");
    for (const auto &e : sup) c.near(e.probability, 0.5, 1e-12, "F1 " + e.label);
    c.near(conditional_probability(s.family("G1"), "t1=x15-17", "t2=A"), 1.0, 1e-9, "G1 P(x15-17 | A)");
    c.note("two trajectories at 1/2; detection at A fixes the earlier interval");
    return c.result();
}

Outcome criterion7() {
    Checker c;
    const Scenario &s = cached("spin-half");
    const char *names[] = {"F0", "F1", "F2"};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            c.expect(common_refinement(s.family(names[i]), s.family(names[j])).classification ==
                         "kinematic-incompatible",
                     std::string(names[i]) + " vs " + names[j] + " not kinematic-incompatible");
    const famspec::Program p = famspec::load(read(data("spin-half.fam")));
    c.expect(common_refinement(p.family("F"), p.family("G")).classification == "dynamic-incompatible",
             "F vs G not dynamic-incompatible");
    const Family &f = s.family("F1");
    c.expect(is_compatible(f, extend(f, {0.5, 2.5})), "F1 incompatible with its extension");
    c.note("F0/F1/F2 kinematic-incompatible; F vs G dynamic-incompatible; extension compatible");
    return c.result();
}

Outcome criterion8() {
    Checker c;
    std::mt19937 rng(8);
    std::size_t checked = 0;
    double worst = 0.0;
    for (const char *name : {"epr", "wavepacket"}) {
        const Scenario &s = cached(name);
        auto pairs = spacelike_local_pairs(s);
        std::shuffle(pairs.begin(), pairs.end(), rng);
        if (pairs.size() > 100) pairs.resize(100);
        c.expect(pairs.size() == 100, std::string(name) + " has fewer than 100 spacelike pairs");
        const auto results = commutation_checks(s, pairs);
        for (std::size_t k = 0; k < results.size(); ++k) {
            c.expect(results[k].applicable, std::string(name) + " pair not applicable");
            c.expect(results[k].norm < 1e-12,
                     s.events[pairs[k].first].id + " vs " + s.events[pairs[k].second].id + " do not commute");
            worst = std::max(worst, results[k].norm);
        }
        checked += results.size();
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu pairs, max commutator norm %.3g", checked, worst);
    c.note(buf);
    return c.result();
}

Outcome criterion9() {
    Checker c;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-20, 20), v(-0.9, 0.9);
    for (int i = 0; i < 1000; ++i) {
        const SpacetimePoint p{u(rng), u(rng)}, q{u(rng), u(rng)};
        const double w = v(rng);
        c.expect(classify_interval(p, q) == classify_interval(boost(p, w), boost(q, w)), "boost changed interval kind");
    }
    const EmbeddingResult r = embed_events(embedding_local_configuration());
    c.expect(validate_foliation(r.foliation).valid, "local configuration foliation invalid");
    try {
        embed_events(embedding_entangled_configuration());
        c.expect(false, "entangled configuration embedded");
    } catch (const EmbeddingImpossible &e) {
        const std::set<std::string> ids = {e.blocking_event(), e.other_event()};
        c.expect(ids == std::set<std::string>{"s0@t1", "s0'@t1'"}, "wrong witness " + e.blocking_event());
    }
    c.note("1000 boosts keep interval kind; local embeds; entangled witness s0'@t1' vs s0@t1");
    return c.result();
}

Outcome criterion10() {
    Checker c;
    double worst = 0.0;
    for (const std::string &name : scenario_names()) {
        const Scenario &s = cached(name);
        const CovarianceMap maps = relabeling_maps(s, 10u);
        const CovarianceReport r = covariance_check(s, maps, relabel(s, maps));
        c.expect(r.passed, name + ": " + (r.problems.empty() ? std::string("failed") : r.problems.front()));
        c.expect(r.verdicts_agree, name + ": verdicts differ");
        worst = std::max(worst, r.max_weight_difference);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "4 scenarios covariant, max weight difference %.3g", worst);
    c.note(buf);
    return c.result();
}

double max_weight_gap(const Family &a, const Family &b, Checker &c) {
    const WeightTable wa = weights(a), wb = weights(b);
    double gap = 0.0;
    c.expect(wa.entries.size() == wb.entries.size(), a.name() + " and " + b.name() + " differ in size");
    std::map<std::string, double> by_label;
    for (const auto &e : wb.entries) by_label[e.label] = e.weight;
    for (const auto &e : wa.entries) {
        auto it = by_label.find(e.label);
        if (it == by_label.end()) continue;
        gap = std::max(gap, std::abs(e.weight - it->second));
    }
    return gap;
}

double reversed_gap(const Family &f, Checker &c) {
    const Evaluation ea = evaluate(f), eb = evaluate(time_reverse(f));
    std::map<std::string, double> by_key;
    for (std::size_t k = 0; k < eb.histories.size(); ++k) {
        History h = eb.histories[k];
        std::reverse(h.begin(), h.end());
        by_key[history_label(f, h)] = eb.weights[k];
    }
    double gap = 0.0;
    for (std::size_t k = 0; k < ea.histories.size(); ++k) {
        auto it = by_key.find(history_label(f, ea.histories[k]));
        c.expect(it != by_key.end(), f.name() + ": reversed history missing");
        if (it != by_key.end()) gap = std::max(gap, std::abs(ea.weights[k] - it->second));
    }
    return gap;
}

const char *kFuzzAlphabet = "[]{}(),:=+-.ei0123456789 \n#abdfkmnoprstuyIP\t\xc3\xa9";

bool fuzz_parser(int runs, std::string &why) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> seeds = {read(data("hardy.fam")), read(data("spin-half.fam"))};
    const std::string alphabet = kFuzzAlphabet;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet.size()) - 1);
    for (int rep = 0; rep < runs; ++rep) {
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
        try {
            const famspec::ParseResult r = famspec::parse(text);
            if (r.ok()) continue;
            if (r.diagnostics.size() != 1 || r.diagnostics.front().line < 1 || r.diagnostics.front().column < 1) {
                why = "malformed diagnostic on fuzz input " + std::to_string(rep);
                return false;
            }
        } catch (const std::exception &e) {
            why = "parser threw on fuzz input " + std::to_string(rep) + ": " + e.what();
            return false;
        }
    }
    return true;
}

Outcome criterion11() {
    Checker c;
    double norm_gap = 0.0, rev_gap = 0.0, ref_gap = 0.0, trip_gap = 0.0;
    for (const std::string &name : scenario_names()) {
        const Scenario &s = cached(name);
        for (const Family &f : s.families) {
            const Evaluation e = evaluate(f);
            if (consistency_check(f, e).consistent) {
                double total = 0.0;
                for (double w : e.weights) total += w;
                norm_gap = std::max(norm_gap, std::abs(total - 1.0));
            }
            rev_gap = std::max(rev_gap, reversed_gap(f, c));
            for (std::size_t r = 0; r < f.size(); ++r)
                ref_gap = std::max(ref_gap, max_weight_gap(f, f.with_reference(r), c));
        }
        const famspec::Document doc = famspec::export_scenario(s);
        const std::string text = famspec::serialize(doc);
        const famspec::Program back = famspec::load(text);
        c.expect(famspec::equivalent(doc, back.document), name + ": exported document not equivalent after reload");
        c.expect(famspec::serialize(back.document) == text, name + ": serialization not idempotent");
        for (const Family &f : s.families) trip_gap = std::max(trip_gap, max_weight_gap(f, back.family(f.name()), c));
    }
    for (const char *file : {"hardy.fam", "spin-half.fam"}) {
        const famspec::Program p = famspec::load(read(data(file)));
        const famspec::Program q = famspec::load(famspec::serialize(p.document));
        c.expect(famspec::equivalent(p.document, q.document), std::string(file) + " not equivalent after round trip");
    }
    c.expect(norm_gap < 1e-9, "consistent family weights do not sum to 1");
    c.expect(rev_gap < 1e-12, "time reversal changed a weight");
    c.expect(ref_gap < 1e-12, "reference index changed a weight");
    c.expect(trip_gap < 1e-12, "round trip changed a weight");
    std::string why;
    c.expect(fuzz_parser(10000, why), why);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "normalization %.2g, reversal %.2g, reference %.2g, round trip %.2g; 10000 fuzz inputs handled",
                  norm_gap, rev_gap, ref_gap, trip_gap);
    c.note(buf);
    return c.result();
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"Hardy joint detection probability", criterion1},
        {"Hardy inferences", criterion2},
        {"Hardy forbidden family", criterion3},
        {"spin-half families", criterion4},
        {"EPR correlations", criterion5},
        {"wavepacket trajectories", criterion6},
        {"compatibility classification", criterion7},
        {"spacelike commutation", criterion8},
        {"boosts and embedding", criterion9},
        {"relabeling covariance", criterion10},
        {"invariants, round trip and fuzz", criterion11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %zu: %s (%s) [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
