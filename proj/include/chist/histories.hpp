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

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "chist/dynamics.hpp"
#include "chist/hilbert.hpp"

namespace chist {

/// Initial (or, after time reversal, final) condition of a family.
struct InitialCondition {
    std::string label;
    std::variant<Ket, DensityOperator> state;
    /// True when the condition sits at the last time instead of the first.
    bool at_end = false;

    static InitialCondition pure(std::string label, Ket psi) {
        if (!psi.allFinite()) throw NotFinite("initial state has non-finite amplitudes");
        if (std::abs(psi.norm() - 1.0) >= tol::norm)
            throw InvalidValue("initial state '" + label + "' must have unit norm");
        return InitialCondition{std::move(label), std::move(psi), false};
    }

    static InitialCondition density(std::string label, DensityOperator rho) {
        return InitialCondition{std::move(label), std::move(rho), false};
    }

    bool is_pure() const { return std::holds_alternative<Ket>(state); }
    const Ket &ket() const { return std::get<Ket>(state); }
    const DensityOperator &rho() const { return std::get<DensityOperator>(state); }
    Eigen::Index dim() const { return is_pure() ? ket().size() : rho().dim(); }
    Operator as_operator() const { return is_pure() ? outer(ket(), ket()) : rho().op(); }
};

inline std::string complement_label(const std::string &label) { return "not-" + label; }

/// A family of histories: one decomposition of the identity per grid time,
/// an optional initial condition, and the unitary dynamics connecting times.
///
/// With a pure initial state the pinned slot (first time, or last after time
/// reversal) uses the decomposition {psi, I - psi}, and only histories that
/// carry psi in that slot are enumerated.
class Family {
   public:
    Family() = default;

    Family(std::string name, PropagatorSetPtr dynamics, std::vector<Decomposition> decompositions,
           std::optional<InitialCondition> initial = std::nullopt, std::size_t reference = 0)
        : name_(std::move(name)),
          dynamics_(std::move(dynamics)),
          decompositions_(std::move(decompositions)),
          initial_(std::move(initial)),
          reference_(reference) {
        if (!dynamics_) throw InvalidValue("family '" + name_ + "' has no dynamics");
        const std::size_t n = dynamics_->grid().size();
        if (decompositions_.size() != n)
            throw InvalidValue("family '" + name_ + "' needs " + std::to_string(n) + " decompositions, got " +
                               std::to_string(decompositions_.size()));
        if (reference_ >= n) throw IndexOutOfRange("reference index out of range");
        const Eigen::Index d = dynamics_->dim();
        if (initial_) {
            if (initial_->dim() != d) throw DimensionMismatch("initial condition dimension mismatch");
            if (initial_->is_pure()) {
                const std::size_t s = pinned_slot();
                Decomposition &slot = decompositions_[s];
                const Projector p = Projector::onto(initial_->ket());
                if (slot.size() == 0 || slot.is_trivial()) {
                    slot = Decomposition({{initial_->label, p}, {complement_label(initial_->label), p.complement()}});
                } else {
                    const int i = slot.index_of(initial_->label);
                    if (i < 0 || (slot[static_cast<std::size_t>(i)].projector.op() - p.op()).norm() >= tol::proj)
                        throw InvalidValue("family '" + name_ + "': pinned slot must contain the initial state '" +
                                           initial_->label + "'");
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            const Decomposition &dec = decompositions_[j];
            if (dec.size() == 0) decompositions_[j] = trivial_decomposition(d);
            if (decompositions_[j].dim() != d)
                throw DimensionMismatch("family '" + name_ + "': decomposition at " + grid().label(j) +
                                        " has dimension " + std::to_string(decompositions_[j].dim()));
            const DecompositionReport r = validate_decomposition(decompositions_[j]);
            if (!r.valid)
                throw InvalidValue("family '" + name_ + "': decomposition at " + grid().label(j) + ": " +
                                   r.problems.front());
        }
    }

    const std::string &name() const { return name_; }
    const PropagatorSetPtr &dynamics() const { return dynamics_; }
    const TimeGrid &grid() const { return dynamics_->grid(); }
    std::size_t size() const { return decompositions_.size(); }
    Eigen::Index dim() const { return dynamics_->dim(); }
    const std::vector<Decomposition> &decompositions() const { return decompositions_; }
    const Decomposition &decomposition(std::size_t j) const { return decompositions_.at(j); }
    const std::optional<InitialCondition> &initial() const { return initial_; }
    std::size_t reference() const { return reference_; }

    bool has_pure_initial() const { return initial_ && initial_->is_pure(); }

    /// Slot fixed by a pure initial condition, or -1.
    int pinned() const {
        if (!has_pure_initial()) return -1;
        return static_cast<int>(pinned_slot());
    }

    int pinned_member() const {
        if (!has_pure_initial()) return -1;
        return decompositions_[pinned_slot()].index_of(initial_->label);
    }

    Family with_reference(std::size_t r) const {
        Family f = *this;
        if (r >= size()) throw IndexOutOfRange("reference index out of range");
        f.reference_ = r;
        return f;
    }

    Family renamed(std::string name) const {
        Family f = *this;
        f.name_ = std::move(name);
        return f;
    }

   private:
    std::size_t pinned_slot() const { return initial_->at_end ? decompositions_.size() - 1 : 0; }

    std::string name_;
    PropagatorSetPtr dynamics_;
    std::vector<Decomposition> decompositions_;
    std::optional<InitialCondition> initial_;
    std::size_t reference_ = 0;
};

/// A history is one member index per slot.
using History = std::vector<int>;

inline std::string history_label(const Family &f, const History &h) {
    std::string s;
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (j) s += '/';
        s += f.decomposition(j)[static_cast<std::size_t>(h[j])].label;
    }
    return s;
}

/// Parses "a/b/c" into member indices. Throws LabelNotFound on unknown labels.
inline History parse_history(const Family &f, const std::string &label) {
    History h;
    std::size_t start = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const std::size_t end = label.find('/', start);
        const bool last = j + 1 == f.size();
        if ((end == std::string::npos) != last)
            throw LabelNotFound("history label '" + label + "' does not have " + std::to_string(f.size()) + " slots");
        const std::string part = label.substr(start, last ? std::string::npos : end - start);
        const int i = f.decomposition(j).index_of(part);
        if (i < 0) throw LabelNotFound("unknown label '" + part + "' at " + f.grid().label(j));
        h.push_back(i);
        start = end + 1;
    }
    return h;
}

inline void check_history(const Family &f, const History &h) {
    if (h.size() != f.size())
        throw InvalidValue("history has " + std::to_string(h.size()) + " slots, family has " + std::to_string(f.size()));
    for (std::size_t j = 0; j < h.size(); ++j)
        if (h[j] < 0 || static_cast<std::size_t>(h[j]) >= f.decomposition(j).size())
            throw LabelNotFound("history slot " + std::to_string(j) + " has no member " + std::to_string(h[j]));
}

/// Every history of the family, honouring the pinned slot.
inline std::vector<History> all_histories(const Family &f) {
    std::vector<History> out{History{}};
    for (std::size_t j = 0; j < f.size(); ++j) {
        std::vector<History> next;
        for (const History &h : out) {
            for (std::size_t m = 0; m < f.decomposition(j).size(); ++m) {
                if (static_cast<int>(j) == f.pinned() && static_cast<int>(m) != f.pinned_member()) continue;
                History g = h;
                g.push_back(static_cast<int>(m));
                next.push_back(std::move(g));
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Heisenberg projectors of every member of every slot at the family's
/// reference index.
inline std::vector<std::vector<Operator>> heisenberg_projectors(const Family &f) {
    std::vector<std::vector<Operator>> out(f.size());
    const PropagatorSet &ps = *f.dynamics();
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Decomposition &d = f.decomposition(j);
        if (d.is_trivial()) {
            out[j].push_back(Operator::Identity(f.dim(), f.dim()));
            continue;
        }
        const Operator t = ps.propagator(f.reference(), j);
        for (std::size_t m = 0; m < d.size(); ++m) out[j].push_back(t * d[m].projector.op() * t.adjoint());
    }
    return out;
}

struct ChainOperator {
    History history;
    Operator op;
};

/// Heisenberg chain operator K = P_f ... P_0 (so that K^dagger lists the
/// projectors in time order). Trivial slots contribute identity factors.
inline ChainOperator chain_operator(const Family &f, const History &h) {
    check_history(f, h);
    const PropagatorSet &ps = *f.dynamics();
    Operator k = Operator::Identity(f.dim(), f.dim());
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Decomposition &d = f.decomposition(j);
        if (d.is_trivial()) continue;
        const Operator t = ps.propagator(f.reference(), j);
        k = (t * d[static_cast<std::size_t>(h[j])].projector.op() * t.adjoint()) * k;
    }
    return {h, k};
}

/// Schroedinger chain operator P_f T(f,f-1) P_{f-1} ... T(1,0) P_0.
/// It is related to the Heisenberg form by K = T(r,f) K_s T(0,r).
inline Operator chain_operator_schrodinger(const Family &f, const History &h) {
    check_history(f, h);
    const PropagatorSet &ps = *f.dynamics();
    Operator k = f.decomposition(0)[static_cast<std::size_t>(h[0])].projector.op();
    for (std::size_t j = 1; j < f.size(); ++j)
        k = f.decomposition(j)[static_cast<std::size_t>(h[j])].projector.op() * (ps.step(j - 1) * k);
    return k;
}

/// Chain operator norm below which a history branch is treated as zero.
inline constexpr double kPruneNorm = 1e-14;

/// Decoherence functional D(a, b) restricted to histories whose chain
/// operator does not vanish.
struct Evaluation {
    std::vector<History> histories;
    std::vector<double> weights;
    Eigen::MatrixXcd functional;
};

enum class EvalPath { automatic, operator_form };

namespace detail {

inline Evaluation evaluate_vectors(const Family &f) {
    // Pure initial condition: D(a,b) = <v_a|v_b> (start) or <v_b|v_a> (end).
    const PropagatorSet &ps = *f.dynamics();
    const bool at_end = f.initial()->at_end;
    const std::size_t n = f.size();
    const int pin = f.pinned();
    std::vector<Ket> vecs;
    std::vector<History> hist;
    History cur(n, 0);
    cur[static_cast<std::size_t>(pin)] = f.pinned_member();

    // Visit slots away from the pinned end.
    auto slot_at = [&](std::size_t depth) { return at_end ? n - 1 - depth : depth; };
    auto recurse = [&](auto &&self, std::size_t depth, const Ket &v) -> void {
        if (depth == n) {
            vecs.push_back(v);
            hist.push_back(cur);
            return;
        }
        const std::size_t j = slot_at(depth);
        const std::size_t prev = at_end ? j + 1 : j - 1;
        const Ket w = at_end ? Ket(ps.step(j).adjoint() * v) : Ket(ps.step(prev) * v);
        const Decomposition &d = f.decomposition(j);
        if (d.is_trivial()) {
            cur[j] = 0;
            self(self, depth + 1, w);
            return;
        }
        for (std::size_t m = 0; m < d.size(); ++m) {
            Ket u = d[m].projector.op() * w;
            if (u.norm() < kPruneNorm) continue;
            cur[j] = static_cast<int>(m);
            self(self, depth + 1, u);
        }
    };
    recurse(recurse, 1, f.initial()->ket());

    Evaluation e;
    e.histories = std::move(hist);
    const Eigen::Index k = static_cast<Eigen::Index>(vecs.size());
    Eigen::MatrixXcd v(f.dim(), k);
    for (Eigen::Index i = 0; i < k; ++i) v.col(i) = vecs[static_cast<std::size_t>(i)];
    e.functional = v.adjoint() * v;
    if (at_end) e.functional = e.functional.transpose().eval();
    for (Eigen::Index i = 0; i < k; ++i) e.weights.push_back(std::max(0.0, e.functional(i, i).real()));
    return e;
}

inline Evaluation evaluate_operators(const Family &f) {
    const auto hp = heisenberg_projectors(f);
    const std::size_t n = f.size();
    const int pin = f.pinned();
    std::vector<Operator> ks;
    std::vector<History> hist;
    History cur(n, 0);
    auto recurse = [&](auto &&self, std::size_t j, const Operator &k) -> void {
        if (j == n) {
            ks.push_back(k);
            hist.push_back(cur);
            return;
        }
        for (std::size_t m = 0; m < hp[j].size(); ++m) {
            if (static_cast<int>(j) == pin && static_cast<int>(m) != f.pinned_member()) continue;
            Operator next = hp[j][m] * k;
            if (next.norm() < kPruneNorm) continue;
            cur[j] = static_cast<int>(m);
            self(self, j + 1, next);
        }
    };
    recurse(recurse, 0, Operator::Identity(f.dim(), f.dim()));

    std::optional<Operator> rho;
    bool at_end = false;
    if (f.initial()) {
        const PropagatorSet &ps = *f.dynamics();
        at_end = f.initial()->at_end;
        const std::size_t s = at_end ? n - 1 : 0;
        const Operator t = ps.propagator(f.reference(), s);
        rho = t * f.initial()->as_operator() * t.adjoint();
    }

    Evaluation e;
    e.histories = std::move(hist);
    const std::size_t k = ks.size();
    std::vector<Operator> right(k);
    for (std::size_t b = 0; b < k; ++b) {
        if (!rho)
            right[b] = ks[b];
        else if (at_end)
            right[b] = *rho * ks[b];
        else
            right[b] = ks[b] * *rho;
    }
    // Tr(K_a^dagger K_b), Tr(rho K_a^dagger K_b) = Tr(K_a^dagger K_b rho), or
    // with the condition at the end Tr(rho K_b K_a^dagger) = Tr(K_a^dagger rho K_b).
    const Eigen::Index d2 = f.dim() * f.dim();
    Eigen::MatrixXcd lhs(d2, static_cast<Eigen::Index>(k)), rhs(d2, static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
        lhs.col(static_cast<Eigen::Index>(a)) = Eigen::Map<const Eigen::VectorXcd>(ks[a].data(), d2);
        rhs.col(static_cast<Eigen::Index>(a)) = Eigen::Map<const Eigen::VectorXcd>(right[a].data(), d2);
    }
    e.functional = lhs.adjoint() * rhs;
    for (std::size_t a = 0; a < k; ++a)
        e.weights.push_back(
            std::max(0.0, e.functional(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real()));
    return e;
}

}  // namespace detail

inline Evaluation evaluate(const Family &f, EvalPath path = EvalPath::automatic) {
    if (path == EvalPath::automatic && f.has_pure_initial()) return detail::evaluate_vectors(f);
    return detail::evaluate_operators(f);
}

/// W(Y) = <K, K>, or <K, K>_rho when the family carries an initial condition.
inline double weight(const Family &f, const History &h) {
    check_history(f, h);
    if (f.pinned() >= 0 && h[static_cast<std::size_t>(f.pinned())] != f.pinned_member()) return 0.0;
    const Operator k = chain_operator(f, h).op;
    if (!f.initial()) return std::max(0.0, op_inner(k, k).real());
    const std::size_t s = f.initial()->at_end ? f.size() - 1 : 0;
    const Operator t = f.dynamics()->propagator(f.reference(), s);
    const DensityOperator rho(t * f.initial()->as_operator() * t.adjoint());
    const double w = f.initial()->at_end ? rho_inner(rho, k.adjoint(), k.adjoint()).real() : rho_inner(rho, k, k).real();
    return std::max(0.0, w);
}

struct ConsistencyOptions {
    double eps_abs = 1e-12;
    double eps_rel = 1e-10;
    /// Test only the real part of the off-diagonal functional.
    bool real_part_only = false;
};

struct Violation {
    std::string alpha;
    std::string beta;
    double overlap = 0.0;
    double normalized = 0.0;
};

struct ConsistencyReport {
    bool consistent = true;
    std::vector<Violation> violations;
    double max_normalized_overlap = 0.0;
    std::size_t histories = 0;
};

inline ConsistencyReport consistency_check(const Family &f, const Evaluation &e,
                                           const ConsistencyOptions &opt = {}) {
    ConsistencyReport r;
    r.histories = e.histories.size();
    const Eigen::Index k = e.functional.rows();
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a + 1; b < k; ++b) {
            const Complex d = e.functional(a, b);
            const double mag = opt.real_part_only ? std::abs(d.real()) : std::abs(d);
            const double scale =
                std::sqrt(e.weights[static_cast<std::size_t>(a)] * e.weights[static_cast<std::size_t>(b)]);
            if (scale > 0.0) r.max_normalized_overlap = std::max(r.max_normalized_overlap, mag / scale);
            if (mag > opt.eps_abs + opt.eps_rel * scale) {
                r.violations.push_back({history_label(f, e.histories[static_cast<std::size_t>(a)]),
                                        history_label(f, e.histories[static_cast<std::size_t>(b)]), mag,
                                        scale > 0.0 ? mag / scale : 0.0});
            }
        }
    }
    r.consistent = r.violations.empty();
    return r;
}

inline ConsistencyReport consistency_check(const Family &f, const ConsistencyOptions &opt = {}) {
    return consistency_check(f, evaluate(f), opt);
}

struct WeightEntry {
    History history;
    std::string label;
    double weight = 0.0;
    double probability = 0.0;
};

struct WeightTable {
    std::vector<WeightEntry> entries;
    double normalization = 0.0;

    /// Probability of a history label; histories absent from the table have
    /// vanishing chain operators.
    double probability(const std::string &label) const {
        for (const auto &e : entries)
            if (e.label == label) return e.probability;
        return 0.0;
    }
};

/// Weights without the consistency gate. Prefer probabilities() for anything
/// that is to be interpreted as a probability.
inline WeightTable weights(const Family &f, const Evaluation &e) {
    WeightTable t;
    for (std::size_t i = 0; i < e.histories.size(); ++i) {
        t.entries.push_back({e.histories[i], history_label(f, e.histories[i]), e.weights[i], 0.0});
        t.normalization += e.weights[i];
    }
    for (auto &en : t.entries) en.probability = t.normalization > 0.0 ? en.weight / t.normalization : 0.0;
    return t;
}

inline WeightTable weights(const Family &f) { return weights(f, evaluate(f)); }

/// Probabilities of a consistent family. Inconsistent families are refused:
/// probabilities may only be assigned within a single consistent framework.
inline WeightTable probabilities(const Family &f, const ConsistencyOptions &opt = {}) {
    const Evaluation e = evaluate(f);
    const ConsistencyReport r = consistency_check(f, e, opt);
    if (!r.consistent) {
        const Violation &v = r.violations.front();
        throw InconsistentFamily("family '" + f.name() +
                                 "' violates the consistency conditions (single framework rule): histories " +
                                 v.alpha + " and " + v.beta + " overlap by " + std::to_string(v.overlap));
    }
    WeightTable t = weights(f, e);
    if (!(t.normalization > 0.0)) throw InvalidValue("family '" + f.name() + "' has zero total weight");
    return t;
}

/// Histories with probability above this threshold form the support.
inline constexpr double kSupportEpsilon = 1e-12;

inline std::vector<WeightEntry> support(const WeightTable &t) {
    std::vector<WeightEntry> out;
    for (const auto &e : t.entries)
        if (e.probability > kSupportEpsilon) out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [](const WeightEntry &a, const WeightEntry &b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.label < b.label;
    });
    return out;
}

inline std::vector<WeightEntry> support(const Family &f, const ConsistencyOptions &opt = {}) {
    return support(probabilities(f, opt));
}

/// True when a member label equals the token or carries it as a factor.
/// Factors are separated by '.' (tensor factors) or '&' (product refinements).
inline bool label_matches(const std::string &label, const std::string &token) {
    if (label == token) return true;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= label.size(); ++i) {
        if (i == label.size() || label[i] == '.' || label[i] == '&') {
            if (label.compare(start, i - start, token) == 0 && i - start == token.size()) return true;
            start = i + 1;
        }
    }
    return false;
}

/// Conjunction of clauses "time=label1|label2". Time is a grid label or index.
struct SlotPredicate {
    struct Clause {
        std::size_t slot = 0;
        std::vector<std::string> tokens;
    };
    std::vector<Clause> clauses;

    bool matches(const Family &f, const History &h) const {
        for (const auto &c : clauses) {
            const std::string &lab = f.decomposition(c.slot)[static_cast<std::size_t>(h[c.slot])].label;
            bool any = false;
            for (const auto &t : c.tokens) any = any || label_matches(lab, t);
            if (!any) return false;
        }
        return true;
    }
};

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Parses "t1=xplus|xminus,t3=Xplus". Every token must name a member (or a
/// factor of one) in the addressed slot.
inline SlotPredicate parse_predicate(const Family &f, const std::string &text) {
    SlotPredicate p;
    for (const std::string &raw : split(text, ',')) {
        const std::string clause = trim(raw);
        if (clause.empty()) continue;
        const auto eq = clause.find('=');
        if (eq == std::string::npos) throw InvalidValue("predicate clause '" + clause + "' lacks '='");
        const std::string time = trim(clause.substr(0, eq));
        int slot = f.grid().index_of(time);
        if (slot < 0) {
            char *end = nullptr;
            const long v = std::strtol(time.c_str(), &end, 10);
            if (!time.empty() && end && *end == '\0' && v >= 0 && static_cast<std::size_t>(v) < f.size())
                slot = static_cast<int>(v);
        }
        if (slot < 0) throw LabelNotFound("unknown time '" + time + "' in predicate");
        SlotPredicate::Clause c;
        c.slot = static_cast<std::size_t>(slot);
        for (const std::string &tok : split(clause.substr(eq + 1), '|')) {
            const std::string t = trim(tok);
            bool known = false;
            for (const auto &m : f.decomposition(c.slot).members()) known = known || label_matches(m.label, t);
            if (!known) throw LabelNotFound("no member matching '" + t + "' at " + time);
            c.tokens.push_back(t);
        }
        p.clauses.push_back(std::move(c));
    }
    return p;
}

inline double predicate_probability(const Family &f, const WeightTable &t, const SlotPredicate &p) {
    double s = 0.0;
    for (const auto &e : t.entries)
        if (p.matches(f, e.history)) s += e.probability;
    return s;
}

/// Below this the conditioning event is treated as impossible.
inline constexpr double kZeroCondition = 1e-12;

inline double conditional_probability(const Family &f, const WeightTable &t, const SlotPredicate &target,
                                      const SlotPredicate &given) {
    double num = 0.0, den = 0.0;
    for (const auto &e : t.entries) {
        if (!given.matches(f, e.history)) continue;
        den += e.probability;
        if (target.matches(f, e.history)) num += e.probability;
    }
    if (den < kZeroCondition) throw ZeroConditionProbability("conditioning event has probability " + std::to_string(den));
    return num / den;
}

inline double conditional_probability(const Family &f, const std::string &target, const std::string &given,
                                      const ConsistencyOptions &opt = {}) {
    const WeightTable t = probabilities(f, opt);
    return conditional_probability(f, t, parse_predicate(f, target), parse_predicate(f, given));
}

/// Probability of a set of histories named by their labels "a/b/c".
inline double event_probability(const Family &f, const std::set<std::string> &subset,
                                const ConsistencyOptions &opt = {}) {
    for (const std::string &s : subset) parse_history(f, s);
    const WeightTable t = probabilities(f, opt);
    double p = 0.0;
    for (const auto &e : t.entries)
        if (subset.count(e.label)) p += e.probability;
    return p;
}

/// Probability that every token appears in some slot of the history.
inline double token_event_probability(const Family &f, const WeightTable &t, const std::vector<std::string> &tokens) {
    for (const auto &tok : tokens) {
        bool known = false;
        for (const auto &d : f.decompositions())
            for (const auto &m : d.members()) known = known || label_matches(m.label, tok);
        if (!known) throw LabelNotFound("no member matching '" + tok + "'");
    }
    double p = 0.0;
    for (const auto &e : t.entries) {
        bool all = true;
        for (const auto &tok : tokens) {
            bool found = false;
            for (std::size_t j = 0; j < f.size(); ++j)
                found = found || label_matches(f.decomposition(j)[static_cast<std::size_t>(e.history[j])].label, tok);
            all = all && found;
        }
        if (all) p += e.probability;
    }
    return p;
}

/// The family with the direction of time reversed: slots in reverse order,
/// times negated, steps replaced by their adjoints, and the initial condition
/// moved to the other end. Chain operators become adjoints of the originals.
inline Family time_reverse(const Family &f) {
    const PropagatorSet &ps = *f.dynamics();
    const std::size_t n = f.size();
    std::vector<std::string> labels;
    std::vector<double> values;
    std::vector<Operator> steps;
    std::vector<Decomposition> decs;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(ps.grid().label(n - 1 - i));
        values.push_back(-ps.grid().value(n - 1 - i));
        decs.push_back(f.decomposition(n - 1 - i));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) steps.push_back(ps.step(n - 2 - i).adjoint());
    std::optional<Operator> h;
    if (ps.hamiltonian()) h = -*ps.hamiltonian();
    auto rps = std::make_shared<const PropagatorSet>(ps.name() + "-reversed", TimeGrid(labels, values), steps, h);
    std::optional<InitialCondition> init = f.initial();
    if (init) init->at_end = !init->at_end;
    return Family(f.name() + "-reversed", rps, decs, init, n - 1 - f.reference());
}

}  // namespace chist
