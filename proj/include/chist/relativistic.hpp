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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chist/histories.hpp"
#include "chist/model.hpp"
#include "chist/spacetime.hpp"

namespace chist {

struct CommutationResult {
    /// False when the events are not spacelike separated; the norm is still
    /// reported but carries no locality content.
    bool applicable = false;
    double norm = 0.0;
};

inline bool spacelike_separated(const TaggedEvent &a, const TaggedEvent &b) {
    for (const auto &p : a.points())
        for (const auto &q : b.points())
            if (classify_interval(p, q) != IntervalKind::spacelike) return false;
    return true;
}

/// Heisenberg form (reference index 0) of the projector an event refers to.
inline Operator heisenberg_of(const Scenario &scn, const TaggedEvent &e) {
    const Model &m = scn.model(e.projector.model);
    if (e.projector.time >= m.dynamics->grid().size())
        throw IndexOutOfRange("event '" + e.id + "' refers to time index " + std::to_string(e.projector.time));
    return heisenberg(m.projector(e.projector.projector).op(), *m.dynamics, e.projector.time, 0);
}

/// Frobenius norm of the commutator of the two events' Heisenberg projectors.
inline CommutationResult commutation_check(const Scenario &scn, const TaggedEvent &e, const TaggedEvent &g) {
    if (e.projector.model != g.projector.model)
        throw InvalidValue("events '" + e.id + "' and '" + g.id + "' belong to different models");
    CommutationResult r;
    r.applicable = spacelike_separated(e, g);
    r.norm = commutator(heisenberg_of(scn, e), heisenberg_of(scn, g)).norm();
    return r;
}

/// Checks many pairs of events from one scenario, computing each event's
/// Heisenberg projector once.
inline std::vector<CommutationResult> commutation_checks(const Scenario &scn,
                                                         const std::vector<std::pair<std::size_t, std::size_t>> &pairs) {
    std::map<std::size_t, Operator> heis;
    const auto form = [&](std::size_t i) -> const Operator & {
        if (i >= scn.events.size()) throw IndexOutOfRange("event index " + std::to_string(i));
        auto it = heis.find(i);
        if (it == heis.end()) it = heis.emplace(i, heisenberg_of(scn, scn.events[i])).first;
        return it->second;
    };
    std::vector<CommutationResult> out;
    out.reserve(pairs.size());
    for (const auto &[i, j] : pairs) {
        const TaggedEvent &e = scn.events.at(i);
        const TaggedEvent &g = scn.events.at(j);
        if (e.projector.model != g.projector.model)
            throw InvalidValue("events '" + e.id + "' and '" + g.id + "' belong to different models");
        CommutationResult r;
        r.applicable = spacelike_separated(e, g);
        // Both forms are Hermitian, so [A,B] = AB - (AB)^dagger.
        const Operator ab = form(i) * form(j);
        r.norm = (ab - ab.adjoint()).norm();
        out.push_back(r);
    }
    return out;
}

/// Unitary maps L_j from each model's spaces to the primed description,
/// one per grid time, keyed by model name.
struct CovarianceMap {
    std::map<std::string, std::vector<Operator>> maps;
};

struct FamilyCovariance {
    std::string family;
    double max_weight_difference = 0.0;
    bool consistent = false;
    bool consistent_primed = false;
};

struct CovarianceReport {
    bool passed = true;
    double max_residual = 0.0;
    double max_weight_difference = 0.0;
    bool verdicts_agree = true;
    std::map<std::string, double> residuals;
    std::vector<FamilyCovariance> families;
    std::vector<std::string> problems;
};

namespace detail {

inline const std::vector<Operator> &maps_for(const CovarianceMap &maps, const Model &m) {
    const auto it = maps.maps.find(m.name);
    if (it == maps.maps.end()) throw LabelNotFound("covariance map has no entry for model '" + m.name + "'");
    if (it->second.size() != m.dynamics->grid().size())
        throw DimensionMismatch("covariance map for '" + m.name + "' needs one unitary per time");
    for (const Operator &l : it->second) {
        if (l.rows() != m.dim() || l.cols() != m.dim())
            throw DimensionMismatch("covariance map for '" + m.name + "' has the wrong dimension");
        if (!is_unitary(l)) throw InvalidValue("covariance map for '" + m.name + "' is not unitary");
    }
    return it->second;
}

inline Projector conjugate(const Projector &p, const Operator &l) {
    Operator q = l * p.op() * l.adjoint();
    q = 0.5 * (q + q.adjoint()).eval();
    return Projector(q);
}

}  // namespace detail

/// Family transformed by P'_j = L_j P_j L_j^dagger and psi' = L psi, placed on
/// the given primed dynamics.
inline Family transform_family(const Family &f, const std::vector<Operator> &l, PropagatorSetPtr primed) {
    std::vector<Decomposition> decs;
    for (std::size_t j = 0; j < f.size(); ++j) {
        std::vector<DecompositionMember> ms;
        for (const auto &m : f.decomposition(j).members()) ms.push_back({m.label, detail::conjugate(m.projector, l[j])});
        decs.push_back(Decomposition(ms));
    }
    std::optional<InitialCondition> init = f.initial();
    if (init) {
        const Operator &lj = l[init->at_end ? f.size() - 1 : 0];
        if (init->is_pure()) {
            init->state = Ket(lj * init->ket());
        } else {
            Operator r = lj * init->rho().op() * lj.adjoint();
            init->state = DensityOperator(0.5 * (r + r.adjoint()));
        }
    }
    return Family(f.name(), std::move(primed), decs, init, f.reference());
}

/// The relabelled scenario: dynamics T'_jk = L_j T_jk L_k^dagger and every
/// named value and family transformed accordingly. Events are kept.
inline Scenario relabel(const Scenario &scn, const CovarianceMap &maps) {
    Scenario out;
    out.name = scn.name + "-primed";
    for (const Model &m : scn.models) {
        const auto &l = detail::maps_for(maps, m);
        Model pm;
        pm.name = m.name;
        pm.basis_labels = m.basis_labels;
        std::vector<Operator> steps;
        for (std::size_t j = 0; j + 1 < l.size(); ++j) steps.push_back(l[j + 1] * m.dynamics->step(j) * l[j].adjoint());
        pm.dynamics = std::make_shared<const PropagatorSet>(m.dynamics->name(), m.dynamics->grid(), steps);
        for (const auto &[k, v] : m.kets) pm.kets[k] = l[0] * v;
        for (const auto &[k, v] : m.projectors) pm.projectors[k] = detail::conjugate(v, l[0]);
        out.models.push_back(pm);
    }
    for (const Family &f : scn.families) {
        const Model &m = scn.model_of(f);
        out.families.push_back(transform_family(f, detail::maps_for(maps, m), out.model(m.name).dynamics));
    }
    out.events = scn.events;
    return out;
}

/// Checks T'_jk = L_j T_jk L_k^dagger on every index pair and that every family
/// of scn, transformed by the maps and evolved with the primed dynamics, has
/// the same weights and the same consistency verdict.
inline CovarianceReport covariance_check(const Scenario &scn, const CovarianceMap &maps, const Scenario &primed,
                                         double residual_tol = 1e-10, double weight_tol = 1e-9) {
    CovarianceReport rep;
    for (const Model &m : scn.models) {
        const Model &pm = primed.model(m.name);
        if (pm.dim() != m.dim() || !(pm.dynamics->grid().values() == m.dynamics->grid().values()))
            throw DimensionMismatch("primed model '" + m.name + "' has a different grid or dimension");
        const auto &l = detail::maps_for(maps, m);
        double res = 0.0;
        const std::size_t n = l.size();
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                res = std::max(res, (pm.dynamics->propagator(j, k) - l[j] * m.dynamics->propagator(j, k) * l[k].adjoint())
                                        .norm());
        rep.residuals[m.name] = res;
        rep.max_residual = std::max(rep.max_residual, res);
        if (!(res < residual_tol)) rep.problems.push_back("model '" + m.name + "' residual " + fmt_num(res));
    }
    for (const Family &f : scn.families) {
        const Model &m = scn.model_of(f);
        const Family fp = transform_family(f, detail::maps_for(maps, m), primed.model(m.name).dynamics);
        const Evaluation a = evaluate(f), b = evaluate(fp);
        FamilyCovariance fc;
        fc.family = f.name();
        std::map<History, double> wb;
        for (std::size_t i = 0; i < b.histories.size(); ++i) wb[b.histories[i]] = b.weights[i];
        std::map<History, double> wa;
        for (std::size_t i = 0; i < a.histories.size(); ++i) wa[a.histories[i]] = a.weights[i];
        for (const auto &[h, w] : wa)
            fc.max_weight_difference = std::max(fc.max_weight_difference, std::abs(w - (wb.count(h) ? wb[h] : 0.0)));
        for (const auto &[h, w] : wb)
            fc.max_weight_difference = std::max(fc.max_weight_difference, std::abs(w - (wa.count(h) ? wa[h] : 0.0)));
        fc.consistent = consistency_check(f, a).consistent;
        fc.consistent_primed = consistency_check(fp, b).consistent;
        rep.max_weight_difference = std::max(rep.max_weight_difference, fc.max_weight_difference);
        if (fc.consistent != fc.consistent_primed) {
            rep.verdicts_agree = false;
            rep.problems.push_back("family '" + f.name() + "' changes consistency verdict");
        }
        if (!(fc.max_weight_difference <= weight_tol))
            rep.problems.push_back("family '" + f.name() + "' weights differ by " + fmt_num(fc.max_weight_difference));
        rep.families.push_back(fc);
    }
    rep.passed = rep.problems.empty();
    return rep;
}

/// Identity maps for every model of a scenario.
inline CovarianceMap identity_maps(const Scenario &scn) {
    CovarianceMap c;
    for (const Model &m : scn.models)
        c.maps[m.name] = std::vector<Operator>(m.dynamics->grid().size(), Operator::Identity(m.dim(), m.dim()));
    return c;
}

}  // namespace chist
