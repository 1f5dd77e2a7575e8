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

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "chist/histories.hpp"

namespace chist {

/// Label given to a time added by extend(). It depends only on the value so
/// that extensions commute.
inline std::string added_time_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "t@%.17g", v);
    return buf;
}

namespace detail {

/// Dynamics on a finer grid that agree with ps on its own times. With a
/// Hamiltonian every sub-step is generated exactly; otherwise the original
/// step is applied on the last sub-interval and the others are the identity.
inline PropagatorSet refine_dynamics(const PropagatorSet &ps, const TimeGrid &grid) {
    const auto &old = ps.grid().values();
    std::vector<Operator> steps;
    const Eigen::Index d = ps.dim();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid.value(i), b = grid.value(i + 1);
        if (ps.hamiltonian()) {
            steps.push_back(propagator_from_hamiltonian(*ps.hamiltonian(), b, a));
            continue;
        }
        // Original step whose interval contains [a, b] and ends at b, if any.
        Operator s = Operator::Identity(d, d);
        for (std::size_t k = 0; k + 1 < old.size(); ++k)
            if (old[k + 1] == b && old[k] <= a) s = ps.step(k);
        steps.push_back(s);
    }
    return PropagatorSet(ps.name(), grid, steps, ps.hamiltonian());
}

inline TimeGrid merged_grid(const TimeGrid &g, const std::vector<double> &extra) {
    std::vector<std::pair<double, std::string>> all;
    for (std::size_t i = 0; i < g.size(); ++i) all.emplace_back(g.value(i), g.label(i));
    for (double v : extra) {
        if (!std::isfinite(v)) throw NotFinite("extend: time is not finite");
        for (const auto &p : all)
            if (p.first == v) throw DuplicateTime("extend: time " + added_time_label(v).substr(2) + " already present");
        all.emplace_back(v, added_time_label(v));
    }
    std::sort(all.begin(), all.end());
    std::vector<double> values;
    std::vector<std::string> labels;
    for (const auto &p : all) {
        values.push_back(p.first);
        labels.push_back(p.second);
    }
    return TimeGrid(labels, values);
}

}  // namespace detail

/// Adds times carrying the trivial decomposition {I}. Weights and the
/// consistency verdict are unchanged. Times may not be added outside the grid
/// on the side anchored by an initial condition.
inline Family extend(const Family &f, const std::vector<double> &extra_times) {
    if (extra_times.empty()) return f;
    const TimeGrid &g = f.grid();
    if (f.initial()) {
        for (double v : extra_times) {
            if (!f.initial()->at_end && v < g.value(0))
                throw InvalidValue("extend: cannot add a time before the initial condition");
            if (f.initial()->at_end && v > g.value(g.size() - 1))
                throw InvalidValue("extend: cannot add a time after the final condition");
        }
    }
    const TimeGrid grid = detail::merged_grid(g, extra_times);
    auto ps = std::make_shared<const PropagatorSet>(detail::refine_dynamics(*f.dynamics(), grid));
    std::vector<Decomposition> decs;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int old = g.index_of_value(grid.value(i));
        decs.push_back(old >= 0 ? f.decomposition(static_cast<std::size_t>(old)) : trivial_decomposition(f.dim()));
    }
    const std::size_t ref = static_cast<std::size_t>(grid.index_of_value(g.value(f.reference())));
    return Family(f.name(), ps, decs, f.initial(), ref);
}

/// Extends f to the given grid, which must contain all of f's times.
inline Family extend_to(const Family &f, const TimeGrid &grid) {
    std::vector<double> extra;
    for (double v : grid.values())
        if (f.grid().index_of_value(v) < 0) extra.push_back(v);
    return extend(f, extra);
}

inline TimeGrid union_grid(const Family &f, const Family &g) {
    std::vector<double> extra;
    for (double v : g.grid().values())
        if (f.grid().index_of_value(v) < 0) extra.push_back(v);
    return detail::merged_grid(f.grid(), extra);
}

namespace detail {

inline bool same_dynamics(const Family &a, const Family &b) {
    if (a.dynamics() == b.dynamics()) return true;
    if (a.dim() != b.dim() || a.size() != b.size()) return false;
    if (a.grid().values() != b.grid().values()) return false;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        if ((a.dynamics()->step(i) - b.dynamics()->step(i)).norm() >= tol::unitary) return false;
    return true;
}

inline bool same_initial(const Family &a, const Family &b) {
    if (!a.initial() && !b.initial()) return true;
    if (!a.initial() || !b.initial()) return false;
    if (a.initial()->at_end != b.initial()->at_end) return false;
    return (a.initial()->as_operator() - b.initial()->as_operator()).norm() < tol::proj;
}

/// Both families on their union grid, checking that they describe the same
/// closed system.
inline std::pair<Family, Family> aligned(const Family &f, const Family &g) {
    if (f.dim() != g.dim())
        throw PropagatorMismatch("families '" + f.name() + "' and '" + g.name() + "' live in different spaces");
    const TimeGrid grid = union_grid(f, g);
    Family fe = extend_to(f, grid), ge = extend_to(g, grid);
    if (!same_dynamics(fe, ge))
        throw PropagatorMismatch("families '" + f.name() + "' and '" + g.name() + "' use different dynamics");
    // Share one dynamics object so downstream families compare by pointer.
    ge = Family(ge.name(), fe.dynamics(), ge.decompositions(), ge.initial(), ge.reference());
    return {fe, ge};
}

inline double overlap_trace(const Projector &p, const Projector &q) { return op_inner(p.op(), q.op()).real(); }

/// True when every member of `coarse` is the sum of the members of `fine`
/// that it contains.
inline bool decomposition_refines(const Decomposition &coarse, const Decomposition &fine) {
    for (const auto &c : coarse.members()) {
        Operator sum = Operator::Zero(coarse.dim(), coarse.dim());
        for (const auto &m : fine.members()) {
            // For projectors Tr(PQ) = rank(Q) exactly when Q <= P.
            if (std::abs(overlap_trace(c.projector, m.projector) - m.projector.rank()) < 1e-6 && m.projector.rank() > 0)
                sum += m.projector.op();
        }
        if ((sum - c.projector.op()).norm() >= tol::proj) return false;
    }
    return true;
}

inline bool same_decomposition(const Decomposition &a, const Decomposition &b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].label != b[i].label) return false;
        if ((a[i].projector.op() - b[i].projector.op()).norm() >= tol::proj) return false;
    }
    return true;
}

}  // namespace detail

/// True when `fine` refines `coarse` after both are extended to a common grid.
inline bool is_refinement(const Family &coarse, const Family &fine) {
    const auto [c, f] = detail::aligned(coarse, fine);
    if (c.initial() && !detail::same_initial(c, f)) return false;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (!detail::decomposition_refines(c.decomposition(j), f.decomposition(j))) return false;
    return true;
}

struct KinematicWitness {
    std::string time;
    std::string label_a;
    std::string label_b;
    double commutator_norm = 0.0;
};

/// Outcome of a compatibility test.
///
/// A dynamic-incompatible verdict means the slotwise product refinement is
/// inconsistent. That is the coarsest common refinement whenever all projectors
/// commute, but it does not prove that no finer consistent refinement exists;
/// the attached report identifies which pair of product histories failed.
struct CompatibilityVerdict {
    bool compatible = false;
    std::string classification;
    std::optional<KinematicWitness> kinematic;
    std::optional<ConsistencyReport> dynamic;
    std::optional<Family> refinement;
};

namespace detail {

inline std::string product_label(const std::string &a, const std::string &b) {
    if (a == "I") return b;
    if (b == "I" || a == b) return a;
    return a + "&" + b;
}

}  // namespace detail

inline CompatibilityVerdict common_refinement(const Family &f0, const Family &g0,
                                              const ConsistencyOptions &opt = {}) {
    auto [f, g] = detail::aligned(f0, g0);
    CompatibilityVerdict v;
    const std::size_t n = f.size();

    bool identical = f0.grid() == g0.grid() && detail::same_initial(f, g);
    for (std::size_t j = 0; identical && j < n; ++j)
        identical = detail::same_decomposition(f.decomposition(j), g.decomposition(j));
    if (identical) {
        v.compatible = true;
        v.classification = "identical";
        v.refinement = f0;
        return v;
    }

    // Different initial conditions cannot be combined into one family.
    if (f.initial() && g.initial() && !detail::same_initial(f, g)) {
        const std::size_t s = f.initial()->at_end ? n - 1 : 0;
        const Operator a = f.initial()->as_operator(), b = g.initial()->as_operator();
        v.classification = "kinematic-incompatible";
        v.kinematic = KinematicWitness{f.grid().label(s), f.initial()->label, g.initial()->label, commutator(a, b).norm()};
        return v;
    }

    for (const auto &[coarse, fine] : {std::pair<const Family *, const Family *>{&f, &g}, {&g, &f}}) {
        if (coarse->initial() && !detail::same_initial(*coarse, *fine)) continue;
        bool refines = true;
        for (std::size_t j = 0; refines && j < n; ++j)
            refines = detail::decomposition_refines(coarse->decomposition(j), fine->decomposition(j));
        if (!refines) continue;
        const ConsistencyReport r = consistency_check(*fine, opt);
        v.compatible = r.consistent;
        v.classification = r.consistent ? "refinement" : "dynamic-incompatible";
        if (r.consistent)
            v.refinement = *fine;
        else
            v.dynamic = r;
        return v;
    }

    // Kinematic test: every pair of projectors at a shared time must commute.
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto &a : f.decomposition(j).members()) {
            for (const auto &b : g.decomposition(j).members()) {
                const double tr = detail::overlap_trace(a.projector, b.projector);
                // Orthogonal or nested projectors commute; skip the matrix product.
                if (std::abs(tr) < 1e-9 || std::abs(tr - a.projector.rank()) < 1e-9 ||
                    std::abs(tr - b.projector.rank()) < 1e-9)
                    continue;
                const double c = commutator(a.projector.op(), b.projector.op()).norm();
                if (c >= tol::commute) {
                    v.classification = "kinematic-incompatible";
                    v.kinematic = KinematicWitness{f.grid().label(j), a.label, b.label, c};
                    return v;
                }
            }
        }
    }

    const Family &anchor = f.initial() ? f : g;
    std::vector<Decomposition> decs;
    for (std::size_t j = 0; j < n; ++j) {
        // A pure condition fixes its slot; commuting members there either
        // contain the state or are orthogonal to it.
        if (static_cast<int>(j) == anchor.pinned()) {
            decs.push_back(anchor.decomposition(j));
            continue;
        }
        std::vector<DecompositionMember> members;
        for (const auto &a : f.decomposition(j).members())
            for (const auto &b : g.decomposition(j).members()) {
                if (detail::overlap_trace(a.projector, b.projector) < 0.5) continue;
                Operator pq = a.projector.op() * b.projector.op();
                pq = 0.5 * (pq + pq.adjoint()).eval();
                members.push_back({detail::product_label(a.label, b.label), Projector(pq)});
            }
        decs.push_back(Decomposition(members));
    }
    const Family product(f0.name() + "&" + g0.name(), f.dynamics(), decs, anchor.initial(), f.reference());
    const ConsistencyReport r = consistency_check(product, opt);
    v.compatible = r.consistent;
    if (r.consistent) {
        v.classification = "common-refinement-found";
    } else {
        v.classification = "dynamic-incompatible";
        v.dynamic = r;
    }
    v.refinement = product;
    return v;
}

inline bool is_compatible(const Family &f, const Family &g, const ConsistencyOptions &opt = {}) {
    return common_refinement(f, g, opt).compatible;
}

}  // namespace chist
