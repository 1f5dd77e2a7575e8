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
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chist/framework.hpp"
#include "chist/model.hpp"
#include "chist/relativistic.hpp"
#include "chist/spacetime.hpp"

namespace chist {

namespace scn {

using Member = std::pair<std::string, Projector>;

inline Ket ket(std::initializer_list<Complex> amps) {
    Ket k(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const Complex &a : amps) k(i++) = a;
    return k;
}

inline Decomposition decomposition(const std::vector<Member> &ms) {
    std::vector<DecompositionMember> out;
    for (const auto &[l, p] : ms) out.push_back({l, p});
    return make_decomposition(out);
}

/// Members plus their common complement, labelled `rest`, when it is nonzero.
inline Decomposition with_rest(const std::vector<Member> &ms, Eigen::Index d) {
    Operator rest = Operator::Identity(d, d);
    std::vector<DecompositionMember> out;
    for (const auto &[l, p] : ms) {
        rest -= p.op();
        out.push_back({l, p});
    }
    if (rest.norm() > tol::proj) out.push_back({"rest", Projector(rest)});
    return make_decomposition(out);
}

/// {label, not-label} for a single ket.
inline Decomposition pure_slot(const std::string &label, const Ket &k) {
    const Projector p = Projector::onto(k);
    return decomposition({{label, p}, {complement_label(label), p.complement()}});
}

/// Tensor products of members, labelled "a.b".
inline Decomposition product(const Decomposition &a, const Decomposition &b) {
    std::vector<DecompositionMember> out;
    for (const auto &x : a.members())
        for (const auto &y : b.members()) out.push_back({x.label + "." + y.label, tensor_product(x.projector, y.projector)});
    return Decomposition(out);
}

inline Decomposition product(const Decomposition &a, const Decomposition &b, const Decomposition &c) {
    return product(product(a, b), c);
}

/// Members tensored with identities on the left and right, labels kept.
inline Decomposition lift(const Decomposition &d, Eigen::Index left, Eigen::Index right) {
    std::vector<DecompositionMember> out;
    for (const auto &m : d.members())
        out.push_back({m.label, tensor_product(Projector::identity(left), m.projector, Projector::identity(right))});
    return Decomposition(out);
}

inline Decomposition basis(const std::vector<std::string> &labels) {
    const Eigen::Index d = static_cast<Eigen::Index>(labels.size());
    std::vector<DecompositionMember> out;
    for (Eigen::Index i = 0; i < d; ++i) out.push_back({labels[static_cast<std::size_t>(i)], Projector::onto(basis_ket(d, i))});
    return Decomposition(out);
}

/// Permutation matrix sending basis state i to image[i].
inline Operator permutation(const std::vector<Eigen::Index> &image) {
    const Eigen::Index d = static_cast<Eigen::Index>(image.size());
    Operator p = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) p(image[static_cast<std::size_t>(i)], i) = 1.0;
    return p;
}

/// Exchanges the basis states i and j, identity elsewhere.
inline Operator swap_levels(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
    std::vector<Eigen::Index> image(static_cast<std::size_t>(d));
    std::iota(image.begin(), image.end(), Eigen::Index{0});
    std::swap(image[static_cast<std::size_t>(i)], image[static_cast<std::size_t>(j)]);
    return permutation(image);
}

inline PropagatorSetPtr dynamics(const std::string &name, const std::vector<double> &values,
                                 const std::vector<Operator> &steps) {
    return std::make_shared<const PropagatorSet>(name, TimeGrid::from_values(values), steps);
}

inline PropagatorSetPtr trivial_dynamics(const std::string &name, const std::vector<double> &values, Eigen::Index d) {
    return std::make_shared<const PropagatorSet>(PropagatorSet::trivial(name, TimeGrid::from_values(values), d));
}

/// A family with a pure initial state; the first slot is filled automatically.
inline Family family(const std::string &name, const Model &m, const std::string &initial,
                     std::vector<Decomposition> later) {
    std::vector<Decomposition> decs;
    decs.emplace_back();
    for (auto &d : later) decs.push_back(std::move(d));
    return Family(name, m.dynamics, decs, InitialCondition::pure(initial, m.ket(initial)));
}

inline Expectation probability_of(std::string description, std::string fam, std::string history, double value,
                                  Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    e.query = "Pr(" + history + ")";
    e.expected = value;
    e.source = p;
    e.evaluate = [fam, history](const Scenario &s) { return probabilities(s.family(fam)).probability(history); };
    return e;
}

inline Expectation conditional(std::string description, std::string fam, std::string target, std::string given,
                               double value, Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    e.query = "Pr(" + target + " | " + given + ")";
    e.expected = value;
    e.source = p;
    e.evaluate = [fam, target, given](const Scenario &s) { return conditional_probability(s.family(fam), target, given); };
    return e;
}

inline Expectation predicate(std::string description, std::string fam, std::string pred, double value, Provenance p,
                             double tolerance = 1e-9) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    e.query = "Pr(" + pred + ")";
    e.expected = value;
    e.tolerance = tolerance;
    e.source = p;
    e.evaluate = [fam, pred](const Scenario &s) {
        const Family &f = s.family(fam);
        return predicate_probability(f, probabilities(f), parse_predicate(f, pred));
    };
    return e;
}

inline Expectation tokens(std::string description, std::string fam, std::vector<std::string> toks, double value,
                          Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    std::string q;
    for (const auto &t : toks) q += (q.empty() ? "" : ",") + t;
    e.query = "Pr(" + q + ")";
    e.expected = value;
    e.source = p;
    e.evaluate = [fam, toks](const Scenario &s) {
        const Family &f = s.family(fam);
        return token_event_probability(f, probabilities(f), toks);
    };
    return e;
}

/// Evaluates to 1 for a consistent family and 0 otherwise.
inline Expectation consistency(std::string description, std::string fam, bool consistent, Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    e.query = "consistent";
    e.expected = consistent ? 1.0 : 0.0;
    e.source = p;
    e.evaluate = [fam](const Scenario &s) { return consistency_check(s.family(fam)).consistent ? 1.0 : 0.0; };
    return e;
}

inline Expectation overlap_above(std::string description, std::string fam, double bound, Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    e.query = "max normalized overlap";
    e.expected = bound;
    e.comparison = "gt";
    e.source = p;
    e.evaluate = [fam](const Scenario &s) { return consistency_check(s.family(fam)).max_normalized_overlap; };
    return e;
}

inline Expectation support_size(std::string description, std::string fam, std::size_t n, Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fam;
    e.query = "support size";
    e.expected = static_cast<double>(n);
    e.source = p;
    e.evaluate = [fam](const Scenario &s) { return static_cast<double>(support(s.family(fam)).size()); };
    return e;
}

inline Expectation compatibility(std::string description, std::string fa, std::string fb, std::string classification,
                                 Provenance p) {
    Expectation e;
    e.description = std::move(description);
    e.family = fa + "," + fb;
    e.query = "classification == " + classification;
    e.expected = 1.0;
    e.source = p;
    e.evaluate = [fa, fb, classification](const Scenario &s) {
        return common_refinement(s.family(fa), s.family(fb)).classification == classification ? 1.0 : 0.0;
    };
    return e;
}

inline Region cells_at(std::vector<int> cells, const Hypersurface &s) { return Region{std::move(cells), s}; }

inline std::string fmt_cells(int lo, int hi) {
    return "x" + std::to_string(lo) + "-" + std::to_string(hi);
}

}  // namespace scn

// ---------------------------------------------------------------------------
// Spin half

/// Spin half in zero field, alone and with a nondestructive S_x measuring
/// apparatus (ready X, outcomes X+ and X-). The measurement acts between
/// t2 and t3 of the measured model and is completed to a unitary by
/// exchanging X with X+ (or X-) in each x-spin sector.
inline Scenario build_spin_half() {
    using namespace scn;
    const double r = 1.0 / std::sqrt(2.0);
    Scenario s;
    s.name = "spin-half";

    Model free;
    free.name = "free";
    free.dynamics = trivial_dynamics("free", {0, 1, 2, 3}, 2);
    free.basis_labels = {"zplus", "zminus"};
    free.kets = {{"zplus", ket({1, 0})}, {"zminus", ket({0, 1})}, {"xplus", ket({r, r})}, {"xminus", ket({r, -r})}};
    for (const auto &[n, k] : free.kets) free.projectors.emplace(n, Projector::onto(k));
    const Decomposition z = decomposition({{"zplus", free.projector("zplus")}, {"zminus", free.projector("zminus")}});
    const Decomposition x = decomposition({{"xplus", free.projector("xplus")}, {"xminus", free.projector("xminus")}});

    // Apparatus levels: X (ready), Xplus, Xminus.
    const Operator px = free.projector("xplus").op(), mx = free.projector("xminus").op();
    const Operator meas = tensor_product(px, swap_levels(3, 0, 1)) + tensor_product(mx, swap_levels(3, 0, 2));
    const Operator id6 = Operator::Identity(6, 6);
    Model measured;
    measured.name = "measured";
    measured.dynamics = dynamics("measured", {0, 1, 2, 3, 4}, {id6, id6, meas, id6});
    measured.basis_labels = {"zplus.X", "zplus.Xplus", "zplus.Xminus", "zminus.X", "zminus.Xplus", "zminus.Xminus"};
    const Ket kx = basis_ket(3, 0), kxp = basis_ket(3, 1), kxm = basis_ket(3, 2);
    measured.kets["Psi0"] = tensor_product(free.ket("zplus"), kx);
    measured.kets["S"] = r * (tensor_product(free.ket("xplus"), kxp) + tensor_product(free.ket("xminus"), kxm));
    const Decomposition app = basis({"X", "Xplus", "Xminus"});
    for (const auto &m : app.members()) measured.projectors.emplace(m.label, tensor_product(Projector::identity(2), m.projector));
    for (const auto &m : x.members()) measured.projectors.emplace(m.label, tensor_product(m.projector, Projector::identity(3)));
    for (const auto &m : z.members()) measured.projectors.emplace(m.label, tensor_product(m.projector, Projector::identity(3)));
    measured.projectors.emplace("S", Projector::onto(measured.kets["S"]));
    measured.projectors.emplace("Psi0", Projector::onto(measured.kets["Psi0"]));
    const Eigen::Index d6 = 6;
    auto pp = [&](const std::string &spin, const Ket &a) {
        return Projector::onto(tensor_product(free.ket(spin), a));
    };

    s.models = {free, measured};

    s.families.push_back(family("F0", free, "zplus", {z, z, z}));
    s.families.push_back(family("F1", free, "zplus", {x, x, x}));
    s.families.push_back(family("F2", free, "zplus", {z, x, x}));
    s.families.push_back(family("F1-remerge", free, "zplus", {x, x, z}));

    const Decomposition zX = with_rest({{"zplus.X", pp("zplus", kx)}}, d6);
    const Decomposition sS = with_rest({{"S", measured.projector("S")}}, d6);
    const Decomposition xX = with_rest({{"xplus.X", pp("xplus", kx)}, {"xminus.X", pp("xminus", kx)}}, d6);
    const Decomposition xXo =
        with_rest({{"xplus.Xplus", pp("xplus", kxp)}, {"xminus.Xminus", pp("xminus", kxm)}}, d6);
    s.families.push_back(family("G0", measured, "Psi0", {zX, zX, sS, sS}));
    s.families.push_back(family("G1", measured, "Psi0", {xX, xX, xXo, xXo}));
    s.families.push_back(family("G2", measured, "Psi0", {zX, xX, xXo, xXo}));

    const auto P = Provenance::published;
    const auto D = Provenance::derived;
    s.expectations.push_back(probability_of("F0 unitary history", "F0", "zplus/zplus/zplus/zplus", 1.0, P));
    s.expectations.push_back(probability_of("F1 x+ branch", "F1", "zplus/xplus/xplus/xplus", 0.5, P));
    s.expectations.push_back(probability_of("F1 x- branch", "F1", "zplus/xminus/xminus/xminus", 0.5, P));
    s.expectations.push_back(probability_of("F2 collapse at t2", "F2", "zplus/zplus/xplus/xplus", 0.5, P));
    s.expectations.push_back(consistency("re-merged x histories violate consistency", "F1-remerge", false, P));
    s.expectations.push_back(compatibility("F0 and F1 incompatible", "F0", "F1", "kinematic-incompatible", D));
    s.expectations.push_back(compatibility("F1 and F2 incompatible", "F1", "F2", "kinematic-incompatible", D));
    s.expectations.push_back(compatibility("F0 and F2 incompatible", "F0", "F2", "kinematic-incompatible", D));
    s.expectations.push_back(probability_of("G0 unitary MQS history", "G0", "Psi0/zplus.X/zplus.X/S/S", 1.0, D));
    s.expectations.push_back(probability_of("G1 outcome X+", "G1", "Psi0/xplus.X/xplus.X/xplus.Xplus/xplus.Xplus", 0.5, D));
    s.expectations.push_back(conditional("G1 retrodiction from X+", "G1", "t1=xplus", "t3=Xplus", 1.0, P));
    s.expectations.push_back(conditional("G1 retrodiction from X-", "G1", "t1=xminus", "t4=Xminus", 1.0, P));
    s.expectations.push_back(probability_of("G2 outcome X-", "G2", "Psi0/zplus.X/xminus.X/xminus.Xminus/xminus.Xminus", 0.5, D));
    {
        Expectation e;
        e.description = "MQS projector S does not commute with the outcome X+";
        e.family = "G0";
        e.query = "||[S, Xplus]||";
        e.expected = 0.1;
        e.comparison = "gt";
        e.source = D;
        e.evaluate = [](const Scenario &sc) {
            const Model &m = sc.model("measured");
            return commutator(m.projector("S").op(), m.projector("Xplus").op()).norm();
        };
        s.expectations.push_back(e);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Wave packet

struct WavepacketGeometry {
    int n_cells = 24;
    int source = 12;
    int det_a = 6;
    int det_b = 21;
    int width = 3;
};

/// Derived timing of the wave-packet model: packets leave the source at
/// tick 0 and move one cell per tick.
struct WavepacketTiming {
    int tick_a = 0;  // arrival at detector A
    int tick_b = 0;  // arrival at detector B
    std::vector<double> ticks;
};

inline WavepacketTiming wavepacket_timing(const WavepacketGeometry &g) {
    if (g.n_cells < 4 || g.width < 1) throw InvalidValue("wavepacket: need at least 4 cells and a positive width");
    if (!(0 <= g.det_a && g.det_a < g.source && g.source < g.det_b && g.det_b < g.n_cells))
        throw InvalidValue("wavepacket: detectors must lie on either side of the source");
    WavepacketTiming t;
    t.tick_a = g.source - g.det_a;
    t.tick_b = g.det_b - g.source;
    if (!(t.tick_a < t.tick_b)) throw InvalidValue("wavepacket: detector A must be closer to the source than B");
    if (t.tick_a < 2 || t.tick_b - t.tick_a < 2)
        throw InvalidValue("wavepacket: detectors too close to the source or to each other");
    const int t3 = t.tick_b + 1;
    if (g.source - t3 < 0 || g.source + t3 >= g.n_cells)
        throw InvalidValue("wavepacket: lattice too short for the packets to stay inside");
    t.ticks = {0.0, static_cast<double>(t.tick_a / 2), static_cast<double>((t.tick_a + t.tick_b) / 2),
               static_cast<double>(t3)};
    return t;
}

namespace scn {

inline Eigen::Index wp_index(int cell, int dir) { return 2 * cell + dir; }

inline Operator wp_shift(int n) {
    const Eigen::Index d = 2 * n + 1;
    std::vector<Eigen::Index> image(static_cast<std::size_t>(d));
    for (int c = 0; c < n; ++c) {
        image[static_cast<std::size_t>(wp_index(c, 0))] = c > 0 ? wp_index(c - 1, 0) : wp_index(0, 1);
        image[static_cast<std::size_t>(wp_index(c, 1))] = c < n - 1 ? wp_index(c + 1, 1) : wp_index(n - 1, 0);
    }
    image[static_cast<std::size_t>(d - 1)] = d - 1;
    return permutation(image);
}

/// Cell intervals [lo, hi] of the given width covering the lattice.
inline std::vector<std::pair<int, int>> wp_intervals(int n, int width) {
    std::vector<std::pair<int, int>> out;
    for (int lo = 0; lo < n; lo += width) out.emplace_back(lo, std::min(n - 1, lo + width - 1));
    return out;
}

inline std::string wp_interval_of(int n, int width, int cell) {
    for (const auto &[lo, hi] : wp_intervals(n, width))
        if (lo <= cell && cell <= hi) return fmt_cells(lo, hi);
    throw InvalidValue("cell outside the lattice");
}

}  // namespace scn

/// One particle on a lattice of cells with a left/right mover label and an
/// absorbed state, optionally coupled to two detectors. Each tick shifts
/// movers by one cell (reflecting at the ends); on the arrival tick a
/// detector exchanges |packet, ready> with |absorbed, triggered>, which is
/// its own unitary completion.
inline Scenario build_wavepacket(const WavepacketGeometry &g = {}) {
    using namespace scn;
    const WavepacketTiming tm = wavepacket_timing(g);
    const int n = g.n_cells;
    const Eigen::Index dp = 2 * n + 1, absorbed = dp - 1, dd = dp * 4;
    const double r = 1.0 / std::sqrt(2.0);
    Scenario s;
    s.name = "wavepacket";

    const Operator shift = wp_shift(n);
    auto det_index = [&](Eigen::Index p, int a, int b) { return p * 4 + a * 2 + b; };
    Operator da = Operator::Identity(dd, dd), db = Operator::Identity(dd, dd);
    for (int b = 0; b < 2; ++b)
        da = (swap_levels(dd, det_index(wp_index(g.det_a, 0), 0, b), det_index(absorbed, 1, b)) * da).eval();
    for (int a = 0; a < 2; ++a)
        db = (swap_levels(dd, det_index(wp_index(g.det_b, 1), a, 0), det_index(absorbed, a, 1)) * db).eval();
    const Operator shift_d = tensor_product(shift, Operator::Identity(4, 4));

    std::vector<Operator> free_steps, det_steps;
    for (std::size_t j = 0; j + 1 < tm.ticks.size(); ++j) {
        Operator uf = Operator::Identity(dp, dp), ud = Operator::Identity(dd, dd);
        for (int k = static_cast<int>(tm.ticks[j]) + 1; k <= static_cast<int>(tm.ticks[j + 1]); ++k) {
            uf = (shift * uf).eval();
            Operator tick = shift_d;
            if (k == tm.tick_a) tick = (da * tick).eval();
            if (k == tm.tick_b) tick = (db * tick).eval();
            ud = (tick * ud).eval();
        }
        free_steps.push_back(uf);
        det_steps.push_back(ud);
    }

    Model free;
    free.name = "free";
    free.dynamics = dynamics("free", tm.ticks, free_steps);
    for (int c = 0; c < n; ++c) {
        free.basis_labels.push_back(std::to_string(c) + "L");
        free.basis_labels.push_back(std::to_string(c) + "R");
    }
    free.basis_labels.push_back("absorbed");
    free.kets["psi0"] = r * (basis_ket(dp, wp_index(g.source, 0)) + basis_ket(dp, wp_index(g.source, 1)));
    for (std::size_t j = 1; j < tm.ticks.size(); ++j)
        free.kets["psi" + std::to_string(j)] = free.dynamics->propagator(j, 0) * free.kets["psi0"];

    std::vector<Member> interval_members;
    for (const auto &[lo, hi] : wp_intervals(n, g.width)) {
        Operator p = Operator::Zero(dp, dp);
        for (int c = lo; c <= hi; ++c) p(wp_index(c, 0), wp_index(c, 0)) = p(wp_index(c, 1), wp_index(c, 1)) = 1.0;
        interval_members.push_back({fmt_cells(lo, hi), Projector(p)});
    }
    interval_members.push_back({"absorbed", Projector::onto(basis_ket(dp, absorbed))});
    const Decomposition intervals = decomposition(interval_members);
    for (const auto &m : intervals.members()) free.projectors.emplace(m.label, m.projector);

    Model det;
    det.name = "detectors";
    det.dynamics = dynamics("detectors", tm.ticks, det_steps);
    for (const auto &p : free.basis_labels)
        for (const char *a : {"A", "Astar"})
            for (const char *b : {"B", "Bstar"}) det.basis_labels.push_back(p + "." + a + "." + b);
    const Ket ka = basis_ket(2, 0), kb = basis_ket(2, 0);
    det.kets["Psi0"] = tensor_product(free.kets["psi0"], ka, kb);
    for (std::size_t j = 1; j < tm.ticks.size(); ++j)
        det.kets["Psi" + std::to_string(j)] = det.dynamics->propagator(j, 0) * det.kets["Psi0"];
    const Decomposition dA = basis({"A", "Astar"}), dB = basis({"B", "Bstar"});
    const Decomposition detectors = lift(product(dA, dB), dp, 1);
    for (const auto &m : intervals.members())
        det.projectors.emplace(m.label, tensor_product(m.projector, Projector::identity(4)));
    for (const auto &m : dA.members())
        det.projectors.emplace(m.label, tensor_product(Projector::identity(dp), m.projector, Projector::identity(2)));
    for (const auto &m : dB.members())
        det.projectors.emplace(m.label, tensor_product(Projector::identity(dp), Projector::identity(2), m.projector));

    // Packet cells at t1, t2 (without detectors) and t3.
    const int t1 = static_cast<int>(tm.ticks[1]), t2 = static_cast<int>(tm.ticks[2]), t3 = static_cast<int>(tm.ticks[3]);
    const std::string a1 = wp_interval_of(n, g.width, g.source - t1), b1 = wp_interval_of(n, g.width, g.source + t1);
    const std::string a2 = wp_interval_of(n, g.width, g.source - t2), b2 = wp_interval_of(n, g.width, g.source + t2);
    const std::string a3 = wp_interval_of(n, g.width, g.source - t3), b3 = wp_interval_of(n, g.width, g.source + t3);
    const Ket phib2 = basis_ket(dp, wp_index(g.source + t2, 1));
    free.kets["phib2"] = phib2;
    det.kets["phib2"] = tensor_product(phib2, ka, kb);

    s.models = {free, det};

    std::vector<Decomposition> unitary_f, unitary_g;
    for (std::size_t j = 1; j < tm.ticks.size(); ++j) {
        unitary_f.push_back(pure_slot("psi" + std::to_string(j), free.kets["psi" + std::to_string(j)]));
        unitary_g.push_back(pure_slot("Psi" + std::to_string(j), det.kets["Psi" + std::to_string(j)]));
    }
    s.families.push_back(family("F0", free, "psi0", unitary_f));
    s.families.push_back(family("F1", free, "psi0", {intervals, intervals, intervals}));
    s.families.push_back(family("F2", free, "psi0", {unitary_f[0], intervals, intervals}));
    s.families.push_back(family("F2-remerge", free, "psi0", {unitary_f[0], intervals, unitary_f[2]}));

    const Decomposition located = product(intervals, dA, dB);
    s.families.push_back(family("G0", det, "Psi0", unitary_g));
    s.families.push_back(family("G1", det, "Psi0", {located, detectors, detectors}));
    const Projector psi1ab = Projector::onto(det.kets["Psi1"]);
    const Projector astar_b = tensor_product(Projector::identity(dp), dA[1].projector, dB[0].projector);
    s.families.push_back(family("G2", det, "Psi0",
                                {with_rest({{"psi1.A.B", psi1ab}}, dd),
                                 with_rest({{"Astar.B", astar_b}, {"phib.A.B", Projector::onto(det.kets["phib2"])}}, dd),
                                 detectors}));

    const auto P = Provenance::published;
    const auto D = Provenance::derived;
    s.expectations.push_back(probability_of("F0 unitary history", "F0", "psi0/psi1/psi2/psi3", 1.0, P));
    s.expectations.push_back(support_size("F1 support has two trajectories", "F1", 2, P));
    s.expectations.push_back(probability_of("F1 trajectory a", "F1", "psi0/" + a1 + "/" + a2 + "/" + a3, 0.5, P));
    s.expectations.push_back(probability_of("F1 trajectory b", "F1", "psi0/" + b1 + "/" + b2 + "/" + b3, 0.5, P));
    s.expectations.push_back(probability_of("F2 trajectory b after t1", "F2", "psi0/psi1/" + b2 + "/" + b3, 0.5, P));
    s.expectations.push_back(consistency("F2 re-merged onto psi(t3) is inconsistent", "F2-remerge", false, P));
    s.expectations.push_back(compatibility("F0 and F1 incompatible", "F0", "F1", "kinematic-incompatible", P));
    s.expectations.push_back(probability_of("G0 unitary history", "G0", "Psi0/Psi1/Psi2/Psi3", 1.0, P));
    s.expectations.push_back(probability_of("G1 detection by A", "G1", "Psi0/" + a1 + ".A.B/Astar.B/Astar.B", 0.5, D));
    s.expectations.push_back(probability_of("G1 detection by B", "G1", "Psi0/" + b1 + ".A.B/A.B/A.Bstar", 0.5, D));
    s.expectations.push_back(conditional("A untriggered at t2 implies trajectory b at t1", "G1", "t1=" + b1, "t2=A", 1.0, P));
    s.expectations.push_back(conditional("A triggered implies trajectory a at t1", "G1", "t1=" + a1, "t3=Astar", 1.0, P));
    s.expectations.push_back(conditional("A untriggered at t2 implies B triggers at t3", "G1", "t3=Bstar", "t2=A", 1.0, P));
    s.expectations.push_back(probability_of("G2 collapse at t2, B branch", "G2", "Psi0/psi1.A.B/phib.A.B/A.Bstar", 0.5, D));

    // Events on the rest-frame surfaces at the grid times.
    const double xmax = static_cast<double>(n - 1);
    for (std::size_t j = 1; j < tm.ticks.size(); ++j) {
        const Hypersurface surf = Hypersurface::flat("t" + std::to_string(j), tm.ticks[j], 0.0, xmax);
        for (const auto &[lo, hi] : wp_intervals(n, g.width)) {
            std::vector<int> cells(static_cast<std::size_t>(hi - lo + 1));
            std::iota(cells.begin(), cells.end(), lo);
            const std::string lab = fmt_cells(lo, hi);
            for (const char *model : {"free", "detectors"})
                s.events.push_back(TaggedEvent::local(std::string(model) + "/" + lab + "@t" + std::to_string(j),
                                                      cells_at(cells, surf), {model, j, lab}));
        }
        for (const char *lab : {"A", "Astar"})
            s.events.push_back(TaggedEvent::local(std::string("detectors/") + lab + "@t" + std::to_string(j),
                                                  cells_at({g.det_a}, surf), {"detectors", j, lab}));
        for (const char *lab : {"B", "Bstar"})
            s.events.push_back(TaggedEvent::local(std::string("detectors/") + lab + "@t" + std::to_string(j),
                                                  cells_at({g.det_b}, surf), {"detectors", j, lab}));
    }
    return s;
}

// ---------------------------------------------------------------------------
// EPR

/// Two spin-half particles in the singlet state, without and with an S_az
/// apparatus (Z ready, outcomes Zplus and Zminus) acting between t1 and t2.
/// Positions are not part of the Hilbert space; event locations follow
/// trajectories x = 12 - t (particle a) and x = 12 + t (particle b).
inline Scenario build_epr() {
    using namespace scn;
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<double> times = {0, 3, 7, 10};
    Scenario s;
    s.name = "epr";

    const Ket zp = ket({1, 0}), zm = ket({0, 1}), xp = ket({r, r}), xm = ket({r, -r});
    const Ket s0 = r * (tensor_product(zp, zm) - tensor_product(zm, zp));
    const Decomposition za = basis({"zaplus", "zaminus"}), zb = basis({"zbplus", "zbminus"});
    const Decomposition xa = decomposition({{"xaplus", Projector::onto(xp)}, {"xaminus", Projector::onto(xm)}});
    const Decomposition xb = decomposition({{"xbplus", Projector::onto(xp)}, {"xbminus", Projector::onto(xm)}});
    const Projector i2 = Projector::identity(2), i3 = Projector::identity(3);

    Model free;
    free.name = "free";
    free.dynamics = trivial_dynamics("free", times, 4);
    free.basis_labels = {"zaplus.zbplus", "zaplus.zbminus", "zaminus.zbplus", "zaminus.zbminus"};
    free.kets["psi0"] = s0;
    free.kets["s0"] = s0;
    free.projectors.emplace("s0", Projector::onto(s0));
    for (const Decomposition *d : {&za, &xa})
        for (const auto &m : d->members()) free.projectors.emplace(m.label, tensor_product(m.projector, i2));
    for (const Decomposition *d : {&zb, &xb})
        for (const auto &m : d->members()) free.projectors.emplace(m.label, tensor_product(i2, m.projector));

    // Apparatus levels Z, Zplus, Zminus; the measurement exchanges Z with the
    // outcome matching S_az.
    const Operator meas = tensor_product(za[0].projector.op(), Operator::Identity(2, 2), swap_levels(3, 0, 1)) +
                          tensor_product(za[1].projector.op(), Operator::Identity(2, 2), swap_levels(3, 0, 2));
    const Operator id12 = Operator::Identity(12, 12);
    Model measured;
    measured.name = "measured";
    measured.dynamics = dynamics("measured", times, {id12, meas, id12});
    for (const auto &ab : free.basis_labels)
        for (const char *z : {"Z", "Zplus", "Zminus"}) measured.basis_labels.push_back(ab + "." + z);
    const Decomposition app = basis({"Z", "Zplus", "Zminus"});
    measured.kets["Psi0"] = tensor_product(s0, basis_ket(3, 0));
    for (std::size_t j = 1; j < times.size(); ++j)
        measured.kets["Psi" + std::to_string(j)] = measured.dynamics->propagator(j, 0) * measured.kets["Psi0"];
    for (const auto &[n, p] : free.projectors) measured.projectors.emplace(n, tensor_product(p, i3));
    for (const auto &m : app.members())
        measured.projectors.emplace(m.label, tensor_product(Projector::identity(4), m.projector));

    s.models = {free, measured};

    const Decomposition zz = product(za, zb), xx = product(xa, xb), zx = product(za, xb);
    const Decomposition singlet = pure_slot("s0", s0);
    s.families.push_back(family("F0", free, "psi0", {singlet, singlet, singlet}));
    s.families.push_back(family("F1", free, "psi0", {zz, zz, zz}));
    s.families.push_back(family("F2", free, "psi0", {singlet, zz, zz}));
    s.families.push_back(family("F2-remerge", free, "psi0", {singlet, zz, singlet}));
    s.families.push_back(family("F3", free, "psi0", {xx, xx, xx}));
    s.families.push_back(family("F4", free, "psi0", {zx, zx, zx}));

    const Decomposition zzZ = product(zz, app), zxZ = product(zx, app);
    const Decomposition s0Z = with_rest({{"s0.Z", Projector::onto(measured.kets["Psi0"])}}, 12);
    std::vector<Decomposition> unitary;
    for (std::size_t j = 1; j < times.size(); ++j)
        unitary.push_back(pure_slot("Psi" + std::to_string(j), measured.kets["Psi" + std::to_string(j)]));
    s.families.push_back(family("G0", measured, "Psi0", unitary));
    s.families.push_back(family("G1", measured, "Psi0", {zzZ, zzZ, zzZ}));
    s.families.push_back(family("G2", measured, "Psi0", {s0Z, zzZ, zzZ}));
    s.families.push_back(family("G4", measured, "Psi0", {s0Z, zxZ, zxZ}));

    const auto P = Provenance::published;
    const auto D = Provenance::derived;
    s.expectations.push_back(probability_of("F0 unitary history", "F0", "psi0/s0/s0/s0", 1.0, P));
    s.expectations.push_back(probability_of("F1 a up, b down", "F1", "psi0/zaplus.zbminus/zaplus.zbminus/zaplus.zbminus", 0.5, P));
    s.expectations.push_back(probability_of("F1 a down, b up", "F1", "psi0/zaminus.zbplus/zaminus.zbplus/zaminus.zbplus", 0.5, P));
    s.expectations.push_back(predicate("F1 perfect anticorrelation", "F1", "t1=zaplus.zbminus|zaminus.zbplus,t3=zaplus.zbminus|zaminus.zbplus", 1.0, P));
    s.expectations.push_back(probability_of("F2 collapse after t1", "F2", "psi0/s0/zaplus.zbminus/zaplus.zbminus", 0.5, P));
    s.expectations.push_back(consistency("F2 cannot be re-merged onto s0", "F2-remerge", false, P));
    s.expectations.push_back(probability_of("F3 x anticorrelation", "F3", "psi0/xaplus.xbminus/xaplus.xbminus/xaplus.xbminus", 0.5, P));
    s.expectations.push_back(support_size("F4 has four histories", "F4", 4, P));
    for (const char *a : {"zaplus", "zaminus"})
        for (const char *b : {"xbplus", "xbminus"}) {
            const std::string lab = std::string(a) + "." + b;
            s.expectations.push_back(probability_of("F4 " + lab, "F4", "psi0/" + lab + "/" + lab + "/" + lab, 0.25, P));
        }
    s.expectations.push_back(conditional("F4 S_bx independent of S_az", "F4", "t1=xbplus", "t1=zaplus", 0.5, P));
    s.expectations.push_back(conditional("F4 S_bx independent of S_az (minus)", "F4", "t2=xbminus", "t2=zaminus", 0.5, P));
    s.expectations.push_back(compatibility("F1 and F3 incompatible", "F1", "F3", "kinematic-incompatible", D));
    s.expectations.push_back(probability_of("G1 outcome Z+", "G1", "Psi0/zaplus.zbminus.Z/zaplus.zbminus.Zplus/zaplus.zbminus.Zplus", 0.5, P));
    s.expectations.push_back(probability_of("G1 outcome Z-", "G1", "Psi0/zaminus.zbplus.Z/zaminus.zbplus.Zminus/zaminus.zbplus.Zminus", 0.5, P));
    s.expectations.push_back(conditional("G1 outcome Z+ reveals S_bz = -1/2", "G1", "t1=zbminus", "t2=Zplus", 1.0, P));
    s.expectations.push_back(probability_of("G2 collapse with measurement", "G2", "Psi0/s0.Z/zaplus.zbminus.Zplus/zaplus.zbminus.Zplus", 0.5, D));
    s.expectations.push_back(support_size("G4 has four histories", "G4", 4, D));
    s.expectations.push_back(conditional("G4 b uncorrelated with the outcome", "G4", "t2=xbplus", "t2=Zplus", 0.5, P));

    // Local spin events along the two trajectories, and the singlet as an
    // entangled event on each rest-frame surface.
    for (std::size_t j = 1; j < times.size(); ++j) {
        const Hypersurface surf = Hypersurface::flat("t" + std::to_string(j), times[j], 0.0, 24.0);
        const int ca = 12 - static_cast<int>(times[j]), cb = 12 + static_cast<int>(times[j]);
        for (const char *model : {"free", "measured"}) {
            const std::string m = model;
            for (const char *lab : {"zaplus", "zaminus", "xaplus", "xaminus"})
                s.events.push_back(TaggedEvent::local(m + "/" + lab + "@t" + std::to_string(j), cells_at({ca}, surf), {m, j, lab}));
            for (const char *lab : {"zbplus", "zbminus", "xbplus", "xbminus"})
                s.events.push_back(TaggedEvent::local(m + "/" + lab + "@t" + std::to_string(j), cells_at({cb}, surf), {m, j, lab}));
            s.events.push_back(TaggedEvent::entangled_over(m + "/s0@t" + std::to_string(j),
                                                           {cells_at({ca}, surf), cells_at({cb}, surf)}, {m, j, "s0"}));
        }
        for (const char *lab : {"Zplus", "Zminus"})
            s.events.push_back(TaggedEvent::local(std::string("measured/") + lab + "@t" + std::to_string(j),
                                                  cells_at({ca}, surf), {"measured", j, lab}));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Hardy

/// Two interferometers: particle a in arms c, d (outputs e, f) and particle b
/// in arms cbar, dbar (outputs ebar, fbar). Each factor keeps one basis and
/// the beam splitter maps c -> (e + f)/sqrt2 and d -> (-e + f)/sqrt2. The
/// frames L, L' and L'' differ only in which beam splitter fires in which
/// step. With detectors, a nondestructive readout (ready, E, F per side)
/// follows both beam splitters.
inline Scenario build_hardy(bool with_detectors = false) {
    using namespace scn;
    const double r = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0), r6 = 1.0 / std::sqrt(6.0);
    const std::vector<double> times = {0, 4, 10};
    Scenario s;
    s.name = "hardy";

    Operator bs(2, 2);
    bs << r, -r, r, r;
    const Operator i2 = Operator::Identity(2, 2), i4 = Operator::Identity(4, 4);
    const Ket c = basis_ket(2, 0), d = basis_ket(2, 1);
    const Ket psi0 = r3 * (tensor_product(c, c) + tensor_product(c, d) + tensor_product(d, c));
    const Ket psi1p = r6 * (2.0 * tensor_product(c, d) + tensor_product(d, d) + tensor_product(d, c));
    const Ket psi1pp = r6 * (2.0 * tensor_product(d, c) + tensor_product(d, d) + tensor_product(c, d));

    const Decomposition arm_a = basis({"c", "d"}), arm_b = basis({"cbar", "dbar"});
    const Decomposition out_a = basis({"e", "f"}), out_b = basis({"ebar", "fbar"});

    auto make_model = [&](const std::string &name, const Operator &s0, const Operator &s1) {
        Model m;
        m.name = name;
        m.dynamics = dynamics(name, times, {s0, s1});
        m.basis_labels = {"c.cbar", "c.dbar", "d.cbar", "d.dbar"};
        m.kets["psi0"] = psi0;
        m.kets["psi1prime"] = psi1p;
        m.kets["psi1doubleprime"] = psi1pp;
        for (std::size_t j = 1; j < times.size(); ++j)
            m.kets["psi" + std::to_string(j)] = m.dynamics->propagator(j, 0) * psi0;
        for (const Decomposition *dec : {&arm_a, &out_a})
            for (const auto &mm : dec->members()) m.projectors.emplace(mm.label, tensor_product(mm.projector, Projector::identity(2)));
        for (const Decomposition *dec : {&arm_b, &out_b})
            for (const auto &mm : dec->members()) m.projectors.emplace(mm.label, tensor_product(Projector::identity(2), mm.projector));
        return m;
    };
    const Model l = make_model("L", i4, tensor_product(bs, bs));
    const Model lp = make_model("Lprime", tensor_product(i2, bs), tensor_product(bs, i2));
    const Model lpp = make_model("Ldoubleprime", tensor_product(bs, i2), tensor_product(i2, bs));
    s.models = {l, lp, lpp};

    s.families.push_back(family("unitary", l, "psi0", {pure_slot("psi1", l.kets.at("psi1")), pure_slot("psi2", l.kets.at("psi2"))}));
    s.families.push_back(family("unitary-output", l, "psi0", {Decomposition(), product(out_a, out_b)}));
    s.families.push_back(family("arm-pair", l, "psi0", {product(arm_a, arm_b), Decomposition()}));
    s.families.push_back(family("forbidden", l, "psi0", {lift(arm_a, 1, 2), lift(out_a, 1, 2)}));
    s.families.push_back(family("inference-prime", lp, "psi0", {product(arm_a, out_b), Decomposition()}));
    s.families.push_back(family("inference-doubleprime", lpp, "psi0", {product(out_a, arm_b), Decomposition()}));

    const auto P = Provenance::published;
    const auto D = Provenance::derived;
    s.expectations.push_back(tokens("joint detection in E and Ebar", "unitary-output", {"e", "ebar"}, 1.0 / 12.0, P));
    s.expectations.push_back(tokens("joint detection in F and Fbar", "unitary-output", {"f", "fbar"}, 9.0 / 12.0, P));
    s.expectations.push_back(predicate("no d.dbar component at t1", "arm-pair", "t1=d,t1=dbar", 0.0, P, 1e-12));
    s.expectations.push_back(probability_of("c.cbar at t1", "arm-pair", "psi0/c.cbar/I", 1.0 / 3.0, P));
    s.expectations.push_back(conditional("Ebar' implies d' (frame L')", "inference-prime", "t1=d", "t1=ebar", 1.0, P));
    s.expectations.push_back(conditional("E'' implies dbar'' (frame L'')", "inference-doubleprime", "t1=dbar", "t1=e", 1.0, P));
    s.expectations.push_back(consistency("a-arm at t1 with a-outcome at t2 is inconsistent", "forbidden", false, P));
    s.expectations.push_back(overlap_above("forbidden family overlap", "forbidden", 0.1, D));
    s.expectations.push_back(consistency("unitary family is consistent", "unitary", true, Provenance::trivial));
    {
        Expectation e;
        e.description = "psi'_1 is psi0 after the b beam splitter";
        e.family = "inference-prime";
        e.query = "|<psi1prime|T(t1,t0) psi0>|";
        e.expected = 1.0;
        e.source = P;
        e.evaluate = [](const Scenario &sc) {
            const Model &m = sc.model("Lprime");
            return std::abs(m.ket("psi1prime").dot(m.ket("psi1")));
        };
        s.expectations.push_back(e);
    }
    {
        Expectation e;
        e.description = "psi''_1 is psi0 after the a beam splitter";
        e.family = "inference-doubleprime";
        e.query = "|<psi1doubleprime|T(t1,t0) psi0>|";
        e.expected = 1.0;
        e.source = P;
        e.evaluate = [](const Scenario &sc) {
            const Model &m = sc.model("Ldoubleprime");
            return std::abs(m.ket("psi1doubleprime").dot(m.ket("psi1")));
        };
        s.expectations.push_back(e);
    }

    if (with_detectors) {
        // Readout per side: exchange the ready state with E (or F) in the e
        // (or f) sector.
        // Basis order a, b, Da, Db; read_b acts on b and Db.
        Operator read = Operator::Zero(36, 36);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int x = 0; x < 3; ++x)
                    for (int y = 0; y < 3; ++y) {
                        const Eigen::Index from = ((a * 2 + b) * 3 + x) * 3 + y;
                        const int xa = (x == 0) ? 1 + a : (x == 1 + a ? 0 : x);
                        const int yb = (y == 0) ? 1 + b : (y == 1 + b ? 0 : y);
                        read(((a * 2 + b) * 3 + xa) * 3 + yb, from) = 1.0;
                    }
        const Operator i36 = Operator::Identity(36, 36);
        const std::vector<double> dt = {0, 4, 10, 12};
        Model det;
        det.name = "detected";
        det.dynamics = dynamics("detected", dt, {i36, tensor_product(tensor_product(bs, bs), Operator::Identity(9, 9)), read});
        for (const auto &ab : l.basis_labels)
            for (const char *x : {"Da", "E", "F"})
                for (const char *y : {"Db", "Ebar", "Fbar"}) det.basis_labels.push_back(ab + "." + x + "." + y);
        det.kets["Psi0"] = tensor_product(psi0, basis_ket(3, 0), basis_ket(3, 0));
        const Decomposition da = basis({"Da", "E", "F"}), db = basis({"Db", "Ebar", "Fbar"});
        for (const auto &m : da.members())
            det.projectors.emplace(m.label, tensor_product(Projector::identity(4), m.projector, Projector::identity(3)));
        for (const auto &m : db.members())
            det.projectors.emplace(m.label, tensor_product(Projector::identity(4), Projector::identity(3), m.projector));
        s.models.push_back(det);
        s.families.push_back(family("detected-output", det, "Psi0", {Decomposition(), Decomposition(), lift(product(da, db), 4, 1)}));
        s.expectations.push_back(tokens("detectors E and Ebar both fire", "detected-output", {"E", "Ebar"}, 1.0 / 12.0, P));
        s.expectations.push_back(tokens("detector F fires", "detected-output", {"F"}, 10.0 / 12.0, D));
    }

    // Spacetime points of Fig. 7(a): arm passage at t1 and detection at t2.
    const Hypersurface s1 = Hypersurface::flat("t1", 4.0, 0.0, 24.0), s2 = Hypersurface::flat("t2", 10.0, 0.0, 24.0);
    s.events.push_back(TaggedEvent::local("d1", cells_at({8}, s1), {"L", 1, "d"}));
    s.events.push_back(TaggedEvent::local("dbar1", cells_at({16}, s1), {"L", 1, "dbar"}));
    s.events.push_back(TaggedEvent::local("E2", cells_at({2}, s2), {"L", 2, "e"}));
    s.events.push_back(TaggedEvent::local("Ebar2", cells_at({22}, s2), {"L", 2, "ebar"}));
    return s;
}

// ---------------------------------------------------------------------------
// Registry and helpers shared by the checks

inline std::vector<std::string> scenario_names() { return {"spin-half", "wavepacket", "epr", "hardy"}; }

inline Scenario build_scenario(const std::string &name) {
    if (name == "spin-half") return build_spin_half();
    if (name == "wavepacket") return build_wavepacket();
    if (name == "epr") return build_epr();
    if (name == "hardy") return build_hardy(true);
    throw LabelNotFound("unknown scenario '" + name + "'");
}

/// Index pairs of local events of one model whose regions are spacelike
/// separated.
inline std::vector<std::pair<std::size_t, std::size_t>> spacelike_local_pairs(const Scenario &s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < s.events.size(); ++i)
        for (std::size_t j = i + 1; j < s.events.size(); ++j) {
            const TaggedEvent &a = s.events[i], &b = s.events[j];
            if (a.entangled || b.entangled || a.projector.model != b.projector.model) continue;
            if (spacelike_separated(a, b)) out.emplace_back(i, j);
        }
    return out;
}

/// A random basis permutation per model, the same at every time.
inline CovarianceMap relabeling_maps(const Scenario &s, unsigned seed) {
    std::mt19937 rng(seed);
    CovarianceMap c;
    for (const Model &m : s.models) {
        std::vector<Eigen::Index> image(static_cast<std::size_t>(m.dim()));
        std::iota(image.begin(), image.end(), Eigen::Index{0});
        std::shuffle(image.begin(), image.end(), rng);
        c.maps[m.name] = std::vector<Operator>(m.dynamics->grid().size(), scn::permutation(image));
    }
    return c;
}

/// Local events of the two EPR trajectories on the rest-frame surfaces
/// t = 3, 7, 10 together with events on surfaces of a frame moving at
/// v = 0.3. Every pair of these can be placed on a common foliation.
inline std::vector<TaggedEvent> embedding_local_configuration() {
    std::vector<TaggedEvent> ev;
    for (double t : {3.0, 7.0, 10.0}) {
        const Hypersurface h = Hypersurface::flat("L@" + fmt_num(t), t, 0.0, 24.0);
        const int d = static_cast<int>(t);
        ev.push_back(TaggedEvent::local("a@" + fmt_num(t), scn::cells_at({12 - d}, h)));
        ev.push_back(TaggedEvent::local("b@" + fmt_num(t), scn::cells_at({12 + d}, h)));
    }
    const Hypersurface p1 = Hypersurface::boosted("L'@3", 0.3, 12.0, 3.0, 0.0, 24.0);
    const Hypersurface p2 = Hypersurface::boosted("L'@7", 0.3, 12.0, 7.0, 0.0, 24.0);
    ev.push_back(TaggedEvent::local("a'@3", scn::cells_at({10}, p1)));
    ev.push_back(TaggedEvent::local("b'@3", scn::cells_at({16}, p1)));
    ev.push_back(TaggedEvent::local("a'@7", scn::cells_at({7}, p2)));
    ev.push_back(TaggedEvent::local("b'@7", scn::cells_at({22}, p2)));
    return ev;
}

/// The singlet as an entangled event on the rest-frame surface t = 3 and on
/// a surface of a frame moving at v = 0.5 that crosses it at x = 12. The
/// primed a-side region precedes the unprimed one while the unprimed b-side
/// region precedes the primed one, so no foliation holds both.
inline std::vector<TaggedEvent> embedding_entangled_configuration() {
    const Hypersurface flat = Hypersurface::flat("L@3", 3.0, 0.0, 24.0);
    const Hypersurface moving = Hypersurface::boosted("L'@3", 0.5, 12.0, 3.0, 0.0, 24.0);
    return {TaggedEvent::entangled_over("s0@t1", {scn::cells_at({8, 9, 10}, flat), scn::cells_at({14, 15, 16}, flat)}),
            TaggedEvent::entangled_over("s0'@t1'", {scn::cells_at({10, 11}, moving), scn::cells_at({16, 17, 18}, moving)})};
}

}  // namespace chist
