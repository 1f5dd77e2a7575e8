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
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chist/errors.hpp"

namespace chist {

/// A point of 1+1 dimensional Minkowski space with c = 1 cell per step.
struct SpacetimePoint {
    double x = 0.0;
    double t = 0.0;
};

enum class IntervalKind { timelike, spacelike, lightlike };

inline const char *to_string(IntervalKind k) {
    switch (k) {
        case IntervalKind::timelike:
            return "timelike";
        case IntervalKind::spacelike:
            return "spacelike";
        case IntervalKind::lightlike:
            return "lightlike";
    }
    return "?";
}

inline constexpr double kLightlikeBand = 1e-12;

inline IntervalKind classify_interval(const SpacetimePoint &p, const SpacetimePoint &q) {
    const double dt = q.t - p.t, dx = q.x - p.x;
    const double s = dt * dt - dx * dx;
    if (std::abs(s) < kLightlikeBand) return IntervalKind::lightlike;
    return s > 0 ? IntervalKind::timelike : IntervalKind::spacelike;
}

/// True when q lies in the causal future of p (inside or on the light cone).
inline bool causally_precedes(const SpacetimePoint &p, const SpacetimePoint &q) {
    return q.t > p.t && classify_interval(p, q) != IntervalKind::spacelike;
}

/// Lorentz boost with velocity v: x' = g(x - v t), t' = g(t - v x).
inline SpacetimePoint boost(const SpacetimePoint &p, double v) {
    if (!(std::abs(v) < 1.0)) throw InvalidValue("boost velocity must satisfy |v| < 1");
    const double g = 1.0 / std::sqrt(1.0 - v * v);
    return {g * (p.x - v * p.t), g * (p.t - v * p.x)};
}

/// Piecewise-linear surface t = tau(x) through the knots, constant beyond the
/// first and last knot. A surface is spacelike when every piece has
/// |slope| < 1.
class Hypersurface {
   public:
    Hypersurface() = default;

    Hypersurface(std::string name, std::vector<SpacetimePoint> knots) : name_(std::move(name)), knots_(std::move(knots)) {
        if (knots_.empty()) throw InvalidValue("hypersurface '" + name_ + "' needs at least one knot");
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            if (!std::isfinite(knots_[i].x) || !std::isfinite(knots_[i].t))
                throw NotFinite("hypersurface '" + name_ + "' has a non-finite knot");
            if (i > 0 && !(knots_[i].x > knots_[i - 1].x))
                throw InvalidValue("hypersurface '" + name_ + "' knots must have increasing x");
        }
    }

    static Hypersurface flat(std::string name, double t, double x_min = 0.0, double x_max = 1.0) {
        return Hypersurface(std::move(name), {{x_min, t}, {x_max, t}});
    }

    /// Simultaneity surface of a frame moving with velocity v, through (x0, t0).
    static Hypersurface boosted(std::string name, double v, double x0, double t0, double x_min, double x_max) {
        return Hypersurface(std::move(name), {{x_min, t0 + v * (x_min - x0)}, {x_max, t0 + v * (x_max - x0)}});
    }

    const std::string &name() const { return name_; }
    const std::vector<SpacetimePoint> &knots() const { return knots_; }

    double tau(double x) const {
        if (x <= knots_.front().x) return knots_.front().t;
        if (x >= knots_.back().x) return knots_.back().t;
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                         [](double v, const SpacetimePoint &k) { return v < k.x; });
        const SpacetimePoint &b = *it, &a = *(it - 1);
        return a.t + (b.t - a.t) * (x - a.x) / (b.x - a.x);
    }

    SpacetimePoint at(double x) const { return {x, tau(x)}; }

    double max_abs_slope() const {
        double m = 0.0;
        for (std::size_t i = 1; i < knots_.size(); ++i)
            m = std::max(m, std::abs((knots_[i].t - knots_[i - 1].t) / (knots_[i].x - knots_[i - 1].x)));
        return m;
    }

    bool is_spacelike() const { return max_abs_slope() < 1.0; }

   private:
    std::string name_;
    std::vector<SpacetimePoint> knots_;
};

struct Foliation {
    std::vector<Hypersurface> surfaces;
};

struct FoliationReport {
    bool valid = true;
    std::vector<std::string> problems;
};

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Checks slopes and that each surface lies strictly after the previous one.
/// Both are piecewise linear and constant outside their knots, so comparing at
/// the union of breakpoints suffices.
inline FoliationReport validate_foliation(const Foliation &f) {
    FoliationReport r;
    for (const auto &s : f.surfaces) {
        for (std::size_t i = 1; i < s.knots().size(); ++i) {
            const auto &a = s.knots()[i - 1], &b = s.knots()[i];
            const double slope = (b.t - a.t) / (b.x - a.x);
            if (!(std::abs(slope) < 1.0))
                r.problems.push_back("surface '" + s.name() + "' is not spacelike on [" + fmt_num(a.x) + ", " +
                                     fmt_num(b.x) + "] (slope " + fmt_num(slope) + ")");
        }
    }
    for (std::size_t j = 0; j + 1 < f.surfaces.size(); ++j) {
        const Hypersurface &lo = f.surfaces[j], &hi = f.surfaces[j + 1];
        std::set<double> xs;
        for (const auto &k : lo.knots()) xs.insert(k.x);
        for (const auto &k : hi.knots()) xs.insert(k.x);
        for (double x : xs) {
            if (!(lo.tau(x) < hi.tau(x))) {
                r.problems.push_back("surfaces '" + lo.name() + "' and '" + hi.name() + "' are not ordered at x = " +
                                     fmt_num(x));
                break;
            }
        }
    }
    r.valid = r.problems.empty();
    return r;
}

/// A finite set of lattice cells on a surface.
struct Region {
    std::vector<int> cells;
    Hypersurface surface;

    std::vector<SpacetimePoint> points() const {
        std::vector<SpacetimePoint> out;
        for (int c : cells) out.push_back(surface.at(static_cast<double>(c)));
        return out;
    }
};

/// Where an event's projector lives inside a scenario.
struct ProjectorRef {
    std::string model;
    std::size_t time = 0;
    std::string projector;
};

/// An event of a history placed in spacetime. Local events occupy one region;
/// entangled events span several disjoint regions that must share a surface.
struct TaggedEvent {
    std::string id;
    bool entangled = false;
    std::vector<Region> regions;
    ProjectorRef projector;
    std::optional<std::string> nominal_surface;

    static TaggedEvent local(std::string id, Region r, ProjectorRef p = {}) {
        return TaggedEvent{std::move(id), false, {std::move(r)}, std::move(p), std::nullopt};
    }

    static TaggedEvent entangled_over(std::string id, std::vector<Region> rs, ProjectorRef p = {}) {
        if (rs.size() < 2) throw InvalidValue("entangled event '" + id + "' needs at least two regions");
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                for (int c : rs[i].cells)
                    if (std::count(rs[j].cells.begin(), rs[j].cells.end(), c))
                        throw InvalidValue("entangled event '" + id + "' has overlapping regions");
        return TaggedEvent{std::move(id), true, std::move(rs), std::move(p), std::nullopt};
    }

    std::vector<SpacetimePoint> points() const {
        std::vector<SpacetimePoint> out;
        for (const auto &r : regions)
            for (const auto &p : r.points()) out.push_back(p);
        return out;
    }
};

inline bool region_precedes(const Region &a, const Region &b) {
    for (const auto &p : a.points())
        for (const auto &q : b.points())
            if (causally_precedes(p, q)) return true;
    return false;
}

/// Directed precedence between events: e -> g when some point of e lies in
/// the causal past of some point of g.
struct PrecedenceGraph {
    std::vector<std::string> ids;
    std::vector<std::vector<bool>> edge;

    int index_of(const std::string &id) const {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return static_cast<int>(i);
        return -1;
    }

    bool precedes(const std::string &a, const std::string &b) const {
        const int i = index_of(a), j = index_of(b);
        if (i < 0 || j < 0) throw LabelNotFound("unknown event in precedence query");
        return edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
};

namespace detail {

struct RegionNode {
    std::size_t event;
    std::size_t region;
};

inline std::vector<RegionNode> region_nodes(const std::vector<TaggedEvent> &events) {
    std::vector<RegionNode> out;
    for (std::size_t e = 0; e < events.size(); ++e)
        for (std::size_t r = 0; r < events[e].regions.size(); ++r) out.push_back({e, r});
    return out;
}

/// Returns a cycle as a list of node indices, or an empty list.
inline std::vector<std::size_t> find_cycle(const std::vector<std::vector<bool>> &adj) {
    const std::size_t n = adj.size();
    std::vector<int> color(n, 0), parent(n, -1);
    std::vector<std::size_t> cycle;
    auto dfs = [&](auto &&self, std::size_t u) -> bool {
        color[u] = 1;
        for (std::size_t v = 0; v < n; ++v) {
            if (!adj[u][v]) continue;
            if (color[v] == 1) {
                cycle.push_back(v);
                for (std::size_t w = u; w != v; w = static_cast<std::size_t>(parent[w])) cycle.push_back(w);
                std::reverse(cycle.begin(), cycle.end());
                return true;
            }
            if (color[v] == 0) {
                parent[v] = static_cast<int>(u);
                if (self(self, v)) return true;
            }
        }
        color[u] = 2;
        return false;
    };
    for (std::size_t s = 0; s < n; ++s)
        if (color[s] == 0 && dfs(dfs, s)) return cycle;
    return {};
}

}  // namespace detail

/// Event-level precedence from all region points. A cycle between regions
/// signals malformed regions and raises CyclicCausality.
inline PrecedenceGraph causal_precedence(const std::vector<TaggedEvent> &events) {
    const auto nodes = detail::region_nodes(events);
    const std::size_t n = nodes.size();
    std::vector<std::vector<bool>> radj(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b)
                radj[a][b] = region_precedes(events[nodes[a].event].regions[nodes[a].region],
                                             events[nodes[b].event].regions[nodes[b].region]);
    const auto cyc = detail::find_cycle(radj);
    if (!cyc.empty())
        throw CyclicCausality("regions of events '" + events[nodes[cyc.front()].event].id + "' and '" +
                              events[nodes[cyc.size() > 1 ? cyc[1] : cyc[0]].event].id +
                              "' precede each other");
    PrecedenceGraph g;
    for (const auto &e : events) g.ids.push_back(e.id);
    g.edge.assign(events.size(), std::vector<bool>(events.size(), false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (radj[a][b]) g.edge[nodes[a].event][nodes[b].event] = true;
    return g;
}

struct EmbeddingResult {
    Foliation foliation;
    /// Surface index assigned to each event, keyed by id.
    std::map<std::string, std::size_t> layer;
    double slope = 0.5;
};

namespace detail {

/// Pointwise maximum of two piecewise-linear surfaces sharing a domain.
inline std::vector<SpacetimePoint> pl_max(const Hypersurface &f, const Hypersurface &g) {
    std::set<double> xs;
    for (const auto &k : f.knots()) xs.insert(k.x);
    for (const auto &k : g.knots()) xs.insert(k.x);
    std::vector<double> base(xs.begin(), xs.end());
    std::set<double> all(xs);
    for (std::size_t i = 0; i + 1 < base.size(); ++i) {
        const double a = base[i], b = base[i + 1];
        const double da = f.tau(a) - g.tau(a), db = f.tau(b) - g.tau(b);
        if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
            const double x = a + (b - a) * da / (da - db);
            // Crossings that coincide with a knot up to rounding add nothing.
            if (x - a > 1e-9 && b - x > 1e-9) all.insert(x);
        }
    }
    std::vector<SpacetimePoint> out;
    for (double x : all) out.push_back({x, std::max(f.tau(x), g.tau(x))});
    return out;
}

/// Downward cone t = p.t - s |x - p.x| on [lo, hi].
inline Hypersurface cone(const SpacetimePoint &p, double s, double lo, double hi) {
    std::vector<SpacetimePoint> k;
    if (lo < p.x) k.push_back({lo, p.t - s * (p.x - lo)});
    k.push_back(p);
    if (hi > p.x) k.push_back({hi, p.t - s * (hi - p.x)});
    return Hypersurface("cone", k);
}

}  // namespace detail

/// Places events on a foliation of piecewise-linear spacelike surfaces, one
/// surface per layer of the precedence order. Entangled events are atomic:
/// all of their regions go to one surface. When some other event lies after
/// one region of an entangled event and before another, no such foliation
/// exists and EmbeddingImpossible names both events.
inline EmbeddingResult embed_events(const std::vector<TaggedEvent> &events) {
    if (events.empty()) throw InvalidValue("embed_events: no events");
    const PrecedenceGraph g = causal_precedence(events);
    const std::size_t n = events.size();

    for (std::size_t e = 0; e < n; ++e)
        if (g.edge[e][e])
            throw EmbeddingImpossible("entangled event '" + events[e].id + "' has causally ordered regions",
                                      events[e].id, events[e].id);
    const auto cyc = detail::find_cycle(g.edge);
    if (!cyc.empty()) {
        std::size_t k = 0;
        while (k < cyc.size() && !events[cyc[k]].entangled) ++k;
        if (k == cyc.size()) k = 0;
        const std::string blocking = events[cyc[k]].id;
        const std::string other = events[cyc[(k + 1) % cyc.size()]].id;
        throw EmbeddingImpossible("event '" + other + "' lies both after and before regions of the entangled event '" +
                                      blocking + "'",
                                  blocking, other);
    }

    // Longest-path layering.
    std::vector<std::size_t> layer(n, 0);
    for (std::size_t pass = 0; pass < n; ++pass)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (g.edge[a][b]) layer[b] = std::max(layer[b], layer[a] + 1);
    const std::size_t layers = *std::max_element(layer.begin(), layer.end()) + 1;

    struct Tagged {
        SpacetimePoint p;
        std::size_t layer;
    };
    std::vector<Tagged> pts;
    for (std::size_t e = 0; e < n; ++e)
        for (const auto &p : events[e].points()) pts.push_back({p, layer[e]});

    // Cone slope: above every spacelike slope between points, at least 1/2.
    double m = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double dx = std::abs(pts[i].p.x - pts[j].p.x), dt = std::abs(pts[i].p.t - pts[j].p.t);
            if (dx > 0 && dt < dx) m = std::max(m, dt / dx);
        }
    const double s = std::max(0.5, 0.5 * (m + 1.0));

    double slack = std::numeric_limits<double>::infinity();
    for (const auto &q : pts)
        for (const auto &p : pts)
            if (p.layer > q.layer) slack = std::min(slack, p.p.t - q.p.t + s * std::abs(p.p.x - q.p.x));
    if (!(slack > 0)) throw EmbeddingImpossible("events cannot be separated by spacelike surfaces", events[0].id, events[0].id);
    const double delta = std::isfinite(slack) ? slack / (2.0 * static_cast<double>(layers + 1)) : 1.0;

    double lo = pts.front().p.x, hi = pts.front().p.x;
    for (const auto &t : pts) {
        lo = std::min(lo, t.p.x);
        hi = std::max(hi, t.p.x);
    }
    lo -= 1.0;
    hi += 1.0;

    EmbeddingResult out;
    out.slope = s;
    std::optional<Hypersurface> prev;
    for (std::size_t k = 0; k < layers; ++k) {
        std::optional<Hypersurface> cur;
        for (const auto &t : pts) {
            if (t.layer != k) continue;
            const Hypersurface c = detail::cone(t.p, s, lo, hi);
            cur = cur ? Hypersurface("S", detail::pl_max(*cur, c)) : c;
        }
        if (prev) {
            std::vector<SpacetimePoint> lifted = prev->knots();
            for (auto &q : lifted) q.t += delta;
            cur = Hypersurface("S", detail::pl_max(*cur, Hypersurface("lift", lifted)));
        }
        char name[32];
        std::snprintf(name, sizeof name, "S%zu", k);
        cur = Hypersurface(name, cur->knots());
        out.foliation.surfaces.push_back(*cur);
        prev = cur;
    }
    for (std::size_t e = 0; e < n; ++e) out.layer[events[e].id] = layer[e];
    return out;
}

}  // namespace chist
