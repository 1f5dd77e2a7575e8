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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chist/histories.hpp"
#include "chist/spacetime.hpp"

namespace chist {

/// One closed quantum system: a Hilbert space, its dynamics on a time grid,
/// and named kets and projectors (Schroedinger picture).
struct Model {
    std::string name;
    PropagatorSetPtr dynamics;
    std::vector<std::string> basis_labels;
    std::map<std::string, Ket> kets;
    std::map<std::string, Projector> projectors;

    Eigen::Index dim() const { return dynamics->dim(); }

    const Projector &projector(const std::string &n) const {
        const auto it = projectors.find(n);
        if (it == projectors.end()) throw LabelNotFound("model '" + name + "' has no projector '" + n + "'");
        return it->second;
    }

    const Ket &ket(const std::string &n) const {
        const auto it = kets.find(n);
        if (it == kets.end()) throw LabelNotFound("model '" + name + "' has no ket '" + n + "'");
        return it->second;
    }
};

enum class Provenance { published, derived, trivial };

inline const char *to_string(Provenance p) {
    switch (p) {
        case Provenance::published:
            return "published";
        case Provenance::derived:
            return "derived";
        case Provenance::trivial:
            return "trivial";
    }
    return "?";
}

struct Scenario;

/// A registered result: the value of `evaluate` must compare to `expected`
/// within `tolerance` using `comparison` ("eq", "lt" or "gt").
struct Expectation {
    std::string description;
    std::string family;
    std::string query;
    double expected = 0.0;
    double tolerance = 1e-9;
    std::string comparison = "eq";
    Provenance source = Provenance::derived;
    std::function<double(const Scenario &)> evaluate;

    bool holds(double v) const {
        if (!std::isfinite(v)) return false;
        if (comparison == "lt") return v < expected;
        if (comparison == "gt") return v > expected;
        return std::abs(v - expected) <= tolerance;
    }
};

struct Scenario {
    std::string name;
    std::vector<Model> models;
    std::vector<Family> families;
    std::vector<TaggedEvent> events;
    std::vector<Expectation> expectations;

    const Model &model(const std::string &n) const {
        for (const auto &m : models)
            if (m.name == n) return m;
        throw LabelNotFound("scenario '" + name + "' has no model '" + n + "'");
    }

    const Family &family(const std::string &n) const {
        for (const auto &f : families)
            if (f.name() == n) return f;
        throw LabelNotFound("scenario '" + name + "' has no family '" + n + "'");
    }

    bool has_family(const std::string &n) const {
        for (const auto &f : families)
            if (f.name() == n) return true;
        return false;
    }

    const TaggedEvent &event(const std::string &id) const {
        for (const auto &e : events)
            if (e.id == id) return e;
        throw LabelNotFound("scenario '" + name + "' has no event '" + id + "'");
    }

    /// Name of the model whose dynamics a family uses.
    const Model &model_of(const Family &f) const {
        for (const auto &m : models)
            if (m.dynamics == f.dynamics()) return m;
        throw LabelNotFound("family '" + f.name() + "' does not belong to scenario '" + name + "'");
    }
};

}  // namespace chist
