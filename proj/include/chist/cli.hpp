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

// Command-line front end. run() takes the arguments after the program name
// and writes the report to `out` and diagnostics to `err`.
//
// Exit codes: 0 success or affirmative verdict, 1 negative verdict,
// 2 usage error, 3 input or parse error.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chist/famspec.hpp"
#include "chist/framework.hpp"
#include "chist/report.hpp"
#include "chist/scenarios.hpp"
#include "chist/spacetime.hpp"
#include "chist/version.hpp"
#include "json.hpp"

namespace chist::cli {

enum ExitCode { kOk = 0, kNegative = 1, kUsage = 2, kInput = 3 };

using report::Json;

/// Raised for unreadable or malformed inputs; maps to exit code 3.
class InputError : public Error {
   public:
    using Error::Error;
};

struct Options {
    std::string scenario;
    std::string file;
    std::string format = "text";
    std::string mode = "complex";
    double tol_rel = ConsistencyOptions{}.eps_rel;
    double tol_abs = ConsistencyOptions{}.eps_abs;
    bool timing = false;

    ConsistencyOptions consistency() const {
        ConsistencyOptions c;
        c.eps_rel = tol_rel;
        c.eps_abs = tol_abs;
        c.real_part_only = mode == "real";
        return c;
    }
};

/// What a command produced: the JSON results plus text and CSV renderings.
struct Output {
    int code = kOk;
    Json results = Json::object();
    std::string text;
    std::vector<std::vector<std::string>> csv;
};

namespace detail {

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string histories_word(std::size_t n) { return n == 1 ? " history" : " histories"; }

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// Families come from a built-in scenario or a famspec document.
class Source {
   public:
    static Source open(const Options &o) {
        Source s;
        if (!o.scenario.empty()) {
            const auto names = scenario_names();
            if (std::find(names.begin(), names.end(), o.scenario) == names.end())
                throw InputError("unknown scenario '" + o.scenario + "'");
            s.scenario_ = build_scenario(o.scenario);
        } else if (!o.file.empty()) {
            const famspec::ParseResult r = famspec::parse(read_file(o.file));
            if (!r.ok()) throw InputError(o.file + ": " + r.diagnostics.front().to_string());
            s.program_ = *r.program;
        } else {
            throw CLI::ValidationError("one of --scenario or --file is required");
        }
        return s;
    }

    const Family &family(const std::string &n) const {
        try {
            return scenario_ ? scenario_->family(n) : program_->family(n);
        } catch (const LabelNotFound &e) {
            throw InputError(e.what());
        }
    }

    const Scenario *scenario() const { return scenario_ ? &*scenario_ : nullptr; }

   private:
    std::optional<Scenario> scenario_;
    std::optional<famspec::Program> program_;
};

inline Json violation_json(const Violation &v) {
    return Json{{"alpha", v.alpha}, {"beta", v.beta}, {"overlap", v.overlap}, {"normalized", v.normalized}};
}

inline Output cmd_check(const Options &o, const std::string &name) {
    const Source src = Source::open(o);
    const Family &f = src.family(name);
    const ConsistencyOptions opt = o.consistency();
    const ConsistencyReport r = consistency_check(f, opt);
    Output out;
    out.code = r.consistent ? kOk : kNegative;
    Json viol = Json::array();
    for (const auto &v : r.violations) viol.push_back(violation_json(v));
    out.results = Json{{"family", f.name()},
                       {"consistent", r.consistent},
                       {"histories", r.histories},
                       {"max_normalized_overlap", r.max_normalized_overlap},
                       {"tolerances", {{"eps_abs", opt.eps_abs}, {"eps_rel", opt.eps_rel}, {"mode", o.mode}}},
                       {"violations", viol}};
    std::ostringstream t;
    t << "family " << f.name() << ": " << (r.consistent ? "consistent" : "inconsistent") << " (" << r.histories
      << histories_word(r.histories) << ", max normalized overlap " << num(r.max_normalized_overlap) << ")\n";
    for (const auto &v : r.violations)
        t << "  violating pair: " << v.alpha << " and " << v.beta << ", |D| = " << num(v.overlap)
          << ", normalized " << num(v.normalized) << "\n";
    out.text = t.str();
    out.csv.push_back({"alpha", "beta", "overlap", "normalized"});
    for (const auto &v : r.violations)
        out.csv.push_back({v.alpha, v.beta, report::number(v.overlap), report::number(v.normalized)});
    return out;
}

struct ProbsArgs {
    std::string family;
    std::string given;
    std::string target;
    std::string event;
    bool all = false;
};

inline Output cmd_probs(const Options &o, const ProbsArgs &a) {
    const Source src = Source::open(o);
    const Family &f = src.family(a.family);
    const WeightTable table = probabilities(f, o.consistency());

    std::vector<WeightEntry> rows = a.all ? table.entries : support(table);
    std::stable_sort(rows.begin(), rows.end(), [](const WeightEntry &x, const WeightEntry &y) {
        if (x.probability != y.probability) return x.probability > y.probability;
        return x.label < y.label;
    });

    Output out;
    Json hist = Json::array();
    for (const auto &e : rows)
        hist.push_back(Json{{"label", e.label}, {"weight", e.weight}, {"probability", e.probability}});
    out.results = Json{{"family", f.name()}, {"consistent", true}, {"normalization", table.normalization},
                       {"histories", hist}};
    std::ostringstream t;
    t << "family " << f.name() << ": " << rows.size() << histories_word(rows.size())
      << (a.all ? "" : " with nonzero probability")
      << "\n";
    std::size_t width = 0;
    for (const auto &e : rows) width = std::max(width, e.label.size());
    for (const auto &e : rows)
        t << "  " << e.label << std::string(width - e.label.size() + 2, ' ') << num(e.probability) << "\n";
    out.csv.push_back({"label", "weight", "probability"});
    for (const auto &e : rows) out.csv.push_back({e.label, report::number(e.weight), report::number(e.probability)});

    try {
        if (!a.target.empty()) {
            const SlotPredicate target = parse_predicate(f, a.target);
            if (!a.given.empty()) {
                const SlotPredicate given = parse_predicate(f, a.given);
                const double p = conditional_probability(f, table, target, given);
                out.results["conditional"] = Json{{"target", a.target}, {"given", a.given}, {"probability", p}};
                t << "Pr(" << a.target << " | " << a.given << ") = " << num(p) << "\n";
                out.csv.push_back({"conditional:" + a.target + "|" + a.given, "", report::number(p)});
            } else {
                const double p = predicate_probability(f, table, target);
                out.results["predicate"] = Json{{"target", a.target}, {"probability", p}};
                t << "Pr(" << a.target << ") = " << num(p) << "\n";
                out.csv.push_back({"predicate:" + a.target, "", report::number(p)});
            }
        }
        if (!a.event.empty()) {
            const std::vector<std::string> tokens = split(a.event, ',');
            const double p = token_event_probability(f, table, tokens);
            out.results["event"] = Json{{"tokens", tokens}, {"probability", p}};
            t << "Pr(" << a.event << ") = " << num(p) << "\n";
            out.csv.push_back({"event:" + a.event, "", report::number(p)});
        }
    } catch (const LabelNotFound &e) {
        throw InputError(e.what());
    } catch (const InvalidValue &e) {
        throw InputError(e.what());
    }
    out.text = t.str();
    return out;
}

inline Output cmd_compat(const Options &o, const std::vector<std::string> &names) {
    const Source src = Source::open(o);
    const Family &a = src.family(names.at(0));
    const Family &b = src.family(names.at(1));
    CompatibilityVerdict v;
    try {
        v = common_refinement(a, b, o.consistency());
    } catch (const PropagatorMismatch &e) {
        throw InputError(e.what());
    }
    Output out;
    out.code = v.compatible ? kOk : kNegative;
    out.results = Json{{"family_a", a.name()},
                       {"family_b", b.name()},
                       {"classification", v.classification},
                       {"compatible", v.compatible}};
    std::ostringstream t;
    t << a.name() << " vs " << b.name() << ": " << v.classification << "\n";
    if (v.kinematic) {
        const KinematicWitness &w = *v.kinematic;
        out.results["witness"] = Json{
            {"time", w.time}, {"label_a", w.label_a}, {"label_b", w.label_b}, {"commutator_norm", w.commutator_norm}};
        t << "  at " << w.time << ": " << w.label_a << " and " << w.label_b << " do not commute (norm "
          << num(w.commutator_norm) << ")\n";
    }
    if (v.dynamic && !v.dynamic->violations.empty()) {
        const Violation &w = v.dynamic->violations.front();
        out.results["violation"] = violation_json(w);
        t << "  refinement violates consistency: " << w.alpha << " and " << w.beta << ", normalized overlap "
          << num(w.normalized) << "\n";
    }
    out.text = t.str();
    out.csv.push_back({"family_a", "family_b", "classification", "compatible"});
    out.csv.push_back({a.name(), b.name(), v.classification, v.compatible ? "true" : "false"});
    return out;
}

inline Output cmd_scenario(const Options &o, std::string name, bool suite) {
    if (name.empty()) name = o.scenario;
    if (name.empty()) throw CLI::ValidationError("scenario name required");
    std::vector<std::string> names = scenario_names();
    if (name != "all") {
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw InputError("unknown scenario '" + name + "'");
        names = {name};
    }
    Output out;
    std::ostringstream t;
    Json list = Json::array();
    std::size_t passed = 0, failed = 0;
    if (suite) out.csv.push_back({"scenario", "description", "family", "query", "expected", "value", "pass", "source"});
    else out.csv.push_back({"scenario", "family", "histories", "consistent"});
    for (const std::string &n : names) {
        const Scenario s = build_scenario(n);
        Json sj{{"scenario", n}};
        if (suite) {
            Json items = Json::array();
            std::size_t ok = 0;
            t << n << "\n";
            for (const auto &e : s.expectations) {
                double v = std::numeric_limits<double>::quiet_NaN();
                std::string error;
                try {
                    v = e.evaluate(s);
                } catch (const std::exception &ex) {
                    error = ex.what();
                }
                const bool pass = error.empty() && e.holds(v);
                ok += pass;
                Json item{{"description", e.description}, {"family", e.family},     {"query", e.query},
                          {"comparison", e.comparison},   {"expected", e.expected}, {"tolerance", e.tolerance},
                          {"value", std::isfinite(v) ? Json(v) : Json(nullptr)},
                          {"pass", pass},                 {"source", to_string(e.source)}};
                if (!error.empty()) item["error"] = error;
                items.push_back(item);
                const char *op = e.comparison == "lt" ? "< " : e.comparison == "gt" ? "> " : "";
                t << "  [" << (pass ? "pass" : "FAIL") << "] " << e.description << ": " << num(v) << " (expected "
                  << op << num(e.expected) << ", " << to_string(e.source) << ")\n";
                if (!error.empty()) t << "         error: " << error << "\n";
                out.csv.push_back({n, e.description, e.family, e.query, report::number(e.expected),
                                   report::number(v), pass ? "true" : "false", to_string(e.source)});
            }
            passed += ok;
            failed += s.expectations.size() - ok;
            sj["expectations"] = items;
            sj["passed"] = ok;
            sj["failed"] = s.expectations.size() - ok;
            t << "  " << ok << "/" << s.expectations.size() << " expectations hold\n";
        } else {
            Json models = Json::array();
            for (const auto &m : s.models)
                models.push_back(Json{{"name", m.name}, {"dim", m.dim()}, {"times", m.dynamics->grid().values()}});
            Json fams = Json::array();
            t << n << "\n";
            for (const auto &m : s.models)
                t << "  model " << m.name << " (dim " << m.dim() << ", " << m.dynamics->grid().size() << " times)\n";
            for (const auto &f : s.families) {
                const ConsistencyReport r = consistency_check(f, o.consistency());
                fams.push_back(Json{{"name", f.name()},
                                    {"model", s.model_of(f).name},
                                    {"histories", r.histories},
                                    {"consistent", r.consistent}});
                t << "  family " << f.name() << ": " << r.histories << histories_word(r.histories) << ", "
                  << (r.consistent ? "consistent" : "inconsistent") << "\n";
                out.csv.push_back({n, f.name(), std::to_string(r.histories), r.consistent ? "true" : "false"});
            }
            sj["models"] = models;
            sj["families"] = fams;
            sj["events"] = s.events.size();
            sj["expectations"] = s.expectations.size();
            t << "  " << s.events.size() << " spacetime events, " << s.expectations.size()
              << " registered expectations\n";
        }
        list.push_back(sj);
    }
    out.results = Json{{"scenarios", list}};
    if (suite) {
        out.results["passed"] = passed;
        out.results["failed"] = failed;
        out.code = failed == 0 ? kOk : kNegative;
    }
    out.text = t.str();
    return out;
}

inline Hypersurface surface_from_json(const Json &j, const std::vector<int> &cells, const std::string &name) {
    const auto [lo_it, hi_it] = std::minmax_element(cells.begin(), cells.end());
    const double lo = j.value("x_min", static_cast<double>(*lo_it) - 1.0);
    const double hi = j.value("x_max", static_cast<double>(*hi_it) + 1.0);
    if (j.contains("knots")) {
        std::vector<SpacetimePoint> k;
        for (const auto &p : j.at("knots")) k.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return Hypersurface(name, k);
    }
    if (j.contains("v")) {
        const double v = j.at("v").get<double>();
        if (!(std::abs(v) < 1.0)) throw InputError("surface '" + name + "' has |v| >= 1");
        return Hypersurface::boosted(name, v, j.value("x0", 0.0), j.value("t0", 0.0), lo, hi);
    }
    return Hypersurface::flat(name, j.at("t").get<double>(), lo, hi);
}

/// Events file: {"events": [{"id": ..., "regions": [{"cells": [...],
/// "surface": {...}}]}]}. A surface is {"t": T} (rest frame), {"v": V,
/// "x0": X, "t0": T} (moving frame through (X, T)) or {"knots": [[x, t], ...]}.
inline std::vector<TaggedEvent> events_from_json(const Json &doc) {
    std::vector<TaggedEvent> out;
    for (const auto &e : doc.at("events")) {
        const std::string id = e.at("id").get<std::string>();
        std::vector<Region> regions;
        for (const auto &r : e.at("regions")) {
            Region reg;
            reg.cells = r.at("cells").get<std::vector<int>>();
            if (reg.cells.empty()) throw InputError("event '" + id + "' has a region without cells");
            const Json &sj = r.at("surface");
            reg.surface = surface_from_json(sj, reg.cells, sj.value("name", id));
            regions.push_back(std::move(reg));
        }
        if (regions.empty()) throw InputError("event '" + id + "' has no regions");
        const bool entangled = e.value("entangled", regions.size() > 1);
        if (entangled)
            out.push_back(TaggedEvent::entangled_over(id, regions));
        else if (regions.size() == 1)
            out.push_back(TaggedEvent::local(id, regions.front()));
        else
            throw InputError("local event '" + id + "' must have exactly one region");
    }
    return out;
}

inline Output cmd_embed(const std::string &path) {
    std::vector<TaggedEvent> events;
    try {
        events = events_from_json(Json::parse(read_file(path)));
    } catch (const Json::exception &e) {
        throw InputError(path + ": " + e.what());
    }
    Output out;
    std::ostringstream t;
    out.csv.push_back({"surface", "x", "t"});
    try {
        const EmbeddingResult r = embed_events(events);
        Json surfaces = Json::array();
        t << "embedded " << events.size() << " events on " << r.foliation.surfaces.size()
          << " surfaces (cone slope " << num(r.slope) << ")\n";
        for (std::size_t k = 0; k < r.foliation.surfaces.size(); ++k) {
            const Hypersurface &h = r.foliation.surfaces[k];
            Json knots = Json::array();
            t << "  " << h.name() << ":";
            for (const auto &p : h.knots()) {
                knots.push_back(Json::array({p.x, p.t}));
                t << " (" << num(p.x) << ", " << num(p.t) << ")";
                out.csv.push_back({h.name(), report::number(p.x), report::number(p.t)});
            }
            t << "\n    events:";
            Json ids = Json::array();
            for (const auto &e : events)
                if (r.layer.at(e.id) == k) {
                    ids.push_back(e.id);
                    t << " " << e.id;
                }
            t << "\n";
            surfaces.push_back(Json{{"name", h.name()}, {"knots", knots}, {"events", ids}});
        }
        out.results = Json{{"embedded", true}, {"slope", r.slope}, {"surfaces", surfaces}};
    } catch (const EmbeddingImpossible &e) {
        out.code = kNegative;
        out.results = Json{{"embedded", false},
                           {"blocking_event", e.blocking_event()},
                           {"other_event", e.other_event()},
                           {"message", e.what()}};
        t << "no foliation: " << e.what() << "\n  blocking event: " << e.blocking_event() << "\n";
        out.csv = {{"embedded", "blocking_event", "other_event"}, {"false", e.blocking_event(), e.other_event()}};
    } catch (const CyclicCausality &e) {
        out.code = kNegative;
        out.results = Json{{"embedded", false}, {"message", e.what()}};
        t << "no foliation: " << e.what() << "\n";
        out.csv = {{"embedded", "message"}, {"false", e.what()}};
    }
    out.text = t.str();
    return out;
}

inline Output cmd_export(const Options &o) {
    const Source src = Source::open(o);
    Output out;
    famspec::Document doc;
    if (src.scenario()) {
        doc = famspec::export_scenario(*src.scenario());
    } else {
        doc = famspec::parse(read_file(o.file)).program->document;
    }
    out.text = famspec::serialize(doc);
    out.results = Json{{"famspec", out.text}};
    out.csv.push_back({"famspec"});
    out.csv.push_back({out.text});
    return out;
}

inline void emit(const Output &r, const Options &o, const std::vector<std::string> &args, double seconds,
                 std::ostream &out) {
    if (o.format == "json") {
        Json j{{"schema", report::kSchema}, {"engine", std::string("chist ") + kVersion}, {"command", args},
               {"exit_code", r.code}, {"results", r.results}};
        if (o.timing) j["wall_time_s"] = seconds;
        out << report::dump(j);
        return;
    }
    if (o.format == "csv") {
        for (const auto &row : r.csv) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
            out << "\n";
        }
        return;
    }
    out << r.text;
    if (o.timing) out << "wall time " << num(seconds) << " s\n";
}

}  // namespace detail

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Consistent-histories engine: families, probabilities, compatibility and embeddings.", "chist"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("chist ") + kVersion);

    Options o;
    auto *scn = app.add_option("--scenario", o.scenario, "Built-in scenario (" + [] {
        std::string s;
        for (const auto &n : scenario_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
    }() + ")");
    auto *file = app.add_option("--file", o.file, "famspec document");
    scn->excludes(file);
    app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--tol-rel", o.tol_rel, "Relative consistency tolerance")->check(CLI::NonNegativeNumber);
    app.add_option("--tol-abs", o.tol_abs, "Absolute consistency tolerance")->check(CLI::NonNegativeNumber);
    app.add_option("--mode", o.mode, "Consistency test on the full complex functional or its real part")
        ->check(CLI::IsMember({"complex", "real"}));
    app.add_flag("--timing", o.timing, "Report wall time");

    std::string family;
    auto *check = app.add_subcommand("check", "Test a family for consistency");
    check->add_option("--family", family, "Family name")->required();

    detail::ProbsArgs pa;
    auto *probs = app.add_subcommand("probs", "Probabilities of a consistent family");
    probs->add_option("--family", pa.family, "Family name")->required();
    probs->add_option("--target", pa.target, "Slot predicate, e.g. t1=xplus|xminus,t2=X");
    probs->add_option("--given", pa.given, "Conditioning slot predicate (needs --target)");
    probs->add_option("--event", pa.event, "Comma-separated labels that must all occur, e.g. e,ebar");
    probs->add_flag("--all", pa.all, "Also list histories below the support threshold");

    std::vector<std::string> pair;
    auto *compat = app.add_subcommand("compat", "Classify the compatibility of two families");
    compat->add_option("families", pair, "Two family names")->expected(2)->required();

    std::string scenario_name;
    bool suite = false;
    auto *scenario = app.add_subcommand("scenario", "Describe a built-in scenario or run its expectations");
    scenario->add_option("name", scenario_name, "Scenario name or 'all'");
    scenario->add_flag("--suite", suite, "Run the registered expectations");

    std::string events_path;
    auto *embed = app.add_subcommand("embed", "Embed spacetime events in a foliation");
    embed->add_option("events", events_path, "Events JSON file")->required();

    auto *exp = app.add_subcommand("export", "Print the famspec form of a scenario or document");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (probs->parsed() && !pa.given.empty() && pa.target.empty())
            throw CLI::ValidationError("--given requires --target");
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion &) {
        out << app.version() << "\n";
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    Output result;
    try {
        if (check->parsed()) {
            result = detail::cmd_check(o, family);
        } else if (probs->parsed()) {
            result = detail::cmd_probs(o, pa);
        } else if (compat->parsed()) {
            result = detail::cmd_compat(o, pair);
        } else if (scenario->parsed()) {
            result = detail::cmd_scenario(o, scenario_name, suite);
        } else if (embed->parsed()) {
            result = detail::cmd_embed(events_path);
        } else if (exp->parsed()) {
            result = detail::cmd_export(o);
        }
    } catch (const CLI::ValidationError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const InconsistentFamily &e) {
        err << "error: " << e.what() << "\n";
        return kNegative;
    } catch (const ZeroConditionProbability &e) {
        err << "error: " << e.what() << "\n";
        return kNegative;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kInput;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail::emit(result, o, args, seconds, out);
    return result.code;
}

}  // namespace chist::cli
