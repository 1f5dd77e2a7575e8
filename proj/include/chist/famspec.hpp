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

// famspec: a small line-oriented language for spaces, kets, unitaries,
// projectors, decompositions, time grids and families.
//
//   space qubit dim 2
//   ket up in qubit = [1, 0]
//   ket down in qubit = [0, 1]
//   proj Pup on qubit = span(up)
//   proj Pdown on qubit = [[0, 0], [0, 1]]
//   decomp Z on qubit = {Pup as zplus, Pdown as zminus}
//   times grid = [0, 1, 2]
//   family F0 times grid initial up {
//     at 1: Z
//     at 2: Z
//   } steps { identity identity }
//
// Beyond the core grammar the language accepts `density NAME on SPACE =
// matrix`, `as LABEL` after a decomposition member and after the initial
// state, and the keyword `identity` in a steps list.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "chist/dynamics.hpp"
#include "chist/histories.hpp"
#include "chist/model.hpp"

namespace chist::famspec {

inline constexpr const char *kHeader = "# famspec v1";
/// Largest space dimension a document may declare.
inline constexpr long kMaxDim = 4096;

struct SourcePos {
    int line = 0;
    int column = 0;
};

struct Diagnostic {
    std::string severity = "error";
    std::string message;
    int line = 0;
    int column = 0;

    std::string to_string() const {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + severity + ": " +
               message;
    }
};

/// Raised by load() when a document does not parse or validate.
class SpecError : public Error {
   public:
    explicit SpecError(Diagnostic d) : Error(d.to_string()), diagnostic_(std::move(d)) {}
    const Diagnostic &diagnostic() const { return diagnostic_; }

   private:
    Diagnostic diagnostic_;
};

struct SpaceDecl {
    std::string name;
    long dim = 0;
    SourcePos pos;
};

struct KetDecl {
    std::string name;
    std::string space;
    Ket amplitudes;
    SourcePos pos;
};

struct DensityDecl {
    std::string name;
    std::string space;
    Operator matrix;
    SourcePos pos;
};

struct UnitaryDecl {
    std::string name;
    std::string space;
    Operator matrix;
    SourcePos pos;
};

/// A projector given either as the span of kets or as a matrix.
struct ProjDecl {
    std::string name;
    std::string space;
    std::vector<std::string> span;
    std::optional<Operator> matrix;
    SourcePos pos;
};

struct DecompMember {
    std::string projector;
    /// Member label; empty means the projector name.
    std::string label;

    const std::string &effective_label() const { return label.empty() ? projector : label; }
};

struct DecompDecl {
    std::string name;
    std::string space;
    std::vector<DecompMember> members;
    SourcePos pos;
};

struct TimesDecl {
    std::string name;
    std::vector<double> values;
    SourcePos pos;
};

struct FamilySlot {
    double time = 0.0;
    /// Decomposition name or "identity".
    std::string decomposition;
    SourcePos pos;
};

struct FamilyDecl {
    std::string name;
    std::string times;
    std::string initial;
    std::string initial_label;
    std::vector<FamilySlot> slots;
    std::vector<std::string> steps;
    SourcePos pos;
};

using Declaration =
    std::variant<SpaceDecl, KetDecl, DensityDecl, UnitaryDecl, ProjDecl, DecompDecl, TimesDecl, FamilyDecl>;

struct Document {
    std::vector<Declaration> declarations;
};

inline const std::string &decl_name(const Declaration &d) {
    return std::visit([](const auto &x) -> const std::string & { return x.name; }, d);
}

inline SourcePos decl_pos(const Declaration &d) {
    return std::visit([](const auto &x) { return x.pos; }, d);
}

/// A validated document with its objects built.
struct Program {
    Document document;
    std::map<std::string, Eigen::Index> spaces;
    std::map<std::string, Ket> kets;
    std::map<std::string, DensityOperator> densities;
    std::map<std::string, Operator> unitaries;
    std::map<std::string, Projector> projectors;
    std::map<std::string, Decomposition> decompositions;
    std::map<std::string, TimeGrid> grids;
    std::vector<Family> families;

    const Family &family(const std::string &n) const {
        for (const auto &f : families)
            if (f.name() == n) return f;
        throw LabelNotFound("document has no family '" + n + "'");
    }
};

struct ParseResult {
    std::optional<Program> program;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return program.has_value(); }
};

namespace detail {

struct Failure {
    Diagnostic diagnostic;
};

[[noreturn]] inline void fail(SourcePos p, std::string message) {
    throw Failure{Diagnostic{"error", std::move(message), p.line, p.column}};
}

inline bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

inline bool name_char(char c) {
    if (std::isalnum(static_cast<unsigned char>(c))) return true;
    switch (c) {
        case '.':
        case '+':
        case '-':
        case '*':
        case '\'':
        case '&':
        case '@':
        case '/':
        case '_':
            return true;
        default:
            return false;
    }
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// Character cursor with line and column tracking. Columns count UTF-8
/// code points, starting at 1.
class Scanner {
   public:
    explicit Scanner(std::string_view text) : s_(text) {}

    bool eof() const { return i_ >= s_.size(); }
    char peek(std::size_t k = 0) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }
    SourcePos pos() const { return {line_, col_}; }

    void advance() {
        if (eof()) return;
        const unsigned char c = static_cast<unsigned char>(s_[i_++]);
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if ((c & 0xC0) != 0x80) {
            ++col_;
        }
    }

    /// Skips blanks and comments on the current line.
    void skip_inline() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    /// Skips blanks, comments and newlines.
    void skip_all() {
        for (;;) {
            skip_inline();
            if (peek() == '\n') {
                advance();
            } else {
                return;
            }
        }
    }

    std::string_view rest_from(std::size_t start) const { return s_.substr(start, i_ - start); }
    std::size_t offset() const { return i_; }

   private:
    std::string_view s_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

inline std::string describe(const Scanner &sc) {
    if (sc.eof()) return "end of input";
    const char c = sc.peek();
    if (c == '\n') return "end of line";
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) return "a non-ASCII byte";
    return std::string("'") + c + "'";
}

class SyntaxParser {
   public:
    explicit SyntaxParser(std::string_view text) : sc_(text) {}

    Document run() {
        Document doc;
        for (;;) {
            sc_.skip_all();
            if (sc_.eof()) break;
            const SourcePos p = sc_.pos();
            if (!name_start(sc_.peek())) fail(p, "expected a declaration keyword, found " + describe(sc_));
            const std::string kw = word();
            if (kw == "space") {
                doc.declarations.emplace_back(space(p));
            } else if (kw == "ket") {
                doc.declarations.emplace_back(ket(p));
            } else if (kw == "density") {
                doc.declarations.emplace_back(density(p));
            } else if (kw == "unitary") {
                doc.declarations.emplace_back(unitary(p));
            } else if (kw == "proj") {
                doc.declarations.emplace_back(proj(p));
            } else if (kw == "decomp") {
                doc.declarations.emplace_back(decomp(p));
            } else if (kw == "times") {
                doc.declarations.emplace_back(times(p));
            } else if (kw == "family") {
                doc.declarations.emplace_back(family(p));
            } else {
                fail(p, "unknown declaration '" + kw + "'");
            }
            sc_.skip_inline();
            if (!sc_.eof() && sc_.peek() != '\n')
                fail(sc_.pos(), "unexpected " + describe(sc_) + " after the declaration");
        }
        return doc;
    }

   private:
    std::string word() {
        const std::size_t start = sc_.offset();
        while (!sc_.eof() && name_char(sc_.peek())) sc_.advance();
        return std::string(sc_.rest_from(start));
    }

    std::string name(const char *what) {
        sc_.skip_all();
        if (!name_start(sc_.peek())) fail(sc_.pos(), std::string("expected ") + what + ", found " + describe(sc_));
        return word();
    }

    void keyword(const char *kw) {
        sc_.skip_all();
        const SourcePos p = sc_.pos();
        if (!name_start(sc_.peek())) fail(p, std::string("expected '") + kw + "', found " + describe(sc_));
        const std::string w = word();
        if (w != kw) fail(p, std::string("expected '") + kw + "', found '" + w + "'");
    }

    /// Consumes the keyword if it comes next.
    bool optional_keyword(const char *kw) {
        sc_.skip_all();
        Scanner saved = sc_;
        if (name_start(sc_.peek()) && word() == kw) return true;
        sc_ = saved;
        return false;
    }

    void punct(char c) {
        sc_.skip_all();
        if (sc_.peek() != c) fail(sc_.pos(), std::string("expected '") + c + "', found " + describe(sc_));
        sc_.advance();
    }

    bool next_is(char c) {
        sc_.skip_all();
        return sc_.peek() == c;
    }

    long integer() {
        sc_.skip_all();
        const SourcePos p = sc_.pos();
        if (!is_digit(sc_.peek())) fail(p, "expected an integer, found " + describe(sc_));
        long v = 0;
        while (is_digit(sc_.peek())) {
            if (v > kMaxDim) fail(p, "integer is too large");
            v = v * 10 + (sc_.peek() - '0');
            sc_.advance();
        }
        return v;
    }

    /// Unsigned decimal number with optional fraction and exponent.
    bool unsigned_number(double &out) {
        const std::size_t start = sc_.offset();
        const SourcePos p = sc_.pos();
        bool digits = false;
        while (is_digit(sc_.peek())) {
            sc_.advance();
            digits = true;
        }
        if (sc_.peek() == '.') {
            sc_.advance();
            while (is_digit(sc_.peek())) {
                sc_.advance();
                digits = true;
            }
        }
        if (!digits) {
            if (sc_.offset() != start) fail(p, "malformed number");
            return false;
        }
        if (sc_.peek() == 'e' || sc_.peek() == 'E') {
            const char after = sc_.peek(1);
            const bool signed_exp = (after == '+' || after == '-') && is_digit(sc_.peek(2));
            if (is_digit(after) || signed_exp) {
                sc_.advance();
                if (signed_exp) sc_.advance();
                while (is_digit(sc_.peek())) sc_.advance();
            }
        }
        const std::string text(sc_.rest_from(start));
        out = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(out)) fail(p, "number '" + text + "' is out of range");
        return true;
    }

    double real() {
        sc_.skip_all();
        const SourcePos p = sc_.pos();
        double sign = 1.0;
        if (sc_.peek() == '+' || sc_.peek() == '-') {
            if (sc_.peek() == '-') sign = -1.0;
            sc_.advance();
        }
        double v = 0.0;
        if (!unsigned_number(v)) fail(p, "expected a real number, found " + describe(sc_));
        return sign * v;
    }

    /// One signed term of a complex literal. Sets `imag` when it ends in i.
    void complex_term(double &value, bool &imag, bool need_sign) {
        const SourcePos p = sc_.pos();
        double sign = 1.0;
        if (sc_.peek() == '+' || sc_.peek() == '-') {
            if (sc_.peek() == '-') sign = -1.0;
            sc_.advance();
        } else if (need_sign) {
            fail(p, "expected '+' or '-'");
        }
        double v = 1.0;
        const bool has_number = unsigned_number(v);
        imag = false;
        if (sc_.peek() == 'i' && !name_char(sc_.peek(1))) {
            sc_.advance();
            imag = true;
        } else if (!has_number) {
            fail(p, "expected a complex number, found " + describe(sc_));
        }
        value = sign * v;
    }

    Complex complex() {
        sc_.skip_all();
        const SourcePos p = sc_.pos();
        double a = 0.0;
        bool a_imag = false;
        complex_term(a, a_imag, false);
        if (a_imag) return {0.0, a};
        if (sc_.peek() == '+' || sc_.peek() == '-') {
            double b = 0.0;
            bool b_imag = false;
            complex_term(b, b_imag, true);
            if (!b_imag) fail(p, "the second part of a complex number must end in 'i'");
            return {a, b};
        }
        return {a, 0.0};
    }

    /// Bracketed list of complex numbers separated by commas or blanks.
    std::vector<Complex> complex_list() {
        punct('[');
        std::vector<Complex> out;
        if (next_is(']')) fail(sc_.pos(), "empty list");
        for (;;) {
            out.push_back(complex());
            if (next_is(',')) sc_.advance();
            if (next_is(']')) {
                sc_.advance();
                return out;
            }
        }
    }

    Operator matrix() {
        const SourcePos p = (sc_.skip_all(), sc_.pos());
        punct('[');
        std::vector<std::vector<Complex>> rows;
        for (;;) {
            const SourcePos rp = (sc_.skip_all(), sc_.pos());
            rows.push_back(complex_list());
            if (rows.back().size() != rows.front().size())
                fail(rp, "row " + std::to_string(rows.size()) + " has " + std::to_string(rows.back().size()) +
                             " entries, expected " + std::to_string(rows.front().size()));
            if (next_is(',')) sc_.advance();
            if (next_is(']')) {
                sc_.advance();
                break;
            }
            if (!next_is('[')) fail(sc_.pos(), "expected '[' or ']', found " + describe(sc_));
        }
        if (rows.size() != rows.front().size())
            fail(p, "matrix is " + std::to_string(rows.size()) + "x" + std::to_string(rows.front().size()) +
                        ", expected a square matrix");
        const auto n = static_cast<Eigen::Index>(rows.size());
        Operator m(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[r][c];
        return m;
    }

    SpaceDecl space(SourcePos p) {
        SpaceDecl d;
        d.pos = p;
        d.name = name("a space name");
        keyword("dim");
        d.dim = integer();
        return d;
    }

    KetDecl ket(SourcePos p) {
        KetDecl d;
        d.pos = p;
        d.name = name("a ket name");
        keyword("in");
        d.space = name("a space name");
        punct('=');
        const std::vector<Complex> a = complex_list();
        d.amplitudes = Ket(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) d.amplitudes(static_cast<Eigen::Index>(i)) = a[i];
        return d;
    }

    DensityDecl density(SourcePos p) {
        DensityDecl d;
        d.pos = p;
        d.name = name("a density name");
        keyword("on");
        d.space = name("a space name");
        punct('=');
        d.matrix = matrix();
        return d;
    }

    UnitaryDecl unitary(SourcePos p) {
        UnitaryDecl d;
        d.pos = p;
        d.name = name("a unitary name");
        keyword("on");
        d.space = name("a space name");
        punct('=');
        d.matrix = matrix();
        return d;
    }

    ProjDecl proj(SourcePos p) {
        ProjDecl d;
        d.pos = p;
        d.name = name("a projector name");
        keyword("on");
        d.space = name("a space name");
        punct('=');
        if (next_is('[')) {
            d.matrix = matrix();
            return d;
        }
        keyword("span");
        punct('(');
        for (;;) {
            d.span.push_back(name("a ket name"));
            if (next_is(')')) break;
            punct(',');
        }
        sc_.advance();
        return d;
    }

    DecompDecl decomp(SourcePos p) {
        DecompDecl d;
        d.pos = p;
        d.name = name("a decomposition name");
        keyword("on");
        d.space = name("a space name");
        punct('=');
        punct('{');
        for (;;) {
            DecompMember m;
            m.projector = name("a projector name");
            if (optional_keyword("as")) m.label = name("a label");
            d.members.push_back(std::move(m));
            if (next_is('}')) break;
            punct(',');
        }
        sc_.advance();
        return d;
    }

    TimesDecl times(SourcePos p) {
        TimesDecl d;
        d.pos = p;
        d.name = name("a time grid name");
        punct('=');
        punct('[');
        for (;;) {
            d.values.push_back(real());
            if (next_is(']')) break;
            punct(',');
        }
        sc_.advance();
        return d;
    }

    FamilyDecl family(SourcePos p) {
        FamilyDecl d;
        d.pos = p;
        d.name = name("a family name");
        keyword("times");
        d.times = name("a time grid name");
        if (optional_keyword("initial")) {
            d.initial = name("an initial state name");
            if (optional_keyword("as")) d.initial_label = name("a label");
        }
        punct('{');
        while (!next_is('}')) {
            FamilySlot s;
            s.pos = sc_.pos();
            keyword("at");
            s.time = real();
            punct(':');
            s.decomposition = name("a decomposition name or 'identity'");
            d.slots.push_back(std::move(s));
        }
        sc_.advance();
        keyword("steps");
        punct('{');
        while (!next_is('}')) {
            d.steps.push_back(name("a unitary name or 'identity'"));
            if (next_is(',')) sc_.advance();
        }
        sc_.advance();
        return d;
    }

    Scanner sc_;
};

enum class Kind { space, ket, density, unitary, proj, decomp, times, family };

inline const char *kind_name(Kind k) {
    switch (k) {
        case Kind::space:
            return "space";
        case Kind::ket:
            return "ket";
        case Kind::density:
            return "density";
        case Kind::unitary:
            return "unitary";
        case Kind::proj:
            return "projector";
        case Kind::decomp:
            return "decomposition";
        case Kind::times:
            return "time grid";
        case Kind::family:
            return "family";
    }
    return "?";
}

inline std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Compact form for numbers quoted in diagnostics.
inline std::string brief(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Builds the objects of a syntactically valid document, declaration by
/// declaration, reporting the first semantic problem.
class Compiler {
   public:
    explicit Compiler(Program &out) : p_(out) {}

    void run() {
        for (const Declaration &d : p_.document.declarations) {
            const std::string &n = decl_name(d);
            const SourcePos pos = decl_pos(d);
            if (n == "identity") fail(pos, "'identity' is reserved");
            if (kinds_.count(n)) fail(pos, "'" + n + "' is already declared as a " + kind_name(kinds_.at(n)));
            std::visit([&](const auto &x) { add(x); }, d);
        }
    }

   private:
    Kind kind_of(const std::string &n, SourcePos pos) const {
        const auto it = kinds_.find(n);
        if (it == kinds_.end()) fail(pos, "undefined name '" + n + "'");
        return it->second;
    }

    void expect(const std::string &n, Kind k, SourcePos pos) const {
        const Kind got = kind_of(n, pos);
        if (got != k) fail(pos, "'" + n + "' is a " + kind_name(got) + ", expected a " + kind_name(k));
    }

    Eigen::Index space_dim(const std::string &n, SourcePos pos) const {
        expect(n, Kind::space, pos);
        return p_.spaces.at(n);
    }

    void require_space(const std::string &what, const std::string &name, const std::string &have,
                       const std::string &want, SourcePos pos) const {
        if (have != want)
            fail(pos, what + " '" + name + "' lives on space '" + have + "', expected space '" + want + "'");
    }

    void check_dim(Eigen::Index got, Eigen::Index want, const std::string &what, SourcePos pos) const {
        if (got != want)
            fail(pos, "dimension mismatch: " + what + " has dimension " + std::to_string(got) + ", space has " +
                          std::to_string(want));
    }

    void add(const SpaceDecl &d) {
        if (d.dim < 1) fail(d.pos, "space dimension must be positive");
        if (d.dim > kMaxDim) fail(d.pos, "space dimension exceeds " + std::to_string(kMaxDim));
        p_.spaces[d.name] = d.dim;
        kinds_[d.name] = Kind::space;
    }

    void add(const KetDecl &d) {
        const Eigen::Index n = space_dim(d.space, d.pos);
        check_dim(d.amplitudes.size(), n, "ket '" + d.name + "'", d.pos);
        if (d.amplitudes.norm() < tol::span) fail(d.pos, "ket '" + d.name + "' is zero");
        p_.kets[d.name] = d.amplitudes;
        space_of_[d.name] = d.space;
        kinds_[d.name] = Kind::ket;
    }

    void add(const DensityDecl &d) {
        const Eigen::Index n = space_dim(d.space, d.pos);
        check_dim(d.matrix.rows(), n, "density '" + d.name + "'", d.pos);
        try {
            p_.densities.emplace(d.name, DensityOperator(d.matrix));
        } catch (const Error &e) {
            fail(d.pos, "density '" + d.name + "': " + e.what());
        }
        space_of_[d.name] = d.space;
        kinds_[d.name] = Kind::density;
    }

    void add(const UnitaryDecl &d) {
        const Eigen::Index n = space_dim(d.space, d.pos);
        check_dim(d.matrix.rows(), n, "unitary '" + d.name + "'", d.pos);
        const double defect = unitarity_defect(d.matrix);
        if (!(defect < tol::unitary))
            fail(d.pos, "non-unitary matrix '" + d.name + "': defect " + brief(defect) + " exceeds threshold " +
                            brief(tol::unitary));
        p_.unitaries[d.name] = d.matrix;
        space_of_[d.name] = d.space;
        kinds_[d.name] = Kind::unitary;
    }

    void add(const ProjDecl &d) {
        const Eigen::Index n = space_dim(d.space, d.pos);
        try {
            if (d.matrix) {
                check_dim(d.matrix->rows(), n, "projector '" + d.name + "'", d.pos);
                p_.projectors.emplace(d.name, Projector(*d.matrix));
            } else {
                std::vector<Ket> kets;
                for (const std::string &k : d.span) {
                    expect(k, Kind::ket, d.pos);
                    require_space("ket", k, space_of_.at(k), d.space, d.pos);
                    kets.push_back(p_.kets.at(k));
                }
                p_.projectors.emplace(d.name, projector_onto_span(kets));
            }
        } catch (const Error &e) {
            fail(d.pos, "projector '" + d.name + "': " + e.what());
        }
        space_of_[d.name] = d.space;
        kinds_[d.name] = Kind::proj;
    }

    void add(const DecompDecl &d) {
        space_dim(d.space, d.pos);
        std::vector<DecompositionMember> members;
        for (const DecompMember &m : d.members) {
            expect(m.projector, Kind::proj, d.pos);
            require_space("projector", m.projector, space_of_.at(m.projector), d.space, d.pos);
            members.push_back({m.effective_label(), p_.projectors.at(m.projector)});
        }
        Decomposition dec(std::move(members));
        const DecompositionReport r = validate_decomposition(dec);
        if (!r.valid) {
            const bool incomplete = r.completeness_defect >= tol::proj;
            fail(d.pos, std::string(incomplete ? "incomplete decomposition '" : "invalid decomposition '") + d.name +
                            "': " + r.problems.front());
        }
        p_.decompositions.emplace(d.name, std::move(dec));
        space_of_[d.name] = d.space;
        kinds_[d.name] = Kind::decomp;
    }

    void add(const TimesDecl &d) {
        try {
            p_.grids.emplace(d.name, TimeGrid::from_values(d.values));
        } catch (const Error &e) {
            fail(d.pos, "time grid '" + d.name + "': " + e.what());
        }
        kinds_[d.name] = Kind::times;
    }

    void add(const FamilyDecl &d) {
        expect(d.times, Kind::times, d.pos);
        const TimeGrid &grid = p_.grids.at(d.times);
        const std::size_t n = grid.size();

        // Every non-identity reference fixes the family's space.
        std::string space;
        const auto join = [&](const std::string &what, const std::string &name, SourcePos pos) {
            const std::string &s = space_of_.at(name);
            if (space.empty()) {
                space = s;
            } else {
                require_space(what, name, s, space, pos);
            }
        };

        std::optional<InitialCondition> initial;
        if (!d.initial.empty()) {
            const Kind k = kind_of(d.initial, d.pos);
            if (k != Kind::ket && k != Kind::density)
                fail(d.pos, "initial state '" + d.initial + "' must be a ket or a density");
            join(k == Kind::ket ? "ket" : "density", d.initial, d.pos);
        }

        std::vector<std::string> slot_names(n);
        std::vector<bool> seen(n, false);
        for (const FamilySlot &s : d.slots) {
            const int j = grid.index_of_value(s.time);
            if (j < 0) fail(s.pos, "time " + number(s.time) + " is not in grid '" + d.times + "'");
            if (seen[j]) fail(s.pos, "time " + number(s.time) + " is assigned twice");
            seen[j] = true;
            if (s.decomposition == "identity") continue;
            expect(s.decomposition, Kind::decomp, s.pos);
            join("decomposition", s.decomposition, s.pos);
            slot_names[j] = s.decomposition;
        }

        if (d.steps.size() + 1 != n)
            fail(d.pos, "family '" + d.name + "' needs " + std::to_string(n - 1) + " steps, got " +
                            std::to_string(d.steps.size()));
        for (const std::string &u : d.steps) {
            if (u == "identity") continue;
            expect(u, Kind::unitary, d.pos);
            join("unitary", u, d.pos);
        }
        if (space.empty()) fail(d.pos, "cannot infer the space of family '" + d.name + "'");
        const Eigen::Index dim = p_.spaces.at(space);

        if (!d.initial.empty()) {
            const std::string label = d.initial_label.empty() ? d.initial : d.initial_label;
            try {
                if (kinds_.at(d.initial) == Kind::ket) {
                    initial = InitialCondition::pure(label, p_.kets.at(d.initial));
                } else {
                    initial = InitialCondition::density(label, p_.densities.at(d.initial));
                }
            } catch (const Error &e) {
                fail(d.pos, "family '" + d.name + "': " + e.what());
            }
        }

        const std::string key = d.times + "|" + space + "|" + join_steps(d.steps);
        auto it = dynamics_.find(key);
        if (it == dynamics_.end()) {
            PropagatorSetPtr ps;
            if (d.steps.empty()) {
                ps = std::make_shared<const PropagatorSet>(PropagatorSet::trivial(key, grid, dim));
            } else {
                std::vector<Operator> steps;
                for (const std::string &u : d.steps)
                    steps.push_back(u == "identity" ? Operator(Operator::Identity(dim, dim)) : p_.unitaries.at(u));
                ps = std::make_shared<const PropagatorSet>(key, grid, steps);
            }
            it = dynamics_.emplace(key, ps).first;
        }

        std::vector<Decomposition> decs(n);
        for (std::size_t j = 0; j < n; ++j)
            if (!slot_names[j].empty()) decs[j] = p_.decompositions.at(slot_names[j]);
        try {
            p_.families.emplace_back(d.name, it->second, std::move(decs), std::move(initial));
        } catch (const Error &e) {
            fail(d.pos, e.what());
        }
        kinds_[d.name] = Kind::family;
    }

    static std::string join_steps(const std::vector<std::string> &s) {
        std::string out;
        for (const auto &x : s) out += x + " ";
        return out;
    }

    Program &p_;
    std::map<std::string, Kind> kinds_;
    std::map<std::string, std::string> space_of_;
    std::map<std::string, PropagatorSetPtr> dynamics_;
};

}  // namespace detail

/// Parses and validates a document. On failure the result holds the first
/// diagnostic and no program.
inline ParseResult parse(std::string_view text) {
    ParseResult r;
    Program prog;
    try {
        prog.document = detail::SyntaxParser(text).run();
        detail::Compiler(prog).run();
    } catch (const detail::Failure &f) {
        r.diagnostics.push_back(f.diagnostic);
        return r;
    }
    r.program = std::move(prog);
    return r;
}

/// parse() that throws SpecError on the first diagnostic.
inline Program load(std::string_view text) {
    ParseResult r = parse(text);
    if (!r.ok()) throw SpecError(r.diagnostics.front());
    return std::move(*r.program);
}

inline std::string format_complex(Complex c) {
    const double re = c.real();
    const double im = c.imag();
    if (im == 0.0) return detail::number(re);
    if (re == 0.0) return detail::number(im) + "i";
    return detail::number(re) + (std::signbit(im) ? "-" : "+") + detail::number(std::abs(im)) + "i";
}

namespace detail {

inline std::string format_row(const Operator &m, Eigen::Index r) {
    std::string out = "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out += ", ";
        out += format_complex(m(r, c));
    }
    return out + "]";
}

inline std::string format_matrix(const Operator &m) {
    std::string out = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) out += (r ? ",\n  " : "\n  ") + format_row(m, r);
    return out + "\n]";
}

inline int kind_rank(const Declaration &d) { return static_cast<int>(d.index()); }

inline void emit(std::string &out, const SpaceDecl &d) {
    out += "space " + d.name + " dim " + std::to_string(d.dim) + "\n";
}

inline void emit(std::string &out, const KetDecl &d) {
    out += "ket " + d.name + " in " + d.space + " = [";
    for (Eigen::Index i = 0; i < d.amplitudes.size(); ++i) {
        if (i) out += ", ";
        out += format_complex(d.amplitudes(i));
    }
    out += "]\n";
}

inline void emit(std::string &out, const DensityDecl &d) {
    out += "density " + d.name + " on " + d.space + " = " + format_matrix(d.matrix) + "\n";
}

inline void emit(std::string &out, const UnitaryDecl &d) {
    out += "unitary " + d.name + " on " + d.space + " = " + format_matrix(d.matrix) + "\n";
}

inline void emit(std::string &out, const ProjDecl &d) {
    out += "proj " + d.name + " on " + d.space + " = ";
    if (d.matrix) {
        out += format_matrix(*d.matrix) + "\n";
        return;
    }
    out += "span(";
    for (std::size_t i = 0; i < d.span.size(); ++i) out += (i ? ", " : "") + d.span[i];
    out += ")\n";
}

inline void emit(std::string &out, const DecompDecl &d) {
    out += "decomp " + d.name + " on " + d.space + " = {";
    for (std::size_t i = 0; i < d.members.size(); ++i) {
        if (i) out += ", ";
        out += d.members[i].projector;
        if (!d.members[i].label.empty() && d.members[i].label != d.members[i].projector)
            out += " as " + d.members[i].label;
    }
    out += "}\n";
}

inline void emit(std::string &out, const TimesDecl &d) {
    out += "times " + d.name + " = [";
    for (std::size_t i = 0; i < d.values.size(); ++i) out += (i ? ", " : "") + number(d.values[i]);
    out += "]\n";
}

inline void emit(std::string &out, const FamilyDecl &d) {
    out += "family " + d.name + " times " + d.times;
    if (!d.initial.empty()) {
        out += " initial " + d.initial;
        if (!d.initial_label.empty() && d.initial_label != d.initial) out += " as " + d.initial_label;
    }
    out += " {\n";
    for (const FamilySlot &s : d.slots) out += "  at " + number(s.time) + ": " + s.decomposition + "\n";
    out += "} steps {";
    for (const std::string &u : d.steps) out += " " + u;
    out += d.steps.empty() ? "}\n" : " }\n";
}

}  // namespace detail

/// Canonical text: the header line, then declarations grouped by kind in
/// dependency order (spaces, kets, densities, unitaries, projectors,
/// decompositions, time grids, families), each group in document order.
inline std::string serialize(const Document &doc) {
    std::string out = std::string(kHeader) + "\n";
    std::vector<const Declaration *> order;
    for (const auto &d : doc.declarations) order.push_back(&d);
    std::stable_sort(order.begin(), order.end(), [](const Declaration *a, const Declaration *b) {
        return detail::kind_rank(*a) < detail::kind_rank(*b);
    });
    int last = -1;
    for (const Declaration *d : order) {
        const int k = detail::kind_rank(*d);
        if (k != last) out += "\n";
        last = k;
        std::visit([&](const auto &x) { detail::emit(out, x); }, *d);
    }
    return out;
}

namespace detail {

inline bool close(const Operator &a, const Operator &b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return a.size() == 0 || (a - b).cwiseAbs().maxCoeff() <= tol;
}

inline bool same(const SpaceDecl &a, const SpaceDecl &b, double) { return a.name == b.name && a.dim == b.dim; }
inline bool same(const KetDecl &a, const KetDecl &b, double t) {
    return a.name == b.name && a.space == b.space && close(a.amplitudes, b.amplitudes, t);
}
inline bool same(const DensityDecl &a, const DensityDecl &b, double t) {
    return a.name == b.name && a.space == b.space && close(a.matrix, b.matrix, t);
}
inline bool same(const UnitaryDecl &a, const UnitaryDecl &b, double t) {
    return a.name == b.name && a.space == b.space && close(a.matrix, b.matrix, t);
}
inline bool same(const ProjDecl &a, const ProjDecl &b, double t) {
    if (a.name != b.name || a.space != b.space || a.span != b.span || a.matrix.has_value() != b.matrix.has_value())
        return false;
    return !a.matrix || close(*a.matrix, *b.matrix, t);
}
inline bool same(const DecompDecl &a, const DecompDecl &b, double) {
    if (a.name != b.name || a.space != b.space || a.members.size() != b.members.size()) return false;
    for (std::size_t i = 0; i < a.members.size(); ++i)
        if (a.members[i].projector != b.members[i].projector ||
            a.members[i].effective_label() != b.members[i].effective_label())
            return false;
    return true;
}
inline bool same(const TimesDecl &a, const TimesDecl &b, double t) {
    if (a.name != b.name || a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (std::abs(a.values[i] - b.values[i]) > t) return false;
    return true;
}
inline bool same(const FamilyDecl &a, const FamilyDecl &b, double t) {
    const auto label = [](const FamilyDecl &f) { return f.initial_label.empty() ? f.initial : f.initial_label; };
    if (a.name != b.name || a.times != b.times || a.initial != b.initial || label(a) != label(b) ||
        a.steps != b.steps || a.slots.size() != b.slots.size())
        return false;
    for (std::size_t i = 0; i < a.slots.size(); ++i)
        if (std::abs(a.slots[i].time - b.slots[i].time) > t || a.slots[i].decomposition != b.slots[i].decomposition)
            return false;
    return true;
}

}  // namespace detail

/// True when both documents declare the same objects, in the same canonical
/// order, with numeric payloads equal within `tol`.
inline bool equivalent(const Document &a, const Document &b, double tol = 1e-15) {
    const auto sorted = [](const Document &d) {
        std::vector<const Declaration *> v;
        for (const auto &x : d.declarations) v.push_back(&x);
        std::stable_sort(v.begin(), v.end(), [](const Declaration *p, const Declaration *q) {
            return detail::kind_rank(*p) < detail::kind_rank(*q);
        });
        return v;
    };
    const auto va = sorted(a);
    const auto vb = sorted(b);
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i]->index() != vb[i]->index()) return false;
        const bool eq = std::visit(
            [&](const auto &x) {
                using T = std::decay_t<decltype(x)>;
                return detail::same(x, std::get<T>(*vb[i]), tol);
            },
            *va[i]);
        if (!eq) return false;
    }
    return true;
}

inline bool valid_name(const std::string &s) {
    if (s.empty() || !detail::name_start(s[0]) || s == "identity") return false;
    for (char c : s)
        if (!detail::name_char(c)) return false;
    return true;
}

namespace detail {

/// Accumulates the declarations of a scenario export, sharing equal
/// operators and grids.
class Exporter {
   public:
    Document doc;

    std::string space(Eigen::Index dim) {
        const std::string n = "h" + std::to_string(dim);
        if (spaces_.insert(n).second) doc.declarations.emplace_back(SpaceDecl{n, static_cast<long>(dim), {}});
        return n;
    }

    std::string times(const TimeGrid &g) {
        for (const auto &[values, name] : grids_)
            if (values == g.values()) return name;
        const std::string n = "grid" + std::to_string(grids_.size());
        grids_.emplace_back(g.values(), n);
        doc.declarations.emplace_back(TimesDecl{n, g.values(), {}});
        return n;
    }

    std::string unitary(const Operator &u, const std::string &hint) {
        if (u.isIdentity(0.0)) return "identity";
        const std::string sp = space(u.rows());
        for (const auto &[m, name] : unitaries_)
            if (m.rows() == u.rows() && m == u) return name;
        const std::string n = fresh(hint);
        unitaries_.emplace_back(u, n);
        doc.declarations.emplace_back(UnitaryDecl{n, sp, u, {}});
        return n;
    }

    std::string projector(const Operator &p, const std::string &hint) {
        const std::string sp = space(p.rows());
        for (const auto &[m, name] : projectors_)
            if (m.rows() == p.rows() && m == p) return name;
        const std::string n = fresh(hint);
        projectors_.emplace_back(p, n);
        doc.declarations.emplace_back(ProjDecl{n, sp, {}, p, {}});
        return n;
    }

    std::string state(const InitialCondition &ic) {
        const std::string sp = space(ic.dim());
        if (ic.is_pure()) {
            for (const auto &[k, name] : kets_)
                if (k.size() == ic.ket().size() && k == ic.ket() && name.rfind(ic.label, 0) == 0) return name;
            const std::string n = fresh(ic.label);
            kets_.emplace_back(ic.ket(), n);
            doc.declarations.emplace_back(KetDecl{n, sp, ic.ket(), {}});
            return n;
        }
        const std::string n = fresh(ic.label);
        doc.declarations.emplace_back(DensityDecl{n, sp, ic.rho().op(), {}});
        return n;
    }

    std::string decomposition(const Decomposition &d, const std::string &name) {
        DecompDecl decl;
        decl.name = fresh(name);
        decl.space = space(d.dim());
        for (const auto &m : d.members()) {
            if (!valid_name(m.label)) throw InvalidValue("cannot export member label '" + m.label + "'");
            const std::string p = projector(m.projector.op(), m.label);
            decl.members.push_back({p, p == m.label ? std::string() : m.label});
        }
        doc.declarations.emplace_back(decl);
        return decl.name;
    }

    std::string fresh(const std::string &hint) {
        std::string base = valid_name(hint) ? hint : "x" + std::to_string(used_.size());
        std::string n = base;
        for (int k = 2; used_.count(n); ++k) n = base + "_" + std::to_string(k);
        used_.insert(n);
        return n;
    }

   private:
    std::set<std::string> spaces_;
    std::set<std::string> used_{"identity"};
    std::vector<std::pair<std::vector<double>, std::string>> grids_;
    std::vector<std::pair<Operator, std::string>> unitaries_;
    std::vector<std::pair<Operator, std::string>> projectors_;
    std::vector<std::pair<Ket, std::string>> kets_;
};

/// True when the pinned slot holds exactly the {psi, not-psi} pair the
/// family constructor would build from the initial state.
inline bool auto_pinned(const Family &f, std::size_t j) {
    if (f.pinned() != static_cast<int>(j)) return false;
    const Decomposition &d = f.decomposition(j);
    if (d.size() != 2 || d[0].label != f.initial()->label || d[1].label != complement_label(f.initial()->label))
        return false;
    const Projector p = Projector::onto(f.initial()->ket());
    return d[0].projector.op() == p.op() && d[1].projector.op() == p.complement().op();
}

inline bool trivial_slot(const Decomposition &d) {
    return d.size() == 1 && d[0].label == "I" && d[0].projector.op().isIdentity(0.0);
}

}  // namespace detail

/// famspec form of a scenario's families. Spaces are shared by dimension
/// and named h<dim>; equal operators are declared once.
inline Document export_scenario(const Scenario &s) {
    detail::Exporter ex;
    for (const Family &f : s.families) ex.fresh(f.name());
    for (const Family &f : s.families) {
        if (f.initial() && f.initial()->at_end) throw InvalidValue("cannot export a final condition");
        if (f.reference() != 0) throw InvalidValue("cannot export a nonzero reference index");
        if (!valid_name(f.name())) throw InvalidValue("cannot export family name '" + f.name() + "'");
        const Model &m = s.model_of(f);
        FamilyDecl fd;
        fd.name = f.name();
        fd.times = ex.times(f.grid());
        for (std::size_t j = 0; j < f.dynamics()->steps().size(); ++j)
            fd.steps.push_back(ex.unitary(f.dynamics()->step(j), m.name + ".T" + std::to_string(j)));
        if (f.initial()) {
            if (!valid_name(f.initial()->label))
                throw InvalidValue("cannot export initial label '" + f.initial()->label + "'");
            fd.initial = ex.state(*f.initial());
            if (fd.initial != f.initial()->label) fd.initial_label = f.initial()->label;
        }
        for (std::size_t j = 0; j < f.size(); ++j) {
            const Decomposition &d = f.decomposition(j);
            std::string slot = "identity";
            if (!detail::auto_pinned(f, j) && !detail::trivial_slot(d))
                slot = ex.decomposition(d, f.name() + "@" + f.grid().label(j));
            fd.slots.push_back({f.grid().value(j), slot, {}});
        }
        ex.doc.declarations.emplace_back(std::move(fd));
    }
    return std::move(ex.doc);
}

}  // namespace chist::famspec
