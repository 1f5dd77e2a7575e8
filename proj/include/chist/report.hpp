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

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

namespace chist::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

/// %.17g, the shortest fixed format that round-trips every double.
inline std::string number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write(std::string &out, const Json &j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                write(out, it.value(), indent, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const auto &v : j) flat = flat && !v.is_structured();
            out += flat ? "[" : "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += flat ? ", " : ",\n";
                if (!flat) out += pad;
                write(out, j[i], indent, depth + 1);
            }
            out += flat ? "]" : "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += number(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Deterministic rendering: keys in insertion order, two-space indent and
/// floating-point values with 17 significant digits.
inline std::string dump(const Json &j) {
    std::string out;
    detail::write(out, j, 2, 0);
    return out + "\n";
}

}  // namespace chist::report
