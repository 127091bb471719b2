// Copyright 2026 The qmeas authors
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
//
// Line-oriented ".qmp" protocol description format. One directive per line,
// '#' starts a comment, LF or CRLF both accepted:
//
//   protocol (wv|nwv|pointer)
//   preselect (re,im) (re,im)
//   detector theta=<real> eps=<real>
//   collapse p1=<real> [p0=<real>]     -or-    collapse gamma=<real> t=<real>
//   pointer lambda=<real> [q0=<real>] [delta=<real>]
//   postselect (re,im) (re,im) [retain=(click|noclick)]
//   run trials=<int> seed=<int> [shards=<int>]
//
// Defaults: collapse p0=0; pointer q0=0, delta=1; postselect retain=click
// (mandatory for nwv); run shards=1. The canonical serializer materializes
// every default, emits directives in the order above, prints reals with 17
// significant digits, and terminates lines with LF.
//
// Diagnostic codes. Errors: SYNTAX, UNKNOWN_DIRECTIVE, UNKNOWN_PARAM,
// MISSING_PARAM, PARAM_CONFLICT, DUP_STAGE, MISSING_STAGE, PROB_RANGE,
// PARAM_RANGE, NORM_ERROR, MISSING_RETAIN, KIND_STAGE_MISMATCH.
// Warnings: W_NORM (state normalized by the parser), W_DIVERGENT
// (pre/post overlap below threshold).

#ifndef QMEAS_PROTOCOL_HPP
#define QMEAS_PROTOCOL_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmeas/discrete_detector.hpp"
#include "qmeas/hilbert.hpp"
#include "qmeas/null_protocol.hpp"
#include "qmeas/weak_values.hpp"

namespace qmeas {

enum class ProtocolKind { wv, nwv, pointer };
enum class RetainBranch { click, noclick };

inline std::string_view to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::wv: return "wv";
        case ProtocolKind::nwv: return "nwv";
        default: return "pointer";
    }
}

inline std::string_view to_string(RetainBranch retain) {
    return retain == RetainBranch::click ? "click" : "noclick";
}

/// Two-level detector stage in the angle parameterization used for sweeps.
struct DetectorStage {
    double theta;
    double eps;

    DetectorParams params() const { return DetectorParams::from_angles(theta, eps); }

    friend bool operator==(const DetectorStage &, const DetectorStage &) = default;
};

/// Continuous-pointer stage. The grid itself is derived (q0 +/- 10 delta,
/// widened for the coupled shift), so only the physical knobs are stored.
struct PointerStage {
    double lambda;
    double q0 = 0.0;
    double delta = 1.0;

    friend bool operator==(const PointerStage &, const PointerStage &) = default;
};

inline bool operator==(const PartialCollapseSpec &a, const PartialCollapseSpec &b) {
    return a.p0 == b.p0 && a.p1 == b.p1 && a.gamma == b.gamma && a.t == b.t;
}

using MeasurementStage = std::variant<DetectorStage, PartialCollapseSpec, PointerStage>;

struct RunParams {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint32_t shards = 1;

    friend bool operator==(const RunParams &, const RunParams &) = default;
};

/// Source line of each stage, kept so semantic diagnostics can point at the
/// offending directive. Not part of the protocol's identity.
struct StageLines {
    std::size_t protocol = 1;
    std::size_t preselect = 1;
    std::size_t measurement = 1;
    std::size_t postselect = 1;
    std::size_t run = 1;
};

/// A fully parsed experiment description: preparation, one measurement
/// stage, and the postselection convention. `postselect` is always the
/// RETAINED state; `retain` records which detector outcome that state
/// corresponds to (a destroyed system never fires the second detector, so
/// the distinction matters for the null protocol).
struct ProtocolSpec {
    ProtocolKind kind;
    Ket preselect;
    MeasurementStage measurement;
    Ket postselect;
    RetainBranch retain = RetainBranch::click;
    std::optional<RunParams> run;
    std::optional<StageLines> stage_lines;

    const DetectorStage *detector() const { return std::get_if<DetectorStage>(&measurement); }
    const PartialCollapseSpec *collapse() const {
        return std::get_if<PartialCollapseSpec>(&measurement);
    }
    const PointerStage *pointer() const { return std::get_if<PointerStage>(&measurement); }

    friend bool operator==(const ProtocolSpec &a, const ProtocolSpec &b) {
        return a.kind == b.kind && a.preselect.amps() == b.preselect.amps() &&
               a.measurement == b.measurement && a.postselect.amps() == b.postselect.amps() &&
               a.retain == b.retain && a.run == b.run;
    }
};

enum class Severity { error, warning };

struct ParseDiagnostic {
    std::size_t line;    // 1-based
    std::size_t column;  // 1-based
    Severity severity;
    std::string code;
    std::string message;
};

struct ParseResult {
    std::optional<ProtocolSpec> spec;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const {
        if (!spec) {
            return false;
        }
        for (const auto &d : diagnostics) {
            if (d.severity == Severity::error) {
                return false;
            }
        }
        return true;
    }
};

namespace dsl_detail {

struct LineScanner {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line_no;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
            pos++;
        }
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    std::size_t column() const { return pos + 1; }

    std::string_view take_token() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t') {
            pos++;
        }
        return text.substr(start, pos - start);
    }
};

inline std::optional<double> parse_real(std::string_view token) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const char *first = token.data();
    const char *last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view token) {
    if (token.empty()) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    const char *first = token.data();
    const char *last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

struct KeyValues {
    std::vector<std::pair<std::string_view, std::string_view>> entries;
    std::vector<std::size_t> columns;

    const std::string_view *find(std::string_view key) const {
        for (const auto &e : entries) {
            if (e.first == key) {
                return &e.second;
            }
        }
        return nullptr;
    }
};

inline std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace dsl_detail

/// Parses protocol text. All diagnostics are collected; a spec is produced
/// only when no error-severity diagnostic was raised.
inline ParseResult parse_protocol(std::string_view text) {
    using namespace dsl_detail;
    ParseResult result;
    auto &diags = result.diagnostics;
    auto error = [&](std::size_t line, std::size_t col, std::string code, std::string message) {
        diags.push_back({line, col, Severity::error, std::move(code), std::move(message)});
    };
    auto warning = [&](std::size_t line, std::size_t col, std::string code, std::string message) {
        diags.push_back({line, col, Severity::warning, std::move(code), std::move(message)});
    };

    std::optional<ProtocolKind> kind;
    std::optional<std::vector<cdouble>> preselect_amps;
    std::optional<MeasurementStage> measurement;
    std::optional<std::vector<cdouble>> postselect_amps;
    std::optional<RetainBranch> retain;
    std::optional<RunParams> run;
    StageLines lines_seen;
    std::size_t postselect_line = 1;

    // Reads "(re,im)" starting at the scanner cursor.
    auto take_complex = [&](LineScanner &s) -> std::optional<cdouble> {
        s.skip_ws();
        std::size_t start_col = s.column();
        if (s.pos >= s.text.size() || s.text[s.pos] != '(') {
            error(s.line_no, start_col, "SYNTAX", "expected '(re,im)' amplitude literal");
            s.take_token();
            return std::nullopt;
        }
        std::size_t close = s.text.find(')', s.pos);
        if (close == std::string_view::npos) {
            error(s.line_no, start_col, "SYNTAX", "unterminated amplitude literal");
            s.pos = s.text.size();
            return std::nullopt;
        }
        std::string_view body = s.text.substr(s.pos + 1, close - s.pos - 1);
        s.pos = close + 1;
        std::size_t comma = body.find(',');
        if (comma == std::string_view::npos) {
            error(s.line_no, start_col, "SYNTAX", "amplitude literal needs 're,im'");
            return std::nullopt;
        }
        auto trim = [](std::string_view v) {
            while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
            while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
            return v;
        };
        auto re = parse_real(trim(body.substr(0, comma)));
        auto im = parse_real(trim(body.substr(comma + 1)));
        if (!re || !im) {
            error(s.line_no, start_col, "SYNTAX", "amplitude components must be real numbers");
            return std::nullopt;
        }
        if (!std::isfinite(*re) || !std::isfinite(*im)) {
            error(s.line_no, start_col, "PARAM_RANGE", "amplitude components must be finite");
            return std::nullopt;
        }
        return cdouble{*re, *im};
    };

    // Reads the remaining tokens of a line as key=value pairs.
    auto take_key_values = [&](LineScanner &s) -> std::optional<KeyValues> {
        KeyValues kv;
        while (!s.at_end()) {
            std::size_t col = s.column();
            std::string_view token = s.take_token();
            std::size_t eq = token.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                error(s.line_no, col, "SYNTAX", "expected key=value");
                return std::nullopt;
            }
            kv.entries.emplace_back(token.substr(0, eq), token.substr(eq + 1));
            kv.columns.push_back(col);
        }
        return kv;
    };

    auto reject_unknown_keys = [&](const KeyValues &kv, std::size_t line,
                                   std::initializer_list<std::string_view> known) {
        bool clean = true;
        for (std::size_t k = 0; k < kv.entries.size(); k++) {
            bool found = false;
            for (auto name : known) {
                if (kv.entries[k].first == name) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                error(line, kv.columns[k], "UNKNOWN_PARAM",
                      "unknown parameter '" + std::string(kv.entries[k].first) + "'");
                clean = false;
            }
            for (std::size_t j = 0; j < k; j++) {
                if (kv.entries[j].first == kv.entries[k].first) {
                    error(line, kv.columns[k], "SYNTAX",
                          "parameter '" + std::string(kv.entries[k].first) + "' given twice");
                    clean = false;
                }
            }
        }
        return clean;
    };

    auto require_real = [&](const KeyValues &kv, std::size_t line, std::string_view key)
        -> std::optional<double> {
        const std::string_view *raw = kv.find(key);
        if (!raw) {
            error(line, 1, "MISSING_PARAM", "missing required parameter '" + std::string(key) + "'");
            return std::nullopt;
        }
        auto value = parse_real(*raw);
        if (!value) {
            error(line, 1, "SYNTAX", "parameter '" + std::string(key) + "' is not a real number");
            return std::nullopt;
        }
        if (!std::isfinite(*value)) {
            error(line, 1, "PARAM_RANGE", "parameter '" + std::string(key) + "' must be finite");
            return std::nullopt;
        }
        return value;
    };

    auto optional_real = [&](const KeyValues &kv, std::size_t line, std::string_view key,
                             double fallback) -> std::optional<double> {
        if (!kv.find(key)) {
            return fallback;
        }
        return require_real(kv, line, key);
    };

    std::size_t line_no = 0;
    std::size_t cursor = 0;
    std::size_t last_line = 1;
    while (cursor <= text.size()) {
        std::size_t nl = text.find('\n', cursor);
        std::string_view raw_line = text.substr(
            cursor, nl == std::string_view::npos ? text.size() - cursor : nl - cursor);
        if (nl == std::string_view::npos && raw_line.empty() && line_no > 0) {
            break;
        }
        line_no++;
        last_line = line_no;
        cursor = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (!raw_line.empty() && raw_line.back() == '\r') {
            raw_line.remove_suffix(1);
        }
        std::size_t hash = raw_line.find('#');
        if (hash != std::string_view::npos) {
            raw_line = raw_line.substr(0, hash);
        }
        LineScanner s{raw_line, 0, line_no};
        if (s.at_end()) {
            continue;
        }
        std::size_t directive_col = s.column();
        std::string_view directive = s.take_token();

        if (directive == "protocol") {
            if (kind) {
                error(line_no, directive_col, "DUP_STAGE", "duplicate 'protocol' directive");
                continue;
            }
            lines_seen.protocol = line_no;
            std::size_t col = s.column();
            std::string_view value = s.take_token();
            if (value == "wv") {
                kind = ProtocolKind::wv;
            } else if (value == "nwv") {
                kind = ProtocolKind::nwv;
            } else if (value == "pointer") {
                kind = ProtocolKind::pointer;
            } else {
                error(line_no, col, "SYNTAX", "protocol kind must be wv, nwv, or pointer");
            }
            if (!s.at_end()) {
                error(line_no, s.column(), "SYNTAX", "trailing tokens after protocol kind");
            }
        } else if (directive == "preselect" || directive == "postselect") {
            bool is_pre = directive == "preselect";
            if ((is_pre && preselect_amps) || (!is_pre && postselect_amps)) {
                error(line_no, directive_col, "DUP_STAGE",
                      "duplicate '" + std::string(directive) + "' directive");
                continue;
            }
            auto a0 = take_complex(s);
            auto a1 = take_complex(s);
            std::optional<RetainBranch> line_retain;
            bool tail_ok = true;
            while (!s.at_end()) {
                std::size_t col = s.column();
                std::string_view token = s.take_token();
                if (!is_pre && token.substr(0, 7) == "retain=") {
                    std::string_view v = token.substr(7);
                    if (v == "click") {
                        line_retain = RetainBranch::click;
                    } else if (v == "noclick") {
                        line_retain = RetainBranch::noclick;
                    } else {
                        error(line_no, col, "SYNTAX", "retain must be click or noclick");
                        tail_ok = false;
                    }
                } else {
                    error(line_no, col, "SYNTAX",
                          "unexpected token '" + std::string(token) + "'");
                    tail_ok = false;
                }
            }
            if (!a0 || !a1 || !tail_ok) {
                continue;
            }
            double n = std::sqrt(std::norm(*a0) + std::norm(*a1));
            if (n == 0.0 || std::abs(n - 1.0) > 1e-3) {
                error(line_no, directive_col, "NORM_ERROR",
                      "state norm deviates from 1 by more than 1e-3");
                continue;
            }
            if (std::abs(n - 1.0) > kStateNormTol) {
                warning(line_no, directive_col, "W_NORM",
                        "state was normalized by the parser (norm deviation " +
                            format_real(std::abs(n - 1.0)) + ")");
            }
            std::vector<cdouble> amps{*a0, *a1};
            if (std::abs(n - 1.0) > 1e-15) {
                amps[0] /= n;
                amps[1] /= n;
            }
            if (is_pre) {
                preselect_amps = std::move(amps);
                lines_seen.preselect = line_no;
            } else {
                postselect_amps = std::move(amps);
                retain = line_retain;
                lines_seen.postselect = line_no;
                postselect_line = line_no;
            }
        } else if (directive == "detector" || directive == "collapse" || directive == "pointer") {
            if (measurement) {
                error(line_no, directive_col, "DUP_STAGE", "duplicate measurement stage");
                continue;
            }
            auto kv = take_key_values(s);
            if (!kv) {
                continue;
            }
            lines_seen.measurement = line_no;
            if (directive == "detector") {
                if (!reject_unknown_keys(*kv, line_no, {"theta", "eps"})) {
                    continue;
                }
                auto theta = require_real(*kv, line_no, "theta");
                auto eps = require_real(*kv, line_no, "eps");
                if (theta && eps) {
                    measurement = DetectorStage{*theta, *eps};
                }
            } else if (directive == "collapse") {
                if (!reject_unknown_keys(*kv, line_no, {"p1", "p0", "gamma", "t"})) {
                    continue;
                }
                bool has_prob = kv->find("p1") || kv->find("p0");
                bool has_rate = kv->find("gamma") || kv->find("t");
                if (has_prob && has_rate) {
                    error(line_no, directive_col, "PARAM_CONFLICT",
                          "give either p1/p0 or gamma/t, not both");
                    continue;
                }
                if (has_rate) {
                    auto gamma = require_real(*kv, line_no, "gamma");
                    auto t = require_real(*kv, line_no, "t");
                    if (!gamma || !t) {
                        continue;
                    }
                    if (*gamma < 0.0 || *t < 0.0) {
                        error(line_no, directive_col, "PARAM_RANGE",
                              "gamma and t must be nonnegative");
                        continue;
                    }
                    measurement = PartialCollapseSpec::from_rate(*gamma, *t);
                } else {
                    auto p1 = require_real(*kv, line_no, "p1");
                    auto p0 = optional_real(*kv, line_no, "p0", 0.0);
                    if (!p1 || !p0) {
                        continue;
                    }
                    if (*p1 < 0.0 || *p1 > 1.0 || *p0 < 0.0 || *p0 > 1.0) {
                        error(line_no, directive_col, "PROB_RANGE",
                              "click probabilities must lie in [0,1]");
                        continue;
                    }
                    measurement = PartialCollapseSpec::from_probabilities(*p1, *p0);
                }
            } else {
                if (!reject_unknown_keys(*kv, line_no, {"lambda", "q0", "delta"})) {
                    continue;
                }
                auto lambda = require_real(*kv, line_no, "lambda");
                auto q0 = optional_real(*kv, line_no, "q0", 0.0);
                auto delta = optional_real(*kv, line_no, "delta", 1.0);
                if (!lambda || !q0 || !delta) {
                    continue;
                }
                if (*delta <= 0.0) {
                    error(line_no, directive_col, "PARAM_RANGE", "delta must be positive");
                    continue;
                }
                measurement = PointerStage{*lambda, *q0, *delta};
            }
        } else if (directive == "run") {
            if (run) {
                error(line_no, directive_col, "DUP_STAGE", "duplicate 'run' directive");
                continue;
            }
            auto kv = take_key_values(s);
            if (!kv) {
                continue;
            }
            lines_seen.run = line_no;
            if (!reject_unknown_keys(*kv, line_no, {"trials", "seed", "shards"})) {
                continue;
            }
            RunParams params;
            bool ok = true;
            auto read_uint = [&](std::string_view key, bool required,
                                 std::uint64_t fallback) -> std::optional<std::uint64_t> {
                const std::string_view *raw = kv->find(key);
                if (!raw) {
                    if (required) {
                        error(line_no, 1, "MISSING_PARAM",
                              "missing required parameter '" + std::string(key) + "'");
                        ok = false;
                        return std::nullopt;
                    }
                    return fallback;
                }
                auto value = parse_uint(*raw);
                if (!value) {
                    error(line_no, 1, "SYNTAX",
                          "parameter '" + std::string(key) + "' is not a nonnegative integer");
                    ok = false;
                    return std::nullopt;
                }
                return value;
            };
            auto trials = read_uint("trials", true, 0);
            auto seed = read_uint("seed", true, 0);
            auto shards = read_uint("shards", false, 1);
            if (!ok || !trials || !seed || !shards) {
                continue;
            }
            if (*trials == 0) {
                error(line_no, directive_col, "PARAM_RANGE", "trials must be >= 1");
                continue;
            }
            if (*shards == 0 || *shards > 0xffffffffull) {
                error(line_no, directive_col, "PARAM_RANGE", "shards must be in [1, 2^32)");
                continue;
            }
            params.trials = *trials;
            params.seed = *seed;
            params.shards = static_cast<std::uint32_t>(*shards);
            run = params;
        } else {
            error(line_no, directive_col, "UNKNOWN_DIRECTIVE",
                  "unknown directive '" + std::string(directive) + "'");
        }
    }

    if (!kind) {
        error(last_line, 1, "MISSING_STAGE", "missing mandatory stage: protocol");
    }
    if (!preselect_amps) {
        error(last_line, 1, "MISSING_STAGE", "missing mandatory stage: preselect");
    }
    if (!measurement) {
        error(last_line, 1, "MISSING_STAGE", "missing mandatory stage: measurement");
    }
    if (!postselect_amps) {
        error(last_line, 1, "MISSING_STAGE", "missing mandatory stage: postselect");
    }
    if (kind && *kind == ProtocolKind::nwv && postselect_amps && !retain) {
        error(postselect_line, 1, "MISSING_RETAIN",
              "nwv postselection must state retain=click or retain=noclick");
    }
    for (const auto &d : diags) {
        if (d.severity == Severity::error) {
            return result;
        }
    }

    ProtocolSpec spec{
        *kind,
        Ket::qubit((*preselect_amps)[0], (*preselect_amps)[1]),
        *measurement,
        Ket::qubit((*postselect_amps)[0], (*postselect_amps)[1]),
        retain.value_or(RetainBranch::click),
        run,
        lines_seen,
    };
    result.spec = std::move(spec);
    return result;
}

/// Canonical text form; parse(serialize(s)) reproduces s field for field.
inline std::string serialize_protocol(const ProtocolSpec &spec) {
    using dsl_detail::format_real;
    std::string out;
    out += "protocol ";
    out += to_string(spec.kind);
    out += "\n";
    auto append_state = [&](std::string_view directive, const Ket &state) {
        out += directive;
        for (std::size_t k = 0; k < 2; k++) {
            out += " (" + format_real(state[k].real()) + "," + format_real(state[k].imag()) + ")";
        }
    };
    append_state("preselect", spec.preselect);
    out += "\n";
    if (const auto *d = spec.detector()) {
        out += "detector theta=" + format_real(d->theta) + " eps=" + format_real(d->eps) + "\n";
    } else if (const auto *c = spec.collapse()) {
        if (c->gamma && c->t) {
            out += "collapse gamma=" + format_real(*c->gamma) + " t=" + format_real(*c->t) + "\n";
        } else {
            out += "collapse p1=" + format_real(c->p1) + " p0=" + format_real(c->p0) + "\n";
        }
    } else if (const auto *p = spec.pointer()) {
        out += "pointer lambda=" + format_real(p->lambda) + " q0=" + format_real(p->q0) +
               " delta=" + format_real(p->delta) + "\n";
    }
    append_state("postselect", spec.postselect);
    out += " retain=";
    out += to_string(spec.retain);
    out += "\n";
    if (spec.run) {
        out += "run trials=" + std::to_string(spec.run->trials) +
               " seed=" + std::to_string(spec.run->seed) +
               " shards=" + std::to_string(spec.run->shards) + "\n";
    }
    return out;
}

/// Semantic checks on a structurally valid spec.
inline std::vector<ParseDiagnostic> validate_protocol(
    const ProtocolSpec &spec, double epsilon_overlap = kDefaultOverlapEpsilon) {
    std::vector<ParseDiagnostic> diags;
    StageLines lines = spec.stage_lines.value_or(StageLines{});
    bool stage_matches = (spec.kind == ProtocolKind::wv && spec.detector()) ||
                         (spec.kind == ProtocolKind::nwv && spec.collapse()) ||
                         (spec.kind == ProtocolKind::pointer && spec.pointer());
    if (!stage_matches) {
        diags.push_back({lines.measurement, 1, Severity::error, "KIND_STAGE_MISMATCH",
                         "measurement stage does not match the declared protocol kind"});
    }
    if (fidelity(spec.postselect, spec.preselect) <= epsilon_overlap) {
        diags.push_back({lines.postselect, 1, Severity::warning, "W_DIVERGENT",
                         "postselection is (nearly) orthogonal to the preselection; "
                         "conditional values diverge"});
    }
    return diags;
}

/// FNV-1a over the canonical serialization; identifies a protocol in run
/// outputs.
inline std::uint64_t protocol_hash(const ProtocolSpec &spec) {
    return dsl_detail::fnv1a64(serialize_protocol(spec));
}

}  // namespace qmeas

#endif
