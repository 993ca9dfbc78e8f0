/* io.hpp -- text formats for patterns, words, and match output
 *
 * Pattern files are line-oriented:
 *
 *     # comment
 *     alphabet a b
 *     clocks x y
 *     location s0 initial
 *     location s4 accepting
 *     trans s0 s1 a guard x > 1 & y <= 10 reset x
 *     trans s3 s4 $
 *
 * Locations must be declared before they are referenced.  Guards conjoin
 * atoms "clock op integer" with "&"; ops are <, <=, >, >=.  Word files hold
 * one "label timestamp" pair per line.  Match output is one zone per line in
 * the format of format_match_zone.
 *
 * Malformed syntax raises ParseError and semantic problems ValidationError,
 * both with 1-based line numbers.
 */

#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tpm/errors.hpp"
#include "tpm/match_zone.hpp"
#include "tpm/time.hpp"
#include "tpm/timed_automaton.hpp"
#include "tpm/timed_word.hpp"

namespace tpm {

namespace io_detail {

inline std::string at_line(int line, const std::string& msg) {
    return "line " + std::to_string(line) + ": " + msg;
}

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

/* Strip a trailing comment; '#' starts one anywhere. */
inline std::string strip_comment(const std::string& line) {
    const std::size_t pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

/* Parse "x > 1 & y <= 10" against the declared clocks.  The context string
 * names the transition for error messages. */
inline Guard parse_guard_expr(const std::string& text, const std::vector<std::string>& clocks,
                              int line, const std::string& context) {
    const auto fail = [&](const std::string& msg) -> void {
        throw ParseError(at_line(line, context + ": malformed guard: " + msg));
    };
    Guard guard;
    const char* p = text.c_str();
    const char* end = p + text.size();
    const auto skip_ws = [&] {
        while (p != end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    };
    skip_ws();
    if (p == end) fail("empty expression");
    for (;;) {
        skip_ws();
        if (p == end || !is_ident_start(*p)) fail("expected a clock name");
        const char* start = p;
        while (p != end && is_ident_char(*p)) ++p;
        const std::string name(start, p);
        int clock = -1;
        for (std::size_t i = 0; i < clocks.size(); ++i)
            if (clocks[i] == name) clock = static_cast<int>(i);
        if (clock < 0)
            throw ValidationError(at_line(line, context + ": unknown clock '" + name + "'"));

        skip_ws();
        if (p == end || (*p != '<' && *p != '>')) fail("expected <, <=, > or >= after '" + name + "'");
        const char rel = *p++;
        bool or_equal = false;
        if (p != end && *p == '=') {
            or_equal = true;
            ++p;
        }
        if (p != end && (*p == '<' || *p == '>' || *p == '='))
            fail(std::string("unrecognized operator starting with '") + rel + "'");
        const RelOp op = rel == '<' ? (or_equal ? RelOp::Le : RelOp::Lt)
                                    : (or_equal ? RelOp::Ge : RelOp::Gt);

        skip_ws();
        if (p == end || !std::isdigit(static_cast<unsigned char>(*p)))
            fail("expected a nonnegative integer bound");
        std::int64_t bound = 0;
        while (p != end && std::isdigit(static_cast<unsigned char>(*p))) {
            bound = bound * 10 + (*p - '0');
            if (bound > kTimeMax / kTick) fail("guard constant out of range");
            ++p;
        }
        guard.push_back({clock, op, bound});

        skip_ws();
        if (p == end) break;
        if (*p != '&') fail(std::string("unexpected '") + *p + "'; atoms conjoin with '&'");
        ++p;
    }
    return guard;
}

} // namespace io_detail

/* ---------------------------------------------------------------- patterns */

inline TimedAutomaton parse_pattern(std::istream& in) {
    using io_detail::at_line;
    TimedAutomaton a;
    std::map<std::string, int> location_of;
    bool saw_alphabet = false;

    const auto lookup_location = [&](const std::string& name, int line) {
        const auto it = location_of.find(name);
        if (it == location_of.end())
            throw ValidationError(at_line(
                line, "unknown location '" + name + "' (declare it with a location line first)"));
        return it->second;
    };

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = io_detail::strip_comment(raw);
        const std::vector<std::string> tok = io_detail::split_ws(text);
        if (tok.empty()) continue;

        if (tok[0] == "alphabet") {
            if (saw_alphabet) throw ParseError(at_line(line, "duplicate alphabet line"));
            saw_alphabet = true;
            if (tok.size() == 1) throw ParseError(at_line(line, "alphabet line lists no letters"));
            for (std::size_t i = 1; i < tok.size(); ++i) {
                if (tok[i].size() != 1)
                    throw ParseError(at_line(line, "alphabet letters are single characters, got '" +
                                                       tok[i] + "'"));
                const char c = tok[i][0];
                if (c == kTerminal)
                    throw ValidationError(at_line(line, "the terminal $ cannot be in the alphabet"));
                for (char seen : a.alphabet)
                    if (seen == c)
                        throw ParseError(at_line(line, std::string("duplicate letter '") + c + "'"));
                a.alphabet.push_back(c);
            }
        } else if (tok[0] == "clocks") {
            for (std::size_t i = 1; i < tok.size(); ++i) {
                if (!io_detail::is_ident_start(tok[i][0]))
                    throw ParseError(at_line(line, "bad clock name '" + tok[i] + "'"));
                for (const std::string& seen : a.clocks)
                    if (seen == tok[i])
                        throw ParseError(at_line(line, "duplicate clock '" + tok[i] + "'"));
                a.clocks.push_back(tok[i]);
            }
        } else if (tok[0] == "location") {
            if (tok.size() < 2) throw ParseError(at_line(line, "location line needs a name"));
            const std::string& name = tok[1];
            if (location_of.count(name))
                throw ParseError(at_line(line, "duplicate location '" + name + "'"));
            const int id = a.num_locations++;
            location_of[name] = id;
            a.location_names.push_back(name);
            for (std::size_t i = 2; i < tok.size(); ++i) {
                if (tok[i] == "initial")
                    a.initial.push_back(id);
                else if (tok[i] == "accepting")
                    a.accepting.push_back(id);
                else
                    throw ParseError(at_line(line, "unknown location flag '" + tok[i] +
                                                       "' (expected initial or accepting)"));
            }
        } else if (tok[0] == "trans") {
            if (tok.size() < 4)
                throw ParseError(at_line(line, "trans line needs source, target and label"));
            Transition tr;
            tr.from = lookup_location(tok[1], line);
            tr.to = lookup_location(tok[2], line);
            const std::string context = "transition " + tok[1] + " -> " + tok[2];
            if (tok[3].size() != 1)
                throw ParseError(
                    at_line(line, context + ": label must be a single character or $"));
            tr.label = tok[3][0];

            /* Optional trailing sections: "guard EXPR" and "reset CLOCKS". */
            std::size_t i = 4;
            if (i < tok.size() && tok[i] == "guard") {
                std::string expr;
                for (++i; i < tok.size() && tok[i] != "reset"; ++i) {
                    if (!expr.empty()) expr += ' ';
                    expr += tok[i];
                }
                tr.guard = io_detail::parse_guard_expr(expr, a.clocks, line, context);
            }
            if (i < tok.size() && tok[i] == "reset") {
                if (i + 1 == tok.size())
                    throw ParseError(at_line(line, context + ": reset lists no clocks"));
                for (++i; i < tok.size(); ++i) {
                    std::string name = tok[i];
                    while (!name.empty() && name.back() == ',') name.pop_back();
                    if (name.empty()) continue;
                    int clock = -1;
                    for (std::size_t c = 0; c < a.clocks.size(); ++c)
                        if (a.clocks[c] == name) clock = static_cast<int>(c);
                    if (clock < 0)
                        throw ValidationError(
                            at_line(line, context + ": unknown clock '" + name + "'"));
                    tr.resets.push_back(clock);
                }
            } else if (i < tok.size()) {
                throw ParseError(at_line(line, context + ": unexpected token '" + tok[i] +
                                                   "' (expected guard or reset)"));
            }
            a.transitions.push_back(std::move(tr));
        } else {
            throw ParseError(at_line(line, "unknown directive '" + tok[0] +
                                               "' (expected alphabet, clocks, location or trans)"));
        }
    }
    validate_automaton(a);
    return a;
}

inline TimedAutomaton load_pattern(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pattern file '" + path + "'");
    try {
        return parse_pattern(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const NoAcceptedWord& e) {
        throw NoAcceptedWord(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline std::string print_pattern(const TimedAutomaton& a) {
    std::string out = "alphabet";
    for (char c : a.alphabet) (out += ' ') += c;
    out += '\n';
    if (!a.clocks.empty()) {
        out += "clocks";
        for (const std::string& c : a.clocks) (out += ' ') += c;
        out += '\n';
    }
    for (int s = 0; s < a.num_locations; ++s) {
        out += "location " + a.location_name(s);
        for (int i : a.initial)
            if (i == s) out += " initial";
        if (a.is_accepting(s)) out += " accepting";
        out += '\n';
    }
    for (const Transition& tr : a.transitions) {
        out += "trans " + a.location_name(tr.from) + ' ' + a.location_name(tr.to) + ' ';
        out += tr.label;
        if (!tr.guard.empty()) {
            out += " guard";
            bool first = true;
            for (const GuardAtom& atom : tr.guard) {
                if (!first) out += " &";
                first = false;
                out += ' ' + a.clocks[static_cast<std::size_t>(atom.clock)] + ' ' +
                       rel_op_text(atom.op) + ' ' + std::to_string(atom.bound);
            }
        }
        if (!tr.resets.empty()) {
            out += " reset";
            for (int c : tr.resets) out += ' ' + a.clocks[static_cast<std::size_t>(c)];
        }
        out += '\n';
    }
    return out;
}

/* ------------------------------------------------------------------- words */

/* One "label timestamp" line; blank and comment lines yield nullopt.
 * Monotonicity is the caller's concern (the streaming matcher checks its
 * own input; parse_word checks whole files). */
inline std::optional<Event> parse_event_line(const std::string& raw, int line = 0) {
    using io_detail::at_line;
    const std::string text = io_detail::strip_comment(raw);
    const std::vector<std::string> tok = io_detail::split_ws(text);
    if (tok.empty()) return std::nullopt;
    if (tok.size() != 2)
        throw ParseError(at_line(line, "expected 'label timestamp', got '" + text + "'"));
    if (tok[0].size() != 1)
        throw ParseError(at_line(line, "event label must be a single character, got '" + tok[0] + "'"));
    const char label = tok[0][0];
    if (label == kTerminal)
        throw ValidationError(at_line(line, "the terminal $ cannot appear in a word"));
    Time time;
    try {
        time = parse_time(tok[1]);
    } catch (const ParseError& e) {
        throw ParseError(at_line(line, e.what()));
    }
    return Event{label, time};
}

inline TimedWord parse_word(std::istream& in) {
    using io_detail::at_line;
    TimedWord w;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::optional<Event> e = parse_event_line(raw, line);
        if (!e) continue;
        if (e->time <= 0)
            throw ValidationError(at_line(line, "timestamps must be positive"));
        if (!w.empty() && e->time <= w.back().time)
            throw ValidationError(at_line(line, "timestamps must be strictly increasing"));
        w.push_back(*e);
    }
    return w;
}

inline TimedWord load_word(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open word file '" + path + "'");
    try {
        return parse_word(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline std::string print_word(const TimedWord& w) {
    std::string out;
    for (const Event& e : w) {
        out += e.label;
        out += ' ';
        out += format_time(e.time);
        out += '\n';
    }
    return out;
}

/* ----------------------------------------------------------- match output */

/* Inverse of format_match_set: one zone per line. */
inline MatchSet parse_match_output(std::istream& in) {
    using io_detail::at_line;
    MatchSet zones;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = io_detail::strip_comment(raw);
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
            text.pop_back();
        std::size_t start = 0;
        while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start])))
            ++start;
        text = text.substr(start);
        if (text.empty()) continue;
        try {
            zones.push_back(parse_match_zone(text));
        } catch (const ParseError& e) {
            throw ParseError(at_line(line, e.what()));
        }
    }
    return zones;
}

} // namespace tpm
