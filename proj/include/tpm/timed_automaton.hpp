/* timed_automaton.hpp -- pattern timed automata and exact acceptance
 *
 * A pattern automaton reads events over Sigma followed by the terminal $.
 * Three structural conditions are enforced at validation time: every
 * transition into an accepting location is labelled $, no other transition
 * is labelled $, and no transition leaves an accepting location.
 *
 * Guard constants are nonnegative integers (seconds); comparisons happen in
 * nanosecond fixed point, so they are exact.
 */

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "tpm/errors.hpp"
#include "tpm/time.hpp"
#include "tpm/timed_word.hpp"

namespace tpm {

enum class RelOp { Lt, Le, Gt, Ge };

inline const char* rel_op_text(RelOp op) {
    switch (op) {
        case RelOp::Lt: return "<";
        case RelOp::Le: return "<=";
        case RelOp::Gt: return ">";
        case RelOp::Ge: return ">=";
    }
    return "?";
}

/* One conjunct x ⋈ c.  The constant is an integer number of seconds. */
struct GuardAtom {
    int clock;
    RelOp op;
    std::int64_t bound; // integer seconds, >= 0

    Time bound_time() const { return bound * kTick; }

    bool satisfied_by(Time value) const {
        switch (op) {
            case RelOp::Lt: return value < bound_time();
            case RelOp::Le: return value <= bound_time();
            case RelOp::Gt: return value > bound_time();
            case RelOp::Ge: return value >= bound_time();
        }
        return false;
    }
};

/* Conjunction of atoms; empty means true. */
using Guard = std::vector<GuardAtom>;

struct Transition {
    int from;
    int to;
    char label; // in Sigma, or kTerminal
    Guard guard;
    std::vector<int> resets; // clock ids set to 0
};

struct TimedAutomaton {
    std::vector<char> alphabet; // Sigma, excluding the terminal
    std::vector<std::string> clocks;
    int num_locations = 0;
    std::vector<int> initial;
    std::vector<int> accepting;
    std::vector<Transition> transitions;
    std::vector<std::string> location_names; // optional; defaults to s0,s1,...

    bool is_accepting(int loc) const {
        return std::find(accepting.begin(), accepting.end(), loc) != accepting.end();
    }

    std::string location_name(int loc) const {
        if (loc >= 0 && loc < static_cast<int>(location_names.size()) &&
            !location_names[static_cast<std::size_t>(loc)].empty())
            return location_names[static_cast<std::size_t>(loc)];
        return "s" + std::to_string(loc);
    }
};

/* Largest guard constant (integer seconds); 0 when there are no atoms. */
inline std::int64_t max_constant(const TimedAutomaton& a) {
    std::int64_t m = 0;
    for (const auto& tr : a.transitions)
        for (const auto& atom : tr.guard) m = std::max(m, atom.bound);
    return m;
}

inline void validate_automaton(const TimedAutomaton& a) {
    if (a.num_locations <= 0) throw ValidationError("automaton has no locations");
    if (a.initial.empty()) throw ValidationError("automaton has no initial location");
    auto in_range = [&](int s) { return s >= 0 && s < a.num_locations; };
    for (int s : a.initial)
        if (!in_range(s)) throw ValidationError("initial location out of range");
    for (int s : a.accepting)
        if (!in_range(s)) throw ValidationError("accepting location out of range");
    std::set<char> sigma(a.alphabet.begin(), a.alphabet.end());
    if (sigma.count(kTerminal))
        throw ValidationError("the terminal character $ cannot be part of the alphabet");
    for (const auto& tr : a.transitions) {
        if (!in_range(tr.from) || !in_range(tr.to))
            throw ValidationError("transition endpoint out of range");
        if (tr.label != kTerminal && !sigma.count(tr.label))
            throw ValidationError(std::string("transition label '") + tr.label +
                                  "' not in alphabet");
        const bool into_accepting = a.is_accepting(tr.to);
        if (into_accepting && tr.label != kTerminal)
            throw ValidationError("transition into accepting location " +
                                  a.location_name(tr.to) + " must be labelled $");
        if (!into_accepting && tr.label == kTerminal)
            throw ValidationError("$-labelled transition must enter an accepting location");
        if (a.is_accepting(tr.from))
            throw ValidationError("no transition may leave accepting location " +
                                  a.location_name(tr.from));
        for (const auto& atom : tr.guard) {
            if (atom.clock < 0 || atom.clock >= static_cast<int>(a.clocks.size()))
                throw ValidationError("guard references unknown clock");
            if (atom.bound < 0) throw ValidationError("guard constant must be nonnegative");
        }
        for (int c : tr.resets)
            if (c < 0 || c >= static_cast<int>(a.clocks.size()))
                throw ValidationError("reset references unknown clock");
    }
}

/* Exact acceptance of a concrete timed word (normally a segment ending in $)
 * by forward simulation over sets of (location, last-reset times).  A clock's
 * value at absolute time tau is tau - reset_time, with every clock starting
 * at reset time 0. */
inline bool accepts(const TimedAutomaton& a, const TimedWord& u) {
    using Config = std::pair<int, std::vector<Time>>;
    std::set<Config> configs;
    const std::vector<Time> zeros(a.clocks.size(), 0);
    for (int s : a.initial) configs.insert({s, zeros});

    for (const Event& e : u) {
        std::set<Config> next;
        for (const auto& [loc, resets] : configs) {
            for (const auto& tr : a.transitions) {
                if (tr.from != loc || tr.label != e.label) continue;
                bool ok = true;
                for (const auto& atom : tr.guard)
                    if (!atom.satisfied_by(e.time - resets[static_cast<std::size_t>(atom.clock)])) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                std::vector<Time> r = resets;
                for (int c : tr.resets) r[static_cast<std::size_t>(c)] = e.time;
                next.insert({tr.to, std::move(r)});
            }
        }
        configs = std::move(next);
        if (configs.empty()) return false;
    }
    for (const auto& [loc, resets] : configs)
        if (a.is_accepting(loc)) return true;
    return false;
}

} // namespace tpm
