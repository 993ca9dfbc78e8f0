/* nfa.hpp -- FJS-type pattern matching where the pattern is an NFA
 *
 * The pattern language L(A) is overapproximated by its finite set L' of
 * length-m prefixes (m = length of a shortest accepted word), and the
 * partially matched input by the set of NFA states it reaches together with
 * the per-state prefix sets L'_s.  Two skip tables are derived from these:
 *
 *   Delta(a) = min{ n >= 1 | Sigma^n L' and Sigma^m a Sigma^* intersect },
 *   beta(s)  = min{ n >= 1 | Sigma^n L' and L'_s Sigma^* intersect },
 *
 * with Delta defaulting to m+1 for characters that occur in no L' word.
 * The matcher combines a tail test over L', Quick Search skips while the
 * tail mismatches, reachable-state-set trials, and a KMP skip maximised
 * over the states the trial got stuck at.
 *
 * State sets are held as 64-bit masks; automata are limited to 64 states.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpm/errors.hpp"

namespace tpm {

struct Nfa {
    struct Edge {
        int from;
        char label;
        int to;
    };

    std::vector<char> alphabet; // distinct symbols; edge labels must be listed
    int num_states = 0;
    std::vector<int> initial;
    std::vector<int> accepting;
    std::vector<Edge> edges;
};

using StateMask = std::uint64_t;

/* Prefix overapproximations of Def-style L', L'_s together with the
 * shortest-word lengths they are derived from.  `exploded` is set when
 * enumeration would exceed the word cap; skip tables then fall back to the
 * always-sound constant 1. */
struct PrefixSets {
    int m = 0;                            // length of a shortest accepted word
    std::map<int, int> m_s;               // shortest length reaching s (reachable s only)
    std::vector<std::string> lp;          // all length-m prefixes of L(A)
    std::map<int, std::vector<std::string>> lp_s; // length-min(m_s,m) prefixes reaching s
    bool exploded = false;
};

struct NfaSkipTables {
    int m = 0;
    std::map<char, int> delta; // [1, m+1]; absent symbols mean m+1
    std::map<int, int> beta;   // [1, m], keyed by reachable state
};

namespace detail {

inline StateMask bit(int s) { return StateMask{1} << s; }

inline std::vector<int> mask_states(StateMask mask) {
    std::vector<int> out;
    for (int s = 0; mask != 0; ++s, mask >>= 1)
        if (mask & 1) out.push_back(s);
    return out;
}

/* Per-symbol transition function: step[a][s] = mask of a-successors of s. */
struct NfaStepper {
    std::map<char, std::vector<StateMask>> step;
    StateMask initial_mask = 0;
    StateMask accepting_mask = 0;
    int num_states = 0;

    explicit NfaStepper(const Nfa& a) : num_states(a.num_states) {
        for (char c : a.alphabet)
            step[c].assign(static_cast<std::size_t>(a.num_states), 0);
        for (const auto& e : a.edges)
            step[e.label][static_cast<std::size_t>(e.from)] |= bit(e.to);
        for (int s : a.initial) initial_mask |= bit(s);
        for (int s : a.accepting) accepting_mask |= bit(s);
    }

    StateMask advance(StateMask from, char c) const {
        auto it = step.find(c);
        if (it == step.end()) return 0;
        StateMask out = 0;
        for (StateMask rest = from; rest != 0;) {
            int s = std::countr_zero(rest);
            rest &= rest - 1;
            out |= it->second[static_cast<std::size_t>(s)];
        }
        return out;
    }

    /* Mask of states that can reach `targets` in zero or more steps. */
    StateMask coreachable(StateMask targets, const Nfa& a) const {
        StateMask co = targets;
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& e : a.edges)
                if ((co & bit(e.to)) && !(co & bit(e.from))) {
                    co |= bit(e.from);
                    changed = true;
                }
        }
        return co;
    }
};

} // namespace detail

inline void validate_nfa(const Nfa& a) {
    if (a.num_states <= 0 || a.num_states > 64)
        throw ValidationError("NFA must have between 1 and 64 states");
    if (a.initial.empty())
        throw ValidationError("NFA has no initial state");
    auto in_range = [&](int s) { return s >= 0 && s < a.num_states; };
    for (int s : a.initial)
        if (!in_range(s)) throw ValidationError("initial state out of range");
    for (int s : a.accepting)
        if (!in_range(s)) throw ValidationError("accepting state out of range");
    std::set<char> sigma(a.alphabet.begin(), a.alphabet.end());
    for (const auto& e : a.edges) {
        if (!in_range(e.from) || !in_range(e.to))
            throw ValidationError("edge endpoint out of range");
        if (!sigma.count(e.label))
            throw ValidationError(std::string("edge label '") + e.label + "' not in alphabet");
    }
}

/* Breadth-first layering: m = shortest accepted length, m_s per reachable
 * state.  Throws NoAcceptedWord when no accepting state is reachable. */
inline std::pair<int, std::map<int, int>> shortest_lengths(const Nfa& a) {
    std::map<int, int> dist;
    std::vector<int> frontier = a.initial;
    for (int s : a.initial) dist.emplace(s, 0);
    detail::NfaStepper stepper(a);
    int depth = 0;
    while (!frontier.empty()) {
        ++depth;
        StateMask mask = 0;
        for (int s : frontier) mask |= detail::bit(s);
        std::vector<int> next;
        for (char c : a.alphabet)
            for (int t : detail::mask_states(stepper.advance(mask, c)))
                if (dist.emplace(t, depth).second) next.push_back(t);
        frontier = std::move(next);
    }
    int m = -1;
    for (int s : a.accepting) {
        auto it = dist.find(s);
        if (it != dist.end() && (m < 0 || it->second < m)) m = it->second;
    }
    if (m < 0) throw NoAcceptedWord("pattern NFA accepts no word");
    return {m, std::move(dist)};
}

/* Enumerate all length-`len` words u with a u-labelled path from `start`
 * ending in `alive` while staying inside `alive` (states outside `alive`
 * cannot contribute a continuation).  Returns false iff a level exceeds
 * `cap` words. */
namespace detail {
inline bool enumerate_prefixes(const Nfa& a, const NfaStepper& stepper,
                               StateMask start, StateMask alive, int len,
                               std::size_t cap, std::vector<std::string>& out) {
    std::map<std::string, StateMask> level{{std::string(), start & alive}};
    if (level.begin()->second == 0) level.clear();
    for (int k = 0; k < len; ++k) {
        std::map<std::string, StateMask> next;
        for (const auto& [word, mask] : level)
            for (char c : a.alphabet) {
                StateMask t = stepper.advance(mask, c) & alive;
                if (t != 0) next[word + c] |= t;
            }
        if (next.size() > cap) return false;
        level = std::move(next);
    }
    out.clear();
    out.reserve(level.size());
    for (const auto& [word, mask] : level) out.push_back(word);
    return true;
}
} // namespace detail

/* Exact enumeration of L' and every L'_s.  `cap` bounds the number of words
 * per enumeration level; beyond it the result is flagged `exploded` and the
 * prefix sets are left empty (callers fall back to unit skips). */
inline PrefixSets build_prefix_sets(const Nfa& a, std::size_t cap = 1'000'000) {
    PrefixSets ps;
    auto [m, m_s] = shortest_lengths(a);
    ps.m = m;
    ps.m_s = std::move(m_s);
    detail::NfaStepper stepper(a);
    StateMask acc = stepper.accepting_mask;
    if (!detail::enumerate_prefixes(a, stepper, stepper.initial_mask,
                                    stepper.coreachable(acc, a), m, cap, ps.lp)) {
        ps.exploded = true;
        return ps;
    }
    for (const auto& [s, ms] : ps.m_s) {
        int len = std::min(ms, m);
        std::vector<std::string> words;
        if (!detail::enumerate_prefixes(a, stepper, stepper.initial_mask,
                                        stepper.coreachable(detail::bit(s), a),
                                        len, cap, words)) {
            ps.exploded = true;
            ps.lp.clear();
            ps.lp_s.clear();
            return ps;
        }
        ps.lp_s.emplace(s, std::move(words));
    }
    return ps;
}

/* Delta(a) = smallest n in [1,m] such that some L' word carries `a` at
 * position m-n+1, else m+1.  Entries are emitted for the whole alphabet. */
inline std::map<char, int> build_nfa_delta(const PrefixSets& ps,
                                           const std::vector<char>& alphabet) {
    std::map<char, int> delta;
    for (char c : alphabet) delta[c] = ps.m + 1;
    if (ps.exploded) {
        for (auto& [c, v] : delta) v = 1;
        return delta;
    }
    for (const auto& u : ps.lp)
        for (int j = 1; j <= ps.m; ++j) { // n = m - j + 1
            int n = ps.m - j + 1;
            auto it = delta.find(u[static_cast<std::size_t>(j - 1)]);
            if (it != delta.end() && n < it->second) it->second = n;
        }
    return delta;
}

/* beta(s) = smallest n >= 1 such that some L'_s word, shifted right by n,
 * is consistent with some L' word: either n >= |x| (the windows no longer
 * overlap) or x(n+1..|x|) = u(1..|x|-n). */
inline std::map<int, int> build_nfa_beta(const PrefixSets& ps) {
    std::map<int, int> beta;
    if (ps.exploded) { // unit skips for every reachable state
        for (const auto& [s, ms] : ps.m_s) beta[s] = 1;
        return beta;
    }
    for (const auto& [s, words] : ps.lp_s) {
        int found = std::max(ps.m, 1);
        for (int n = 1; n < found; ++n) {
            bool ok = false;
            for (const auto& x : words) {
                if (static_cast<int>(x.size()) <= n) { ok = true; break; }
                for (const auto& u : ps.lp)
                    if (std::equal(x.begin() + n, x.end(), u.begin())) { ok = true; break; }
                if (ok) break;
            }
            if (ok) { found = n; break; }
        }
        beta[s] = found;
    }
    return beta;
}

inline NfaSkipTables build_nfa_skip_tables(const Nfa& a, const PrefixSets& ps) {
    NfaSkipTables t;
    t.m = ps.m;
    t.delta = build_nfa_delta(ps, a.alphabet);
    t.beta = build_nfa_beta(ps);
    return t;
}

/* All (i,j), 1-based inclusive, with w(i,j) accepted: per start position,
 * simulate reachable state sets and record every accepting step.  This is
 * the reference oracle for the FJS matcher. */
inline std::set<std::pair<int, int>> brute_force_nfa_match(std::string_view w, const Nfa& a) {
    validate_nfa(a);
    std::set<std::pair<int, int>> out;
    detail::NfaStepper stepper(a);
    const int len = static_cast<int>(w.size());
    for (int i = 1; i <= len; ++i) {
        StateMask mask = stepper.initial_mask;
        for (int j = i; j <= len; ++j) {
            mask = stepper.advance(mask, w[static_cast<std::size_t>(j - 1)]);
            if (mask == 0) break;
            if (mask & stepper.accepting_mask) out.emplace(i, j);
        }
    }
    return out;
}

struct NfaMatchOptions {
    bool force_unit_skips = false; // replace both skip tables by 1 (soundness check)
    std::size_t prefix_cap = 1'000'000;
    std::vector<int>* visited = nullptr; // head positions where comparisons happened
};

/* FJS-type matcher.  Equivalent to brute_force_nfa_match; skips positions
 * that provably cannot start or continue a match.  Patterns accepting the
 * empty word (m = 0) fall back to the brute-force scan: the FJS window
 * arithmetic needs a nonempty shortest word, and the match set -- which
 * ranges over nonempty substrings only -- is unaffected. */
inline std::set<std::pair<int, int>>
fjs_nfa_match(std::string_view w, const Nfa& a, const NfaMatchOptions& opts = {}) {
    validate_nfa(a);
    PrefixSets ps = build_prefix_sets(a, opts.prefix_cap);
    if (ps.m == 0 || ps.exploded) return brute_force_nfa_match(w, a);
    NfaSkipTables tables = build_nfa_skip_tables(a, ps);
    if (opts.force_unit_skips) {
        for (auto& [c, v] : tables.delta) v = 1;
        for (auto& [s, v] : tables.beta) v = 1;
    }

    std::set<char> lp_tails;
    for (const auto& u : ps.lp) lp_tails.insert(u.back());

    detail::NfaStepper stepper(a);
    std::set<std::pair<int, int>> out;
    const int len = static_cast<int>(w.size());
    const int m = ps.m;
    auto delta_of = [&](char c) {
        auto it = tables.delta.find(c);
        return it == tables.delta.end() ? m + 1 : it->second;
    };

    int n = 1;
    while (n <= len - m + 1) {
        if (opts.visited) opts.visited->push_back(n);
        /* Tail test against the last characters of L'. */
        while (!lp_tails.count(w[static_cast<std::size_t>(n + m - 2)])) {
            if (n + m > len) return out;
            n += delta_of(w[static_cast<std::size_t>(n + m - 1)]);
            if (n > len - m + 1) return out;
            if (opts.visited) opts.visited->push_back(n);
        }
        /* Trial: feed w(n,|w|) left to right until the reachable set dies. */
        StateMask mask = stepper.initial_mask;
        StateMask stuck = mask; // state set after the longest nonempty prefix
        for (int j = n; j <= len; ++j) {
            StateMask next = stepper.advance(mask, w[static_cast<std::size_t>(j - 1)]);
            if (next == 0) break;
            mask = stuck = next;
            if (mask & stepper.accepting_mask) out.emplace(n, j);
        }
        int skip = 1;
        for (int s : detail::mask_states(stuck)) {
            auto it = tables.beta.find(s);
            if (it != tables.beta.end()) skip = std::max(skip, it->second);
        }
        n += skip;
    }
    return out;
}

} // namespace tpm
