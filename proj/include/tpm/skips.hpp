/* skips.hpp -- skip-value tables for the timed matcher
 *
 * Both tables are read off the zone automaton's window paths (see
 * zone_graph.hpp): the pattern window is the first m-1 events of an
 * accepted word, everything before the closing terminal.
 *
 *   delta(a) = least n in [1, m-1] such that some window path carries label
 *              a on its (m-n)-th edge, else m.  After a tail mismatch the
 *              matcher may advance by delta of the next unread letter.
 *
 *   beta(s)  = least shift n >= 1 such that some timed word simultaneously
 *              parses as (n free events) . (window of the pattern) and as
 *              (window extendable to reach location s) . (anything).  After
 *              a trial that died with location s live, the matcher may
 *              advance by beta(s).
 *
 * beta is decided by a synchronized-product search: copy 1 runs the
 * pattern from the word start (it must complete a reach-s window of
 * ell_s = min(m_s, m-1) events), copy 2 runs the pattern with all clocks
 * reset at event n (it must complete the m-1-event accepting window).  The
 * two copies share event times, so a joint zone over disjoint clock copies
 * decides whether the overlap is realizable.  Zone-level reasoning
 * over-approximates realizability, which can only shrink beta: smaller
 * skips are always sound.
 *
 * At n = ell_s the overlap is empty and both windows can be realized
 * independently, so the search only needs shifts n < ell_s and
 * beta(s) <= max(ell_s, 1) always holds.
 */

#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "tpm/dbm.hpp"
#include "tpm/timed_automaton.hpp"
#include "tpm/zone_graph.hpp"

namespace tpm {

struct TimedSkipTables {
    int m = 0;
    std::map<char, int> delta; // per alphabet letter, in [1, m]
    std::map<int, int> beta;   // per location, in [1, max(ell_s, 1)]
    std::set<char> tail_labels; // labels closing some window path
    bool tail_enabled = false;  // false for m = 1 or fallback tables
    bool fallback = false;      // unit tables after a prefix-set explosion
};

inline std::map<char, int> compute_delta(const ZoneAutomaton& z, const TimedPrefixSets& tps,
                                         const std::vector<char>& alphabet) {
    std::map<char, int> d;
    if (tps.exploded) {
        for (char a : alphabet) d[a] = 1;
        return d;
    }
    for (char a : alphabet) d[a] = tps.m;
    for (const ZaPath& p : tps.lp) {
        const std::string labels = p.labels(z);
        for (std::size_t j = 1; j <= labels.size(); ++j) {
            const int n = tps.m - static_cast<int>(j);
            auto it = d.find(labels[j - 1]);
            if (it != d.end() && n < it->second) it->second = n;
        }
    }
    return d;
}

/* A joint state of the two-copy search: zone-automaton nodes of both
 * copies plus the joint zone over the doubled clock set. */
struct ProductState {
    int first;
    int second;
    Dbm zone;
};

/* Memo of joint successor computations, shared across beta queries for one
 * pattern.  Insert-only; concurrent readers, exclusive insertion. */
class ProductExplorationCache {
public:
    using Key = std::tuple<int, int, std::vector<DbmRaw>>;

    const std::vector<ProductState>* find(const Key& key) const {
        std::shared_lock lock(mutex_);
        auto it = memo_.find(key);
        return it == memo_.end() ? nullptr : &it->second;
    }
    void insert(Key key, std::vector<ProductState> value) {
        std::unique_lock lock(mutex_);
        memo_.emplace(std::move(key), std::move(value));
    }
    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return memo_.size();
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<Key, std::vector<ProductState>> memo_;
};

namespace detail {

/* Extend a one-copy zone with a second clock copy, all fresh clocks just
 * reset (copy 2 starts its run at the current event). */
inline Dbm embed_with_reset_copy(const Dbm& zone, int n_clocks) {
    Dbm joint = Dbm::universal(2 * n_clocks);
    for (int i = 0; i <= n_clocks; ++i)
        for (int j = 0; j <= n_clocks; ++j)
            if (i != j) joint.set(i, j, zone.at(i, j));
    joint = canonicalize(std::move(joint));
    std::vector<int> fresh(static_cast<std::size_t>(n_clocks));
    std::iota(fresh.begin(), fresh.end(), n_clocks);
    return reset(std::move(joint), fresh);
}

/* All label-synchronized joint steps from (q1, q2, zone). */
inline std::vector<ProductState> joint_successors(const TimedAutomaton& a,
                                                  const ZoneAutomaton& z, int n_clocks,
                                                  Time max_const, int q1, int q2,
                                                  const Dbm& zone) {
    std::vector<ProductState> out;
    for (int e1 : z.out[static_cast<std::size_t>(q1)]) {
        const ZaEdge& ze1 = z.edges[static_cast<std::size_t>(e1)];
        if (ze1.label == kTerminal) continue;
        for (int e2 : z.out[static_cast<std::size_t>(q2)]) {
            const ZaEdge& ze2 = z.edges[static_cast<std::size_t>(e2)];
            if (ze2.label != ze1.label) continue;
            const Transition& t1 = a.transitions[static_cast<std::size_t>(ze1.transition)];
            const Transition& t2 = a.transitions[static_cast<std::size_t>(ze2.transition)];
            Guard guard = t1.guard;
            for (GuardAtom atom : t2.guard) {
                atom.clock += n_clocks;
                guard.push_back(atom);
            }
            Dbm next = and_guard(elapse(zone), guard);
            if (is_empty(next)) continue;
            std::vector<int> resets = t1.resets;
            for (int c : t2.resets) resets.push_back(c + n_clocks);
            next = canonicalize(extrapolate(reset(std::move(next), resets), max_const));
            if (is_empty(next)) continue;
            out.push_back({ze1.to, ze2.to, std::move(next)});
        }
    }
    return out;
}

inline const std::vector<ProductState>& cached_joint_successors(
    const TimedAutomaton& a, const ZoneAutomaton& z, int n_clocks, Time max_const,
    const ProductState& state, ProductExplorationCache* cache,
    std::vector<ProductState>& scratch) {
    if (!cache) {
        scratch = joint_successors(a, z, n_clocks, max_const, state.first, state.second,
                                   state.zone);
        return scratch;
    }
    ProductExplorationCache::Key key{state.first, state.second, state.zone.raw()};
    if (const auto* hit = cache->find(key)) return *hit;
    cache->insert(key, joint_successors(a, z, n_clocks, max_const, state.first, state.second,
                                        state.zone));
    return *cache->find(key);
}

} // namespace detail

struct BetaOptions {
    std::size_t budget = 100'000;            // joint states per (s, n) query
    ProductExplorationCache* cache = nullptr; // optional memo, one per pattern
};

/* Is the shifted-window overlap realizable at shift n (1 <= n < ell_s)?
 * Sets *overflow instead of an answer when the state budget runs out. */
inline bool shifted_overlap_nonempty(const TimedAutomaton& a, const ZoneAutomaton& z,
                                     const TimedPrefixSets& tps, int s, int n,
                                     const std::vector<std::set<int>>& layers,
                                     const std::vector<std::set<int>>& to_target,
                                     const std::vector<std::set<int>>& to_accepting,
                                     const BetaOptions& opts, bool* overflow) {
    const int n_clocks = static_cast<int>(a.clocks.size());
    const Time max_ns = max_constant(a) * kTick;
    const int ell = std::min(tps.m_s.at(s), tps.m - 1);
    *overflow = false;

    std::vector<ProductState> frontier;
    std::set<std::tuple<int, int, std::vector<DbmRaw>>> seen;
    std::size_t explored = 0;

    auto push = [&](ProductState st, int r1, int r2) {
        if (!to_target[static_cast<std::size_t>(r1)].count(st.first)) return true;
        if (!to_accepting[static_cast<std::size_t>(r2)].count(st.second)) return true;
        auto key = std::make_tuple(st.first, st.second, st.zone.raw());
        if (!seen.insert(std::move(key)).second) return true;
        if (++explored > opts.budget) return false;
        frontier.push_back(std::move(st));
        return true;
    };

    /* Seed at event n: copy 1 anywhere at path depth n, copy 2 just reset. */
    for (int q1 : layers[static_cast<std::size_t>(n)])
        for (int q2 : z.initial) {
            ProductState st{q1, q2,
                            detail::embed_with_reset_copy(
                                z.nodes[static_cast<std::size_t>(q1)].zone, n_clocks)};
            if (!push(std::move(st), ell - n, tps.m - 1)) {
                *overflow = true;
                return false;
            }
        }

    std::vector<ProductState> scratch;
    for (int k = n + 1; k <= ell; ++k) {
        std::vector<ProductState> current;
        current.swap(frontier);
        seen.clear();
        const int r1 = ell - k;
        const int r2 = tps.m - 1 - (k - n);
        for (const ProductState& st : current) {
            const auto& succs = detail::cached_joint_successors(a, z, n_clocks, max_ns, st,
                                                                opts.cache, scratch);
            for (const ProductState& next : succs)
                if (!push(next, r1, r2)) {
                    *overflow = true;
                    return false;
                }
        }
        if (frontier.empty()) return false;
    }
    return !frontier.empty();
}

/* beta for every location; unreachable locations and fallback default to 1. */
inline std::map<int, int> compute_beta(const TimedAutomaton& a, const ZoneAutomaton& z,
                                       const TimedPrefixSets& tps, BetaOptions opts = {}) {
    std::map<int, int> beta;
    for (int s = 0; s < a.num_locations; ++s) beta[s] = 1;
    if (tps.exploded) return beta;

    const auto to_accepting = za_pre_layers(z, za_can_reach_accepting(z, a), tps.m - 1);
    const auto layers = za_layers(z, std::max(tps.m - 2, 0));

    for (const auto& [s, m_s] : tps.m_s) {
        const int ell = std::min(m_s, tps.m - 1);
        int value = std::max(ell, 1);
        if (ell >= 2) {
            const auto to_target = za_pre_layers(z, za_can_reach(z, {s}), ell);
            for (int n = 1; n < ell; ++n) {
                bool overflow = false;
                const bool nonempty = shifted_overlap_nonempty(a, z, tps, s, n, layers,
                                                               to_target, to_accepting, opts,
                                                               &overflow);
                if (overflow) {
                    value = 1;
                    break;
                }
                if (nonempty) {
                    value = n;
                    break;
                }
            }
        }
        beta[s] = value;
    }
    return beta;
}

inline TimedSkipTables build_skip_tables(const TimedAutomaton& a, const ZoneAutomaton& z,
                                         const TimedPrefixSets& tps, BetaOptions opts = {}) {
    TimedSkipTables t;
    t.m = tps.m;
    t.fallback = tps.exploded;
    t.delta = compute_delta(z, tps, a.alphabet);
    t.beta = compute_beta(a, z, tps, opts);
    if (!t.fallback)
        for (const ZaPath& p : tps.lp)
            if (!p.edges.empty())
                t.tail_labels.insert(z.edges[static_cast<std::size_t>(p.edges.back())].label);
    t.tail_enabled = !t.fallback && t.m >= 2;
    return t;
}

struct PrecomputeOptions {
    bool subsumption = true;
    std::size_t path_cap = 1'000'000;
    std::size_t beta_budget = 100'000;
    bool use_cache = true;
};

struct Precomputed {
    ZoneAutomaton za;
    TimedPrefixSets prefixes;
    TimedSkipTables tables;
    double seconds = 0; // wall-clock preprocessing time
};

inline Precomputed precompute(const TimedAutomaton& a, PrecomputeOptions opts = {}) {
    const auto started = std::chrono::steady_clock::now();
    Precomputed p;
    p.za = build_zone_automaton(a, {.subsumption = opts.subsumption});
    p.prefixes = timed_prefix_sets(p.za, a, opts.path_cap);
    ProductExplorationCache cache;
    BetaOptions beta_opts{opts.beta_budget, opts.use_cache ? &cache : nullptr};
    p.tables = build_skip_tables(a, p.za, p.prefixes, beta_opts);
    p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return p;
}

inline std::string dump_skip_tables(const TimedSkipTables& t, const TimedAutomaton& a) {
    std::string out = "m: " + std::to_string(t.m) + "\n";
    for (const auto& [ch, v] : t.delta)
        out += "delta " + std::string(1, ch) + ": " + std::to_string(v) + "\n";
    for (const auto& [s, v] : t.beta)
        out += "beta " + a.location_name(s) + ": " + std::to_string(v) + "\n";
    if (t.fallback) out += "fallback: unit skips\n";
    return out;
}

} // namespace tpm
