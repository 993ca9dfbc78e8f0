/* zone_graph.hpp -- finite zone automaton over a pattern timed automaton
 *
 * Forward exploration from (initial location, all-clocks-zero) with the
 * successor
 *
 *   canonicalize(extrapolate(reset(and_guard(elapse(zone), guard), resets), M))
 *
 * where M is the automaton's maximum guard constant.  Extrapolation bounds
 * the set of reachable zones, so exploration terminates.  States are merged
 * by (location, zone equality); optionally a new zone included in an
 * existing same-location zone is subsumed by it (sound for reachability,
 * smaller graphs).
 *
 * Inter-event delays are strictly positive in the concrete semantics, but
 * elapse here is non-strict: the resulting over-approximation can only
 * shrink skip values and is recovered exactly by the concrete matcher.
 *
 * The prefix structures mirror the word-based ones of the untimed matcher:
 * m counts events including the terminal $ (the shortest accepted word of
 * the running example has m = 4: a,a,a,$), Lp holds the length-(m-1)
 * edge-paths extendable to an accepting run, and Lp_s the
 * length-min(m_s, m-1) paths extendable to reach location s.
 */

#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tpm/dbm.hpp"
#include "tpm/errors.hpp"
#include "tpm/timed_automaton.hpp"

namespace tpm {

struct ZaNode {
    int location;
    Dbm zone; // nonempty, canonical, extrapolated
};

struct ZaEdge {
    int from;       // node id
    int transition; // index into TimedAutomaton::transitions
    int to;         // node id
    char label;
};

struct ZoneAutomaton {
    std::vector<ZaNode> nodes;
    std::vector<ZaEdge> edges;
    std::vector<int> initial;          // node ids
    std::vector<std::vector<int>> out; // per node: outgoing edge ids

    bool node_accepting(const TimedAutomaton& a, int node) const {
        return a.is_accepting(nodes[static_cast<std::size_t>(node)].location);
    }
};

struct ZoneBuildOptions {
    bool subsumption = true; // merge new zones included in an existing one
};

/* One zone-automaton step along a transition. */
inline Dbm za_successor(const Dbm& zone, const Transition& tr, Time max_const) {
    return canonicalize(extrapolate(reset(and_guard(elapse(zone), tr.guard), tr.resets), max_const));
}

inline ZoneAutomaton build_zone_automaton(const TimedAutomaton& a, ZoneBuildOptions opts = {}) {
    validate_automaton(a);
    const Time m_ns = max_constant(a) * kTick;
    const int n_clocks = static_cast<int>(a.clocks.size());

    ZoneAutomaton z;
    std::map<int, std::vector<int>> by_location; // location -> node ids

    auto find_or_add = [&](int location, const Dbm& zone) -> std::pair<int, bool> {
        for (int id : by_location[location]) {
            const Dbm& existing = z.nodes[static_cast<std::size_t>(id)].zone;
            if (existing == zone) return {id, false};
            if (opts.subsumption && includes(existing, zone)) return {id, false};
        }
        const int id = static_cast<int>(z.nodes.size());
        z.nodes.push_back({location, zone});
        z.out.emplace_back();
        by_location[location].push_back(id);
        return {id, true};
    };

    std::deque<int> queue;
    std::set<int> seeded;
    for (int s0 : a.initial) {
        if (!seeded.insert(s0).second) continue;
        auto [id, fresh] = find_or_add(s0, Dbm::zero(n_clocks));
        z.initial.push_back(id);
        if (fresh) queue.push_back(id);
    }

    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (std::size_t t = 0; t < a.transitions.size(); ++t) {
            const Transition& tr = a.transitions[t];
            if (tr.from != z.nodes[static_cast<std::size_t>(u)].location) continue;
            Dbm nz = za_successor(z.nodes[static_cast<std::size_t>(u)].zone, tr, m_ns);
            if (is_empty(nz)) continue;
            auto [v, fresh] = find_or_add(tr.to, nz);
            const int e = static_cast<int>(z.edges.size());
            z.edges.push_back({u, static_cast<int>(t), v, tr.label});
            z.out[static_cast<std::size_t>(u)].push_back(e);
            if (fresh) queue.push_back(v);
        }
    }
    return z;
}

/* Node sets L_0, L_1, ..., L_depth where L_k holds every node reachable by
 * some k-edge path from the initial nodes (not only shortest paths). */
inline std::vector<std::set<int>> za_layers(const ZoneAutomaton& z, int depth) {
    std::vector<std::set<int>> layers(static_cast<std::size_t>(depth) + 1);
    layers[0].insert(z.initial.begin(), z.initial.end());
    for (int k = 0; k < depth; ++k)
        for (int u : layers[static_cast<std::size_t>(k)])
            for (int e : z.out[static_cast<std::size_t>(u)])
                layers[static_cast<std::size_t>(k) + 1].insert(z.edges[static_cast<std::size_t>(e)].to);
    return layers;
}

/* Backward layers: R_0 = targets; R_k = nodes with an edge into R_{k-1},
 * i.e. nodes that can complete exactly k more steps into the target set. */
inline std::vector<std::set<int>> za_pre_layers(const ZoneAutomaton& z,
                                                const std::set<int>& targets, int depth) {
    std::vector<std::set<int>> layers(static_cast<std::size_t>(depth) + 1);
    layers[0] = targets;
    for (int k = 1; k <= depth; ++k)
        for (const ZaEdge& e : z.edges)
            if (layers[static_cast<std::size_t>(k) - 1].count(e.to))
                layers[static_cast<std::size_t>(k)].insert(e.from);
    return layers;
}

/* Nodes that can reach (in zero or more steps) a node at one of `locations`. */
inline std::set<int> za_can_reach(const ZoneAutomaton& z, const std::set<int>& locations) {
    std::set<int> out;
    for (std::size_t i = 0; i < z.nodes.size(); ++i)
        if (locations.count(z.nodes[i].location)) out.insert(static_cast<int>(i));
    bool changed = true;
    while (changed) {
        changed = false;
        for (const ZaEdge& e : z.edges)
            if (out.count(e.to) && !out.count(e.from)) {
                out.insert(e.from);
                changed = true;
            }
    }
    return out;
}

inline std::set<int> za_can_reach_accepting(const ZoneAutomaton& z, const TimedAutomaton& a) {
    return za_can_reach(z, std::set<int>(a.accepting.begin(), a.accepting.end()));
}

/* A concrete path through the zone automaton: a start node plus edge ids.
 * A zero-length path is just its start node. */
struct ZaPath {
    int start;
    std::vector<int> edges;

    int end(const ZoneAutomaton& z) const {
        return edges.empty() ? start : z.edges[static_cast<std::size_t>(edges.back())].to;
    }
    std::string labels(const ZoneAutomaton& z) const {
        std::string out;
        for (int e : edges) out += z.edges[static_cast<std::size_t>(e)].label;
        return out;
    }
    friend bool operator<(const ZaPath& x, const ZaPath& y) {
        return std::tie(x.start, x.edges) < std::tie(y.start, y.edges);
    }
    friend bool operator==(const ZaPath& x, const ZaPath& y) = default;
};

struct TimedPrefixSets {
    int m = 0;                  // shortest accepted event count, terminal included
    std::map<int, int> m_s;     // shortest event count reaching each reachable location
    std::vector<ZaPath> lp;     // length-(m-1) paths extendable to an accepting run
    std::map<int, std::vector<ZaPath>> lp_s; // per location: length-min(m_s,m-1) paths
    bool exploded = false;      // a path enumeration exceeded the cap
};

namespace detail {
/* Enumerate all paths of exactly `len` edges from the initial nodes whose
 * endpoint, with r edges still to take, lies in pre^r(targets) -- i.e.
 * paths extendable into `targets` exactly when the full window closes.
 * Returns false when more than `cap` paths would be materialized. */
inline bool enumerate_za_paths(const ZoneAutomaton& z, const std::set<int>& targets,
                               int len, std::size_t cap, std::vector<ZaPath>& out) {
    const auto pre = za_pre_layers(z, targets, len);
    out.clear();
    for (int s : z.initial)
        if (pre[static_cast<std::size_t>(len)].count(s)) out.push_back({s, {}});
    for (int k = 0; k < len; ++k) {
        std::vector<ZaPath> next;
        const auto& keep = pre[static_cast<std::size_t>(len - k - 1)];
        for (const ZaPath& p : out)
            for (int e : z.out[static_cast<std::size_t>(p.end(z))])
                if (keep.count(z.edges[static_cast<std::size_t>(e)].to)) {
                    ZaPath q = p;
                    q.edges.push_back(e);
                    next.push_back(std::move(q));
                    if (next.size() > cap) return false;
                }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return true;
}
} // namespace detail

/* Shortest event counts by BFS over the zone automaton (exact thanks to the
 * preservation property), then the prefix path sets.  A cap on materialized
 * paths guards preprocessing time; exceeding it flags `exploded`, upon which
 * skip tables fall back to the sound constant 1. */
inline TimedPrefixSets timed_prefix_sets(const ZoneAutomaton& z, const TimedAutomaton& a,
                                         std::size_t cap = 1'000'000) {
    TimedPrefixSets tps;

    /* m_s by node-level BFS, minimized per location. */
    std::vector<int> node_dist(z.nodes.size(), -1);
    std::deque<int> queue;
    for (int s : z.initial) {
        node_dist[static_cast<std::size_t>(s)] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int e : z.out[static_cast<std::size_t>(u)]) {
            const int v = z.edges[static_cast<std::size_t>(e)].to;
            if (node_dist[static_cast<std::size_t>(v)] < 0) {
                node_dist[static_cast<std::size_t>(v)] = node_dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    for (std::size_t i = 0; i < z.nodes.size(); ++i) {
        if (node_dist[i] < 0) continue;
        auto [it, fresh] = tps.m_s.emplace(z.nodes[i].location, node_dist[i]);
        if (!fresh && node_dist[i] < it->second) it->second = node_dist[i];
    }

    int m = -1;
    for (int f : a.accepting) {
        auto it = tps.m_s.find(f);
        if (it != tps.m_s.end() && (m < 0 || it->second < m)) m = it->second;
    }
    if (m < 0) throw NoAcceptedWord("pattern accepts no timed word");
    tps.m = m;

    if (!detail::enumerate_za_paths(z, za_can_reach_accepting(z, a), m - 1, cap, tps.lp)) {
        tps.exploded = true;
        tps.lp.clear();
        return tps;
    }
    for (const auto& [loc, ms] : tps.m_s) {
        std::vector<ZaPath> paths;
        if (!detail::enumerate_za_paths(z, za_can_reach(z, {loc}), std::min(ms, m - 1), cap,
                                        paths)) {
            tps.exploded = true;
            tps.lp.clear();
            tps.lp_s.clear();
            return tps;
        }
        tps.lp_s.emplace(loc, std::move(paths));
    }
    return tps;
}

/* Text dump (locations, zone inequalities, edges) for debugging. */
inline std::string dump_zone_automaton(const ZoneAutomaton& z, const TimedAutomaton& a) {
    std::string out;
    for (std::size_t i = 0; i < z.nodes.size(); ++i) {
        out += "state " + std::to_string(i) + ": " + a.location_name(z.nodes[i].location);
        out += " [" + dbm_to_string(z.nodes[i].zone, a.clocks) + "]";
        for (int s : z.initial)
            if (s == static_cast<int>(i)) out += " (initial)";
        if (z.node_accepting(a, static_cast<int>(i))) out += " (accepting)";
        out += "\n";
    }
    for (const ZaEdge& e : z.edges) {
        out += "edge " + std::to_string(e.from) + " -" + std::string(1, e.label) + "-> " +
               std::to_string(e.to) + "\n";
    }
    return out;
}

} // namespace tpm
