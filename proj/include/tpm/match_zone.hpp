/* match_zone.hpp -- two-variable zones over match intervals (t, t')
 *
 * A match zone is a three-row DBM whose variables are the endpoints of a
 * matching interval: row 1 is t, row 2 is t'.  A match set is a finite union
 * of such zones.  This header provides the constraint solver that turns one
 * matching-trial step into a zone, plus the set algebra the engines and the
 * tests need: subtraction, union equality, point membership, normalization,
 * and the textual form `t:[lo,hi) t':(lo,hi] dt:(lo,hi)`.
 */

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tpm/dbm.hpp"
#include "tpm/errors.hpp"
#include "tpm/time.hpp"
#include "tpm/timed_automaton.hpp"

namespace tpm {

inline constexpr int kMatchT = 1;      // DBM row of the interval start t
inline constexpr int kMatchTPrime = 2; // DBM row of the interval end t'

/* Sentinel in a reset record for "this clock was never reset"; real reset
 * times are event timestamps and therefore strictly positive. */
inline constexpr Time kClockUnset = -1;

using MatchSet = std::vector<Dbm>;

/* Zone over t alone (one-clock DBM): lo <= t, and t < hi when hi is given. */
inline Dbm t_interval(Time lo, std::optional<Time> hi) {
    Dbm d = Dbm::universal(1);
    d = constrain(std::move(d), 0, 1, make_raw(-lo, false));
    if (hi) d = constrain(std::move(d), 1, 0, make_raw(*hi, true));
    return d;
}

/* The zone of interval endpoints compatible with one way of finishing a
 * matching trial:
 *
 *   { (t,t') | t in t_zone,  lo_prime < t',  t' <= hi_prime,  t < t',
 *              every atom x ⋈ c of delta holds for the value of x at t' }
 *
 * where the value of clock x at t' is t' - rho[x] if x was reset during the
 * trial and t' - t if it still carries its initial reset at the interval
 * start.  An absent hi_prime leaves t' unbounded above. */
inline Dbm sol_constr(const Dbm& t_zone, Time lo_prime, std::optional<Time> hi_prime,
                      const std::vector<Time>& rho, const Guard& delta) {
    Dbm tz = canonicalize(t_zone);
    Dbm z = Dbm::universal(2);
    if (tz.marked_empty())
        return canonicalize(constrain(std::move(z), kMatchT, kMatchT, make_raw(-1, false)));
    z = constrain(std::move(z), 0, kMatchT, tz.at(0, 1));
    z = constrain(std::move(z), kMatchT, 0, tz.at(1, 0));
    z = constrain(std::move(z), 0, kMatchTPrime, make_raw(-lo_prime, true));
    if (hi_prime) z = constrain(std::move(z), kMatchTPrime, 0, make_raw(*hi_prime, false));
    z = constrain(std::move(z), kMatchT, kMatchTPrime, make_raw(0, true));
    for (const GuardAtom& atom : delta) {
        if (z.marked_empty()) break;
        const Time c = atom.bound_time();
        const Time r = rho[static_cast<std::size_t>(atom.clock)];
        const int against = r >= 0 ? 0 : kMatchT; // t' - r  versus  t' - t
        const Time shift = r >= 0 ? r : 0;
        switch (atom.op) {
            case RelOp::Lt:
                z = constrain(std::move(z), kMatchTPrime, against, make_raw(c + shift, true));
                break;
            case RelOp::Le:
                z = constrain(std::move(z), kMatchTPrime, against, make_raw(c + shift, false));
                break;
            case RelOp::Gt:
                z = constrain(std::move(z), against, kMatchTPrime, make_raw(-(c + shift), true));
                break;
            case RelOp::Ge:
                z = constrain(std::move(z), against, kMatchTPrime, make_raw(-(c + shift), false));
                break;
        }
    }
    return canonicalize(std::move(z));
}

namespace detail {

/* Negative two-cycle test: a(i,j) + b(j,i) < (0,<=) for some i,j proves the
 * intersection empty.  Sound but not complete (emptiness witnessed only by
 * longer cycles goes undetected, which merely wastes one subtraction), and
 * only meaningful on canonical matrices -- anything else reports "may
 * intersect". */
inline bool surely_disjoint(const Dbm& a, const Dbm& b) {
    if (!a.is_canonical() || !b.is_canonical()) return false;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (raw_add(a.at(i, j), b.at(j, i)) < kRawZeroWeak) return true;
    return false;
}

/* A strictly positive gap between the zones along some difference direction.
 * The convex hull of such a pair contains gap points belonging to neither
 * zone, so hull-merging cannot be exact and the pair can be skipped.  Zones
 * that merely touch (raw sum zero, e.g. t < 1 next to t >= 1) are not
 * separated: their union may well be convex. */
inline bool strictly_separated(const Dbm& a, const Dbm& b) {
    if (!a.is_canonical() || !b.is_canonical()) return false;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (raw_add(a.at(i, j), b.at(j, i)) < 0) return true;
    return false;
}

} // namespace detail

/* Zones covering d minus sub, pairwise disjoint.  Splits d along each finite
 * constraint of sub: the part of d violating that constraint while satisfying
 * every previously processed one. */
inline std::vector<Dbm> subtract(const Dbm& d, const Dbm& sub) {
    std::vector<Dbm> out;
    Dbm rest = canonicalize(d);
    if (rest.marked_empty()) return out;
    const Dbm b = canonicalize(sub);
    if (b.marked_empty()) {
        out.push_back(std::move(rest));
        return out;
    }
    for (int i = 0; i < b.dim() && !rest.marked_empty(); ++i)
        for (int j = 0; j < b.dim(); ++j) {
            if (i == j) continue;
            const DbmRaw raw = b.at(i, j);
            if (raw == kDbmInf) continue;
            /* Negating x_i - x_j ≼ (c, strict?) gives x_j - x_i ≺ (-c, !strict). */
            const Bound nb = raw_bound(raw);
            Dbm piece = constrain(rest, j, i, make_raw(-nb.value, !nb.strict));
            if (!piece.marked_empty()) out.push_back(std::move(piece));
            rest = constrain(std::move(rest), i, j, raw);
            if (rest.marked_empty()) break;
        }
    return out;
}

/* Is every point of a inside the union of bs? */
inline bool covered_by(const Dbm& a, const MatchSet& bs) {
    std::vector<Dbm> pieces;
    {
        Dbm c = canonicalize(a);
        if (c.marked_empty()) return true;
        pieces.push_back(std::move(c));
    }
    for (const Dbm& b : bs) {
        if (b.marked_empty()) continue;
        std::vector<Dbm> next;
        for (Dbm& p : pieces) {
            if (detail::surely_disjoint(p, b)) {
                next.push_back(std::move(p)); // b cannot remove anything from p
                continue;
            }
            std::vector<Dbm> rem = subtract(p, b);
            next.insert(next.end(), std::make_move_iterator(rem.begin()),
                        std::make_move_iterator(rem.end()));
        }
        pieces = std::move(next);
        if (pieces.empty()) return true;
    }
    return pieces.empty();
}

inline bool match_set_covered(const MatchSet& as, const MatchSet& bs) {
    /* A zone whose exact matrix appears on the other side is covered by that
     * member alone; only the rest needs the subtraction machinery.  Matrix
     * identity implies point-set identity whether or not the inputs are
     * canonical, but zones merely *marked* empty can carry a stale matrix, so
     * they never enter the index. */
    std::vector<std::vector<DbmRaw>> present;
    present.reserve(bs.size());
    for (const Dbm& b : bs)
        if (!b.marked_empty()) present.push_back(b.raw());
    std::sort(present.begin(), present.end());
    for (const Dbm& a : as) {
        if (a.marked_empty()) continue;
        if (std::binary_search(present.begin(), present.end(), a.raw())) continue;
        if (!covered_by(a, bs)) return false;
    }
    return true;
}

/* Do the two unions contain exactly the same intervals? */
inline bool match_sets_equal(const MatchSet& as, const MatchSet& bs) {
    return match_set_covered(as, bs) && match_set_covered(bs, as);
}

/* Is the concrete interval (t,t') in the union? */
inline bool match_set_contains(const MatchSet& zones, Time t, Time t_prime) {
    const std::vector<Time> v{t, t_prime};
    return std::any_of(zones.begin(), zones.end(),
                       [&](const Dbm& z) { return contains(z, v); });
}

/* Smallest zone containing both arguments: the pointwise weakest bounds.
 * Both inputs must be canonical and nonempty; the result is closed. */
inline Dbm convex_hull(const Dbm& a, const Dbm& b) {
    Dbm h(a.num_clocks());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) h.set(i, j, std::max(a.at(i, j), b.at(i, j)));
    return canonicalize(std::move(h));
}

/* Canonical-ish form of a union: canonicalize members, drop empty ones, drop
 * members included in another, replace pairs by their convex hull whenever
 * that adds no points, and sort.  The result is independent of input order;
 * distinct representations of the same union may still normalize differently
 * (zone unions have no unique minimal form), so semantic comparisons go
 * through match_sets_equal. */
inline MatchSet normalize(MatchSet zones) {
    MatchSet out;
    for (Dbm& z : zones) {
        Dbm c = canonicalize(std::move(z));
        if (!c.marked_empty()) out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const Dbm& a, const Dbm& b) { return a.raw() < b.raw(); });
    out.erase(std::unique(out.begin(), out.end()), out.end());

    /* Absorption and hull-merging are pairwise-quadratic compaction passes.
     * Beyond this size they are skipped: the sorted, deduplicated canonical
     * members already represent the union faithfully, just less compactly. */
    constexpr std::size_t kPairwiseCap = 4096;
    if (out.size() > kPairwiseCap) return out;

    /* Members are canonical and nonempty here, so inclusion is the raw
     * entrywise comparison. */
    const auto engulfs = [](const Dbm& big, const Dbm& small) {
        const std::vector<DbmRaw>& b = big.raw();
        const std::vector<DbmRaw>& s = small.raw();
        for (std::size_t k = 0; k < b.size(); ++k)
            if (s[k] > b[k]) return false;
        return true;
    };
    const auto absorb = [&engulfs](MatchSet& zs) {
        MatchSet kept;
        for (std::size_t i = 0; i < zs.size(); ++i) {
            bool redundant = false;
            /* Sorted + deduped, so inclusion by any other member is strict. */
            for (std::size_t j = 0; j < zs.size() && !redundant; ++j)
                redundant = i != j && engulfs(zs[j], zs[i]);
            if (!redundant) kept.push_back(zs[i]);
        }
        zs = std::move(kept);
    };

    absorb(out);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = i + 1; j < out.size();) {
                if (detail::strictly_separated(out[i], out[j])) {
                    ++j;
                    continue;
                }
                Dbm h = convex_hull(out[i], out[j]);
                if (covered_by(h, MatchSet{out[i], out[j]})) {
                    out[i] = std::move(h);
                    out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
                    j = i + 1; // the merged zone may now absorb earlier rejects
                    changed = true;
                } else {
                    ++j;
                }
            }
        if (changed) absorb(out);
    }
    std::sort(out.begin(), out.end(),
              [](const Dbm& a, const Dbm& b) { return a.raw() < b.raw(); });
    return out;
}

namespace detail {

/* One interval "lo,hi" with brackets encoding strictness, "inf" for no upper
 * bound.  lower/upper are the raw entries bounding v (0 - v and v - 0) or a
 * difference (u - v and v - u). */
inline std::string format_interval(DbmRaw lower, DbmRaw upper) {
    const Bound lo = raw_bound(lower);
    std::string s;
    s += lo.strict ? '(' : '[';
    s += format_time(-lo.value);
    s += ',';
    if (upper == kDbmInf) {
        s += "inf)";
    } else {
        const Bound hi = raw_bound(upper);
        s += format_time(hi.value);
        s += hi.strict ? ')' : ']';
    }
    return s;
}

} // namespace detail

/* Textual form of a canonical nonempty match zone:
 * "t:[3.7,3.9) t':(6,inf) dt:(2.1,inf)". */
inline std::string format_match_zone(const Dbm& zone) {
    Dbm z = canonicalize(zone);
    if (z.marked_empty()) return "empty";
    std::string s = "t:" + detail::format_interval(z.at(0, kMatchT), z.at(kMatchT, 0));
    s += " t':" + detail::format_interval(z.at(0, kMatchTPrime), z.at(kMatchTPrime, 0));
    s += " dt:" + detail::format_interval(z.at(kMatchT, kMatchTPrime), z.at(kMatchTPrime, kMatchT));
    return s;
}

/* One zone per line, in normalized order. */
inline std::string format_match_set(const MatchSet& zones) {
    std::string s;
    for (const Dbm& z : zones) {
        s += format_match_zone(z);
        s += '\n';
    }
    return s;
}

/* Inverse of format_match_zone; accepts exactly its output grammar. */
inline Dbm parse_match_zone(const std::string& text) {
    std::size_t pos = 0;
    const auto expect = [&](const std::string& token) {
        if (text.compare(pos, token.size(), token) != 0)
            throw ParseError("expected '" + token + "' at offset " + std::to_string(pos) +
                             " in match zone '" + text + "'");
        pos += token.size();
    };
    Dbm z = Dbm::universal(2);
    const auto read_interval = [&](int i_lo, int j_lo, int i_hi, int j_hi) {
        const char open = text.at(pos);
        if (open != '[' && open != '(')
            throw ParseError("expected '[' or '(' at offset " + std::to_string(pos));
        ++pos;
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) throw ParseError("missing ',' in interval");
        const Time lo = parse_time(text.substr(pos, comma - pos));
        pos = comma + 1;
        std::size_t close = text.find_first_of(")]", pos);
        if (close == std::string::npos) throw ParseError("missing interval close bracket");
        const std::string hi_text = text.substr(pos, close - pos);
        const char close_ch = text.at(close);
        pos = close + 1;
        z = constrain(std::move(z), i_lo, j_lo, make_raw(-lo, open == '('));
        if (hi_text != "inf")
            z = constrain(std::move(z), i_hi, j_hi, make_raw(parse_time(hi_text), close_ch == ')'));
        else if (close_ch != ')')
            throw ParseError("'inf' endpoint must be open in '" + text + "'");
    };
    expect("t:");
    read_interval(0, kMatchT, kMatchT, 0);
    expect(" t':");
    read_interval(0, kMatchTPrime, kMatchTPrime, 0);
    expect(" dt:");
    read_interval(kMatchT, kMatchTPrime, kMatchTPrime, kMatchT);
    if (pos != text.size())
        throw ParseError("trailing characters after match zone: '" + text.substr(pos) + "'");
    return canonicalize(std::move(z));
}

} // namespace tpm
