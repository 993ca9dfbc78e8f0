/* dbm.hpp -- difference bound matrices over nonnegative clocks
 *
 * A DBM of dimension n+1 represents a zone over n clocks: entry (i,j) bounds
 * x_i - x_j, with x_0 the constant-zero reference row/column.  Bounds are
 * encoded branch-free as 2*value + weakness-bit (1 for <=, 0 for <), so the
 * tighter of two bounds is the numeric minimum and bound addition is
 * raw1 + raw2 - ((raw1|raw2) & 1).  +infinity is a saturating sentinel and
 * by convention non-strict.  Values are nanosecond fixed point.
 *
 * All operations are value semantics: they return new matrices and never
 * mutate shared state.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tpm/time.hpp"
#include "tpm/timed_automaton.hpp"

namespace tpm {

using DbmRaw = std::int64_t;

inline constexpr DbmRaw kDbmInf = std::numeric_limits<std::int64_t>::max();

struct Bound {
    Time value;
    bool strict;
};

constexpr DbmRaw make_raw(Time value, bool strict) {
    return value * 2 + (strict ? 0 : 1);
}

inline constexpr DbmRaw kRawZeroWeak = make_raw(0, false); // (0, <=)

constexpr Bound raw_bound(DbmRaw raw) {
    /* Right shift of a negative lhs is implementation-defined pre-C++20;
     * C++20 defines it as arithmetic, which is exactly what we want. */
    return Bound{raw >> 1, (raw & 1) == 0};
}

constexpr DbmRaw raw_add(DbmRaw a, DbmRaw b) {
    if (a == kDbmInf || b == kDbmInf) return kDbmInf;
    return a + b - ((a | b) & 1);
}

class Dbm {
public:
    /* All clocks exactly 0. */
    static Dbm zero(int num_clocks) {
        Dbm d(num_clocks);
        d.d_.assign(d.d_.size(), kRawZeroWeak);
        d.canonical_ = true;
        return d;
    }

    /* All clocks anywhere >= 0. */
    static Dbm universal(int num_clocks) {
        Dbm d(num_clocks);
        d.d_.assign(d.d_.size(), kDbmInf);
        for (int j = 0; j < d.dim_; ++j) d.set_unchecked(0, j, kRawZeroWeak);
        for (int i = 0; i < d.dim_; ++i) d.set_unchecked(i, i, kRawZeroWeak);
        d.canonical_ = true;
        return d;
    }

    explicit Dbm(int num_clocks)
        : dim_(num_clocks + 1),
          d_(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_), kDbmInf) {}

    int dim() const { return dim_; }
    int num_clocks() const { return dim_ - 1; }
    bool marked_empty() const { return empty_; }
    bool is_canonical() const { return canonical_; }
    const std::vector<DbmRaw>& raw() const { return d_; }

    DbmRaw at(int i, int j) const {
        return d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
                  static_cast<std::size_t>(j)];
    }

    /* Overwrite an entry; the matrix may no longer be canonical. */
    void set(int i, int j, DbmRaw raw) {
        set_unchecked(i, j, raw);
        canonical_ = false;
    }

    friend bool operator==(const Dbm& a, const Dbm& b) {
        if (a.dim_ != b.dim_) return false;
        if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
        return a.d_ == b.d_;
    }

private:
    void set_unchecked(int i, int j, DbmRaw raw) {
        d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
           static_cast<std::size_t>(j)] = raw;
    }

    int dim_;
    bool empty_ = false;
    bool canonical_ = false;
    std::vector<DbmRaw> d_;

    friend Dbm canonicalize(Dbm d);
    friend Dbm constrain(Dbm d, int i, int j, DbmRaw raw);
    friend Dbm elapse(Dbm d);
    friend Dbm reset(Dbm d, const std::vector<int>& clocks);
    friend Dbm extrapolate(Dbm d, Time max_const);
};

/* All-pairs shortest-path closure (Floyd--Warshall).  A negative diagonal
 * marks the zone empty. */
inline Dbm canonicalize(Dbm d) {
    if (d.canonical_ || d.empty_) return d;
    const int n = d.dim_;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const DbmRaw dik = d.at(i, k);
            if (dik == kDbmInf) continue;
            for (int j = 0; j < n; ++j) {
                const DbmRaw via = raw_add(dik, d.at(k, j));
                if (via < d.at(i, j)) d.set_unchecked(i, j, via);
            }
        }
    for (int i = 0; i < n; ++i)
        if (d.at(i, i) < kRawZeroWeak) {
            d.empty_ = true;
            break;
        }
    d.canonical_ = true;
    return d;
}

inline bool is_empty(const Dbm& d) {
    if (d.marked_empty()) return true;
    if (d.is_canonical()) return false;
    return canonicalize(d).marked_empty();
}

/* Tighten entry (i,j) to `raw` and restore canonical form incrementally in
 * O(dim^2).  No-op if the existing bound is at least as tight. */
inline Dbm constrain(Dbm d, int i, int j, DbmRaw raw) {
    d = canonicalize(std::move(d));
    if (d.empty_ || raw >= d.at(i, j)) return d;
    const int n = d.dim_;
    if (raw_add(raw, d.at(j, i)) < kRawZeroWeak) {
        d.empty_ = true;
        return d;
    }
    d.set_unchecked(i, j, raw);
    for (int p = 0; p < n; ++p) {
        const DbmRaw pi = d.at(p, i);
        if (pi == kDbmInf) continue;
        const DbmRaw through = raw_add(pi, raw);
        for (int q = 0; q < n; ++q) {
            const DbmRaw cand = raw_add(through, d.at(j, q));
            if (cand < d.at(p, q)) d.set_unchecked(p, q, cand);
        }
    }
    return d;
}

/* Time successor: drop every clock's upper bound. */
inline Dbm elapse(Dbm d) {
    d = canonicalize(std::move(d));
    if (d.empty_) return d;
    for (int i = 1; i < d.dim_; ++i) d.set_unchecked(i, 0, kDbmInf);
    return d; // closure is preserved: no other entry can tighten through x0
}

/* Intersect with a guard conjunction. */
inline Dbm and_guard(Dbm d, const Guard& g) {
    for (const auto& atom : g) {
        const int x = atom.clock + 1;
        switch (atom.op) {
            case RelOp::Lt: d = constrain(std::move(d), x, 0, make_raw(atom.bound_time(), true)); break;
            case RelOp::Le: d = constrain(std::move(d), x, 0, make_raw(atom.bound_time(), false)); break;
            case RelOp::Gt: d = constrain(std::move(d), 0, x, make_raw(-atom.bound_time(), true)); break;
            case RelOp::Ge: d = constrain(std::move(d), 0, x, make_raw(-atom.bound_time(), false)); break;
        }
        if (d.marked_empty()) break;
    }
    return d;
}

/* Set each clock in `clocks` to zero (copy reference row/column). */
inline Dbm reset(Dbm d, const std::vector<int>& clocks) {
    d = canonicalize(std::move(d));
    if (d.empty_) return d;
    for (int c : clocks) {
        const int x = c + 1;
        for (int j = 0; j < d.dim_; ++j) {
            d.set_unchecked(x, j, d.at(0, j));
            d.set_unchecked(j, x, d.at(j, 0));
        }
        d.set_unchecked(x, x, kRawZeroWeak);
    }
    return d; // copying the zero row/column of a closed matrix keeps it closed
}

/* M-extrapolation: entries above (M,<=) become infinity, entries below
 * (M strict lower bounds) clamp to (-M,<).  The result is generally not
 * canonical; callers re-canonicalize. */
inline Dbm extrapolate(Dbm d, Time max_const) {
    if (is_empty(d)) return canonicalize(std::move(d));
    const DbmRaw hi = make_raw(max_const, false);
    const DbmRaw lo = make_raw(-max_const, true);
    for (int i = 0; i < d.dim(); ++i)
        for (int j = 0; j < d.dim(); ++j) {
            if (i == j) continue;
            const DbmRaw v = d.at(i, j);
            if (v != kDbmInf && v > hi)
                d.set(i, j, kDbmInf);
            else if (v < lo)
                d.set(i, j, lo);
        }
    return d;
}

/* Does d1 contain d2?  (Empty zones are contained in everything.) */
inline bool includes(const Dbm& d1, const Dbm& d2) {
    Dbm a = canonicalize(d1);
    Dbm b = canonicalize(d2);
    if (b.marked_empty()) return true;
    if (a.marked_empty()) return false;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            if (b.at(i, j) > a.at(i, j)) return false;
    return true;
}

inline bool dbm_equal(const Dbm& a, const Dbm& b) {
    return canonicalize(a) == canonicalize(b);
}

/* Is the valuation (nanoseconds per clock, without the reference slot)
 * inside the zone?  Evaluates the constraint conjunction directly. */
inline bool contains(const Dbm& d, const std::vector<Time>& valuation) {
    auto value = [&](int i) { return i == 0 ? Time{0} : valuation[static_cast<std::size_t>(i - 1)]; };
    if (d.marked_empty()) return false;
    for (int i = 0; i < d.dim(); ++i)
        for (int j = 0; j < d.dim(); ++j) {
            const DbmRaw raw = d.at(i, j);
            if (raw == kDbmInf) continue;
            const Bound b = raw_bound(raw);
            const Time diff = value(i) - value(j);
            if (b.strict ? diff >= b.value : diff > b.value) return false;
        }
    return true;
}

/* Inequality-text rendering for debugging and golden tests, e.g.
 * "x-0<1 & 0-x<=0".  Diagonal and infinite entries are skipped. */
inline std::string dbm_to_string(const Dbm& d, const std::vector<std::string>& clock_names) {
    Dbm c = canonicalize(d);
    if (c.marked_empty()) return "empty";
    auto name = [&](int i) {
        return i == 0 ? std::string("0") : clock_names[static_cast<std::size_t>(i - 1)];
    };
    std::string out;
    auto emit = [&](int i, int j) {
        const DbmRaw raw = c.at(i, j);
        if (i == j || raw == kDbmInf) return;
        const Bound b = raw_bound(raw);
        if (!out.empty()) out += " & ";
        out += name(i) + "-" + name(j) + (b.strict ? "<" : "<=") + format_time(b.value);
    };
    for (int i = 1; i < c.dim(); ++i) // clock rows first, reference row last
        for (int j = 0; j < c.dim(); ++j) emit(i, j);
    for (int j = 1; j < c.dim(); ++j) emit(0, j);
    return out.empty() ? "true" : out;
}

} // namespace tpm
