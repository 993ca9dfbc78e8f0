/* strmatch.hpp -- Franek--Jennings--Smyth string matching (simplified)
 *
 * Pure string matching with the two FJS skip tables: the Quick Search table
 * Delta (indexed by mismatching character) and the KMP table beta (indexed by
 * the length of the successful partial match).  This is the simplified
 * variant: the tail of the pattern is tried first, Quick Search skips are
 * applied while the tail mismatches, and a full left-to-right trial followed
 * by a KMP skip runs once the tail matches.  No attempt is made to restore
 * the original algorithm's linear worst case.
 *
 * Indices in the public results are 1-based and inclusive: a match (i,j)
 * means w(i..j) equals the pattern.
 */

#pragma once

#include <array>
#include <set>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace tpm {

/* Quick Search skips, total over 8-bit symbols; characters absent from the
 * pattern hold the default |pat|+1. */
using StringDelta = std::array<int, 256>;

/* KMP skips indexed by matched-prefix length p in [0, |pat|]. */
using StringBeta = std::vector<int>;

/* Delta(a) = distance from the right end of pat to the last occurrence of a,
 * i.e. min{ i in [1,|pat|] | a = pat(|pat|-i+1) }, else |pat|+1. */
inline StringDelta build_string_delta(std::string_view pat) {
    if (pat.empty()) throw std::invalid_argument("build_string_delta: empty pattern");
    StringDelta delta;
    delta.fill(static_cast<int>(pat.size()) + 1);
    for (std::size_t k = 0; k < pat.size(); ++k)
        delta[static_cast<unsigned char>(pat[k])] = static_cast<int>(pat.size() - k);
    return delta;
}

namespace detail {
/* Does pat(1, p-n) equal pat(1+n, p)?  Vacuously true once n >= p. */
inline bool prefix_realigns(std::string_view pat, int p, int n) {
    for (int k = 1; k <= p - n; ++k)
        if (pat[static_cast<std::size_t>(k - 1)] != pat[static_cast<std::size_t>(n + k - 1)])
            return false;
    return true;
}
} // namespace detail

/* beta(p) = smallest shift n >= 1 under which the length-p matched prefix
 * still aligns with the pattern: pat(1, p-n) = pat(1+n, p).  Patterns are
 * short, so the direct cubic evaluation of the defining equation is both the
 * clearest and a perfectly adequate choice. */
inline StringBeta build_string_beta(std::string_view pat) {
    if (pat.empty()) throw std::invalid_argument("build_string_beta: empty pattern");
    const int len = static_cast<int>(pat.size());
    StringBeta beta(static_cast<std::size_t>(len) + 1, len);
    for (int p = 0; p <= len; ++p)
        for (int n = 1; n <= len; ++n)
            if (detail::prefix_realigns(pat, p, n)) {
                beta[static_cast<std::size_t>(p)] = n;
                break;
            }
    return beta;
}

/* All matches of pat inside w, as 1-based inclusive index pairs.
 *
 * If `visited` is non-null it receives, in order, every head position n at
 * which a comparison was made (the positions the skip tables did NOT jump
 * over); it is strictly increasing by construction. */
inline std::set<std::pair<int, int>>
fjs_string_match(std::string_view w, std::string_view pat,
                 std::vector<int>* visited = nullptr) {
    if (pat.empty()) throw std::invalid_argument("fjs_string_match: empty pattern");
    std::set<std::pair<int, int>> matches;
    const int wlen = static_cast<int>(w.size());
    const int plen = static_cast<int>(pat.size());
    const StringDelta delta = build_string_delta(pat);
    const StringBeta beta = build_string_beta(pat);

    int n = 1; // position in w of the head of pat
    while (n <= wlen - plen + 1) {
        if (visited) visited->push_back(n);
        /* Try matching the tail of pat; Quick Search skips on mismatch. */
        while (w[static_cast<std::size_t>(n + plen - 2)] != pat[static_cast<std::size_t>(plen - 1)]) {
            if (n + plen > wlen) return matches; // Delta argument out of range
            n += delta[static_cast<unsigned char>(w[static_cast<std::size_t>(n + plen - 1)])];
            if (n > wlen - plen + 1) return matches;
            if (visited) visited->push_back(n);
        }
        /* Tail matched: try matching from left to right. */
        int p = 1;
        while (p <= plen && pat[static_cast<std::size_t>(p - 1)] == w[static_cast<std::size_t>(n + p - 2)])
            ++p;
        if (p == plen + 1) matches.emplace(n, n + plen - 1);
        /* KMP-type skipping, keyed by the matched-prefix length p-1. */
        n += beta[static_cast<std::size_t>(p - 1)];
    }
    return matches;
}

} // namespace tpm
