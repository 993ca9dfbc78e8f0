/* gen.hpp -- synthetic benchmark words
 *
 * Two profiles:
 *
 *   simple-alternation   a, b, a, b, ... with exponential inter-arrival gaps;
 *                        the workload shape used with the two-letter patterns.
 *   exp-superposition    the merge of two independent alternations p,P,p,P,...
 *                        and q,Q,q,Q,... (uppercase marks the negated
 *                        proposition), each with exponential inter-arrival
 *                        gaps; the workload shape for four-letter patterns.
 *
 * Output is deterministic in (profile, length, seed, rate): gaps are derived
 * from raw mt19937 draws rather than a distribution adapter, so the byte
 * stream does not depend on the standard library's distribution
 * implementations.
 */

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tpm/errors.hpp"
#include "tpm/time.hpp"
#include "tpm/timed_word.hpp"

namespace tpm {

struct GenOptions {
    std::uint64_t seed = 1;
    double rate = 1.0; // inter-arrival rate per second, > 0
};

namespace gen_detail {

/* Uniform in (0,1), exactly reproducible: one 32-bit draw, offset half a step
 * so the endpoints are excluded. */
inline double unit_open(std::mt19937& rng) {
    return (static_cast<double>(rng()) + 0.5) * (1.0 / 4294967296.0);
}

/* Exponential gap, at least one nanosecond so timestamps strictly increase. */
inline Time exp_gap(std::mt19937& rng, double rate) {
    const double seconds = -std::log(unit_open(rng)) / rate;
    const double ns = seconds * static_cast<double>(kTick);
    if (ns >= static_cast<double>(kTimeMax) / 4) return kTimeMax / 4;
    return std::max<Time>(1, std::llround(ns));
}

} // namespace gen_detail

inline TimedWord gen_simple_alternation(int length, const GenOptions& opts = {}) {
    if (length < 0) throw ValidationError("word length must be nonnegative");
    if (!(opts.rate > 0)) throw ValidationError("rate must be positive");
    std::mt19937 rng(static_cast<std::mt19937::result_type>(opts.seed));
    TimedWord w;
    w.reserve(static_cast<std::size_t>(length));
    Time t = 0;
    for (int i = 0; i < length; ++i) {
        t += gen_detail::exp_gap(rng, opts.rate);
        w.push_back({i % 2 == 0 ? 'a' : 'b', t});
    }
    return w;
}

inline TimedWord gen_exp_superposition(int length, const GenOptions& opts = {}) {
    if (length < 0) throw ValidationError("word length must be nonnegative");
    if (!(opts.rate > 0)) throw ValidationError("rate must be positive");
    std::mt19937 rng(static_cast<std::mt19937::result_type>(opts.seed));
    TimedWord w;
    w.reserve(static_cast<std::size_t>(length));
    Time next_p = gen_detail::exp_gap(rng, opts.rate);
    Time next_q = gen_detail::exp_gap(rng, opts.rate);
    bool p_high = true, q_high = true; // alternation states: p vs P, q vs Q
    Time last = 0;
    for (int i = 0; i < length; ++i) {
        char label;
        Time at;
        if (next_p <= next_q) {
            label = p_high ? 'p' : 'P';
            p_high = !p_high;
            at = next_p;
            next_p += gen_detail::exp_gap(rng, opts.rate);
        } else {
            label = q_high ? 'q' : 'Q';
            q_high = !q_high;
            at = next_q;
            next_q += gen_detail::exp_gap(rng, opts.rate);
        }
        last = std::max(at, last + 1); // the merge must stay strictly increasing
        w.push_back({label, last});
    }
    return w;
}

inline TimedWord gen_word(const std::string& profile, int length, const GenOptions& opts = {}) {
    if (profile == "simple-alternation") return gen_simple_alternation(length, opts);
    if (profile == "exp-superposition") return gen_exp_superposition(length, opts);
    throw ValidationError("unknown generator profile '" + profile +
                          "' (expected simple-alternation or exp-superposition)");
}

} // namespace tpm
