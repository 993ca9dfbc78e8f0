/* fixtures.hpp -- shared example instances used across the test suite */

#pragma once

#include <string>

#include "tpm/time.hpp"
#include "tpm/timed_automaton.hpp"
#include "tpm/timed_word.hpp"

namespace tpm::testing {

inline Time ns(const std::string& seconds) { return parse_time(seconds); }

/* One-clock pattern: three 'a' events, the first after more than 1s, the
 * following two each within 1s of their predecessor, then the terminal. */
inline TimedAutomaton simple_pattern() {
    TimedAutomaton a;
    a.alphabet = {'a', 'b'};
    a.clocks = {"x"};
    a.num_locations = 5;
    a.initial = {0};
    a.accepting = {4};
    a.transitions = {
        {0, 1, 'a', {{0, RelOp::Gt, 1}}, {0}},
        {1, 2, 'a', {{0, RelOp::Lt, 1}}, {0}},
        {2, 3, 'a', {{0, RelOp::Lt, 1}}, {}},
        {3, 4, kTerminal, {}, {}},
    };
    return a;
}

/* The nine-event target word the simple pattern is matched against; the
 * expected match set is t in [3.7,3.9), t' in (6.0,inf). */
inline TimedWord simple_word() {
    return {
        {'a', ns("0.5")}, {'a', ns("0.9")}, {'b', ns("1.3")},
        {'b', ns("1.7")}, {'a', ns("2.8")}, {'a', ns("3.7")},
        {'a', ns("4.9")}, {'a', ns("5.3")}, {'a', ns("6.0")},
    };
}

} // namespace tpm::testing
