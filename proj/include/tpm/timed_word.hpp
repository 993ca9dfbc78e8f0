/* timed_word.hpp -- timed words and timed word segments
 *
 * A timed word is a sequence of (label, timestamp) events with strictly
 * increasing positive timestamps.  The segment w|(t,t') keeps the events
 * strictly inside the open interval (t,t'), shifts them by -t, and appends
 * the terminal event ($, t'-t).
 */

#pragma once

#include <vector>

#include "tpm/errors.hpp"
#include "tpm/time.hpp"

namespace tpm {

/* Reserved terminal character: labels exactly the transitions into accepting
 * locations and never occurs in input words. */
inline constexpr char kTerminal = '$';

struct Event {
    char label;
    Time time;

    friend bool operator==(const Event&, const Event&) = default;
};

using TimedWord = std::vector<Event>;

/* Check strict monotonicity and positivity of timestamps; returns the word
 * unchanged on success.  Indices in errors are 1-based. */
inline TimedWord validate_word(TimedWord events) {
    Time prev = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].time <= 0) throw NonPositiveTimestamp(i + 1);
        if (events[i].time <= prev && i > 0) throw NonMonotoneTimestamp(i + 1);
        prev = events[i].time;
    }
    return events;
}

/* The segment w|(t,t'): events with timestamp in the open interval (t,t'),
 * shifted by -t, terminated by ($, t'-t).  Requires 0 <= t < t'. */
inline TimedWord segment(const TimedWord& w, Time t, Time t_prime) {
    if (t < 0 || t >= t_prime)
        throw InvalidInterval("segment requires 0 <= t < t', got t=" + format_time(t) +
                              " t'=" + format_time(t_prime));
    TimedWord out;
    for (const Event& e : w)
        if (e.time > t && e.time < t_prime) out.push_back({e.label, e.time - t});
    out.push_back({kTerminal, t_prime - t});
    return out;
}

} // namespace tpm
