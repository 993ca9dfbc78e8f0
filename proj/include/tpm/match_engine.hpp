/* match_engine.hpp -- computing all matching intervals of a pattern in a word
 *
 * Three engines over the same trial machinery:
 *
 *   brute_force_match  runs one matching trial per start index.
 *   fjs_match          runs trials only where the precomputed skip tables
 *                      cannot rule out a match, advancing by the
 *                      Quick-Search-style delta table before a trial and by
 *                      the KMP-style beta table after one.
 *   OnlineMatcher      streams events through the same trial logic, emitting
 *                      every zone as soon as its bounds are determined and
 *                      releasing buffered events the skip analysis has passed.
 *
 * A matching trial at head index n explores every run consuming events
 * n, n+1, ... for segment starts t in [tau_{n-1}, tau_n).  Clock values fall
 * in two classes: a clock reset during the trial has a concrete value at
 * every later event, while an unreset clock's value is tau_i - t, so guards
 * on it translate into interval constraints on t.  Each configuration
 * therefore carries the exact interval of segment starts compatible with its
 * run, and every terminal edge out of a reached location contributes the
 * zone of (t, t') pairs solving its guard.
 */

#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tpm/dbm.hpp"
#include "tpm/errors.hpp"
#include "tpm/match_zone.hpp"
#include "tpm/skips.hpp"
#include "tpm/time.hpp"
#include "tpm/timed_automaton.hpp"
#include "tpm/timed_word.hpp"

namespace tpm {

/* One run prefix of the current matching trial. */
struct TrialConfig {
    int location;
    std::vector<Time> rho; // per clock: last reset timestamp, or kClockUnset
    Dbm t_zone;            // interval of segment starts t compatible with the run
};

struct MatchResult {
    MatchSet zones;                // emitted zones, not normalized
    std::vector<int> trial_starts; // head indices examined (tail test or full
                                   // trial), in visit order
};

namespace detail {

struct EngineTables {
    const TimedAutomaton* a = nullptr;
    std::vector<int> initials;                              // deduplicated
    std::vector<std::vector<const Transition*>> step_out;   // by source, label in Sigma
    std::vector<std::vector<const Transition*>> dollar_out; // by source, terminal label
    bool initial_dollar = false; // a terminal edge leaves some initial location
};

inline EngineTables make_engine_tables(const TimedAutomaton& a) {
    EngineTables et;
    et.a = &a;
    et.initials = a.initial;
    std::sort(et.initials.begin(), et.initials.end());
    et.initials.erase(std::unique(et.initials.begin(), et.initials.end()), et.initials.end());
    et.step_out.resize(static_cast<std::size_t>(a.num_locations));
    et.dollar_out.resize(static_cast<std::size_t>(a.num_locations));
    for (const Transition& tr : a.transitions) {
        auto& bucket = tr.label == kTerminal ? et.dollar_out : et.step_out;
        bucket[static_cast<std::size_t>(tr.from)].push_back(&tr);
    }
    for (int s : et.initials)
        if (!et.dollar_out[static_cast<std::size_t>(s)].empty()) et.initial_dollar = true;
    return et;
}

inline Time tau_lo(const TimedWord& w, int n) {
    return n >= 2 ? w[static_cast<std::size_t>(n) - 2].time : 0;
}

inline std::optional<Time> tau_hi(const TimedWord& w, int n) {
    if (n <= static_cast<int>(w.size())) return w[static_cast<std::size_t>(n) - 1].time;
    return std::nullopt;
}

/* Zones of matches containing no event whose start lies in [lo, hi): a
 * terminal edge fires directly from an initial location, so every clock
 * still reads t' - t. */
inline void emit_empty_segments(const EngineTables& et, Time lo, std::optional<Time> hi,
                                MatchSet& out) {
    if (!et.initial_dollar) return;
    const std::vector<Time> unset(et.a->clocks.size(), kClockUnset);
    const Dbm tz = t_interval(lo, hi);
    for (int s : et.initials)
        for (const Transition* tr : et.dollar_out[static_cast<std::size_t>(s)]) {
            Dbm z = sol_constr(tz, lo, hi, unset, tr->guard);
            if (!z.marked_empty()) out.push_back(std::move(z));
        }
}

/* Advance every configuration over one event.  For each successor the emit
 * callback receives (t_zone, rho, terminal guard) once per terminal edge out
 * of the new location; the caller turns those into zones (immediately
 * offline, deferred online until the next timestamp is known). */
template <typename EmitFn>
std::vector<TrialConfig> step_configs(const EngineTables& et, const std::vector<TrialConfig>& cur,
                                      const Event& e, EmitFn&& emit) {
    std::vector<TrialConfig> next;
    const auto push_dedup = [&next](TrialConfig c) {
        for (const TrialConfig& o : next)
            if (o.location == c.location && o.rho == c.rho && o.t_zone == c.t_zone) return;
        next.push_back(std::move(c));
    };
    for (const TrialConfig& c : cur)
        for (const Transition* tr : et.step_out[static_cast<std::size_t>(c.location)]) {
            if (tr->label != e.label) continue;
            Dbm tz = c.t_zone;
            bool dead = false;
            for (const GuardAtom& atom : tr->guard) {
                const Time r = c.rho[static_cast<std::size_t>(atom.clock)];
                if (r >= 0) { // reset clock: concrete value e.time - r
                    if (!atom.satisfied_by(e.time - r)) {
                        dead = true;
                        break;
                    }
                    continue;
                }
                const Time c_ns = atom.bound_time(); // unreset: value is e.time - t
                switch (atom.op) {
                    case RelOp::Lt:
                        tz = constrain(std::move(tz), 0, 1, make_raw(c_ns - e.time, true));
                        break;
                    case RelOp::Le:
                        tz = constrain(std::move(tz), 0, 1, make_raw(c_ns - e.time, false));
                        break;
                    case RelOp::Gt:
                        tz = constrain(std::move(tz), 1, 0, make_raw(e.time - c_ns, true));
                        break;
                    case RelOp::Ge:
                        tz = constrain(std::move(tz), 1, 0, make_raw(e.time - c_ns, false));
                        break;
                }
                if (tz.marked_empty()) {
                    dead = true;
                    break;
                }
            }
            if (dead) continue;
            tz = canonicalize(std::move(tz));
            if (tz.marked_empty()) continue;
            std::vector<Time> rho = c.rho;
            for (int x : tr->resets) rho[static_cast<std::size_t>(x)] = e.time;
            for (const Transition* td : et.dollar_out[static_cast<std::size_t>(tr->to)])
                emit(tz, rho, td->guard);
            push_dedup({tr->to, std::move(rho), std::move(tz)});
        }
    return next;
}

struct TrialOutcome {
    std::vector<int> stuck_locations; // locations of the last nonempty config set
    int last_consumed;                // index of the last event consumed; n-1 if none
};

inline TrialOutcome run_trial(const EngineTables& et, const TimedWord& w, int n, MatchSet& out) {
    emit_empty_segments(et, tau_lo(w, n), tau_hi(w, n), out);
    const Dbm t0 = t_interval(tau_lo(w, n), tau_hi(w, n));
    const std::vector<Time> unset(et.a->clocks.size(), kClockUnset);
    std::vector<TrialConfig> cur;
    for (int s : et.initials) cur.push_back({s, unset, t0});
    int last = n - 1;
    for (int j = n; j <= static_cast<int>(w.size()); ++j) {
        const Event& e = w[static_cast<std::size_t>(j) - 1];
        auto next = step_configs(et, cur, e,
                                 [&](const Dbm& tz, const std::vector<Time>& rho, const Guard& g) {
                                     Dbm z = sol_constr(tz, e.time, tau_hi(w, j + 1), rho, g);
                                     if (!z.marked_empty()) out.push_back(std::move(z));
                                 });
        if (next.empty()) break; // cur keeps the last alive set for the skip analysis
        cur = std::move(next);
        last = j;
    }
    std::set<int> locations;
    for (const TrialConfig& c : cur) locations.insert(c.location);
    return {{locations.begin(), locations.end()}, last};
}

} // namespace detail

/* Ground-truth engine: one matching trial per start index 1..|w|+1. */
inline MatchResult brute_force_match(const TimedAutomaton& a, const TimedWord& w) {
    MatchResult r;
    const detail::EngineTables et = detail::make_engine_tables(a);
    for (int n = 1; n <= static_cast<int>(w.size()) + 1; ++n) {
        r.trial_starts.push_back(n);
        detail::run_trial(et, w, n, r.zones);
    }
    return r;
}

/* FJS-type engine.  Produces the same zone union as brute_force_match while
 * visiting a subset of its trial heads: before a trial, the head advances by
 * the delta table while the event closing a pattern window cannot occur at
 * the required offset; after a trial, it advances by the largest beta value
 * of the locations the trial got stuck in.  Start indices hopped over after
 * a trial still get their event-free matches from the terminal edges of
 * initial locations. */
inline MatchResult fjs_match(const TimedAutomaton& a, const TimedWord& w,
                             const TimedSkipTables& tables) {
    MatchResult r;
    const detail::EngineTables et = detail::make_engine_tables(a);
    const int wn = static_cast<int>(w.size());
    const int m = std::max(tables.m, 1);
    const int bound = wn - m + 2;                         // last admissible trial head
    const bool tail = tables.tail_enabled && m >= 2;      // the tail test inspects event n+m-2
    const auto beta_of = [&tables](int s) {
        const auto it = tables.beta.find(s);
        return it == tables.beta.end() ? 1 : std::max(1, it->second);
    };
    const auto delta_of = [&tables, m](char c) {
        const auto it = tables.delta.find(c);
        return it == tables.delta.end() ? m : std::max(1, it->second);
    };
    const auto record = [&r](int head) {
        if (r.trial_starts.empty() || r.trial_starts.back() != head) r.trial_starts.push_back(head);
    };
    int n = 1;
    while (n <= bound) {
        if (tail) {
            for (;;) {
                record(n); // the head is examined, if only by the tail test
                if (tables.tail_labels.count(w[static_cast<std::size_t>(n + m - 2) - 1].label))
                    break;
                if (n + m - 1 > wn) return r; // next-letter lookup runs off the word
                n += delta_of(w[static_cast<std::size_t>(n + m - 1) - 1].label);
                if (n > bound) return r;
            }
        }
        record(n);
        const detail::TrialOutcome oc = detail::run_trial(et, w, n, r.zones);
        int skip = 1;
        for (int s : oc.stuck_locations) skip = std::max(skip, beta_of(s));
        for (int k = n + 1; k <= std::min(n + skip - 1, wn + 1); ++k)
            detail::emit_empty_segments(et, detail::tau_lo(w, k), detail::tau_hi(w, k), r.zones);
        n += skip;
    }
    return r;
}

inline MatchResult fjs_match(const TimedAutomaton& a, const TimedWord& w) {
    return fjs_match(a, w, precompute(a).tables);
}

/* Streaming engine.  Events arrive one at a time; zones are emitted the
 * moment both their endpoints' bounds are known (a zone produced while
 * consuming event j has t' ranging up to tau_{j+1}, so it surfaces when
 * event j+1 arrives or the stream finishes).  The event buffer keeps exactly
 * the suffix from the current trial head onward: everything earlier has been
 * cleared by the skip analysis and is dropped.  peak_buffered() reports the
 * high-water mark of that buffer. */
class OnlineMatcher {
public:
    struct Options {
        std::size_t max_buffer = 0;           // maximum buffered events; 0: unbounded
        std::function<void(const Dbm&)> sink; // immediate consumer; zones are
                                              // accumulated for take_zones() if unset
    };

    OnlineMatcher(TimedAutomaton a, TimedSkipTables tables)
        : OnlineMatcher(std::move(a), std::move(tables), Options()) {}

    OnlineMatcher(TimedAutomaton a, TimedSkipTables tables, Options opts)
        : a_(std::move(a)),
          tables_(std::move(tables)),
          opts_(std::move(opts)),
          m_(std::max(tables_.m, 1)),
          unset_(a_.clocks.size(), kClockUnset) {
        et_ = detail::make_engine_tables(a_);
    }

    OnlineMatcher(const OnlineMatcher&) = delete;
    OnlineMatcher& operator=(const OnlineMatcher&) = delete;

    void push(char label, Time time) {
        if (finished_) throw std::logic_error("push after finish");
        const int index = total_ + 1;
        if (time <= 0)
            throw OutOfOrderEvent("timestamp at event " + std::to_string(index) +
                                      " is not positive",
                                  static_cast<std::size_t>(index));
        if (total_ > 0 && time <= last_time_)
            throw OutOfOrderEvent("timestamp at event " + std::to_string(index) +
                                      " is not strictly greater than its predecessor",
                                  static_cast<std::size_t>(index));
        total_ = index;
        last_time_ = time;
        buffer_.push_back({label, time});
        if (opts_.max_buffer > 0 && buffer_.size() > opts_.max_buffer)
            throw BufferOverflow("event buffer would exceed " +
                                 std::to_string(opts_.max_buffer) + " events at event " +
                                 std::to_string(index));
        peak_ = std::max(peak_, buffer_.size());
        pump();
    }

    void push(const Event& e) { push(e.label, e.time); }

    /* Declare the end of the stream; matches reaching past the last event
     * become unbounded in t' and all remaining trials are resolved. */
    void finish() {
        if (finished_) return;
        finished_ = true;
        pump();
    }

    MatchSet take_zones() {
        MatchSet out;
        out.swap(zones_);
        return out;
    }

    const std::vector<int>& trial_starts() const { return trial_starts_; }
    std::size_t peak_buffered() const { return peak_; }
    std::size_t buffered() const { return buffer_.size(); }
    int pushed() const { return total_; }
    bool finished() const { return finished_; }

private:
    enum class Phase { AwaitStart, Running, Done };

    struct PendingEmit {
        int await; // t' is bounded by tau_{await}, not yet arrived
        Time lo;
        Dbm t_zone;
        std::vector<Time> rho;
        const Guard* guard;
    };

    bool arrived(int i) const { return i >= 1 && i <= total_; }

    /* Timestamp of event i (tau_0 = 0).  Only the buffered suffix plus the
     * most recently released event are reachable. */
    Time time_at(int i) const {
        if (i == 0) return 0;
        if (i + 1 == first_) return released_time_;
        return buffer_[static_cast<std::size_t>(i - first_)].time;
    }

    char label_at(int i) const { return buffer_[static_cast<std::size_t>(i - first_)].label; }

    std::optional<Time> hi_at(int i) const {
        if (arrived(i)) return time_at(i);
        return std::nullopt;
    }

    void emit(Dbm z) {
        if (z.marked_empty()) return;
        if (opts_.sink)
            opts_.sink(z);
        else
            zones_.push_back(std::move(z));
    }

    int delta_of(char c) const {
        const auto it = tables_.delta.find(c);
        return it == tables_.delta.end() ? m_ : std::max(1, it->second);
    }

    int beta_of(int s) const {
        const auto it = tables_.beta.find(s);
        return it == tables_.beta.end() ? 1 : std::max(1, it->second);
    }

    void record(int head) {
        if (trial_starts_.empty() || trial_starts_.back() != head) trial_starts_.push_back(head);
    }

    /* Zones from past trial steps whose t' upper bound is now known. */
    void flush_pending() {
        auto it = pending_.begin();
        while (it != pending_.end()) {
            std::optional<Time> hi;
            if (arrived(it->await))
                hi = time_at(it->await);
            else if (!finished_) {
                ++it;
                continue;
            }
            emit(sol_constr(it->t_zone, it->lo, hi, it->rho, *it->guard));
            it = pending_.erase(it);
        }
    }

    /* Event-free matches at start indices hopped over by a beta skip.  An
     * index is resolved once its window [tau_{k-1}, tau_k) is known; past
     * the end of a finished stream only index |w|+1 remains meaningful. */
    void resolve_pending_k() {
        auto it = pending_k_.begin();
        while (it != pending_k_.end()) {
            const int k = *it;
            if (!arrived(k) && !finished_) {
                ++it;
                continue;
            }
            if (arrived(k) || k == total_ + 1) {
                const Time lo = time_at(k - 1);
                const std::optional<Time> hi = hi_at(k);
                const Dbm tz = t_interval(lo, hi);
                for (int s : et_.initials)
                    for (const Transition* tr : et_.dollar_out[static_cast<std::size_t>(s)])
                        emit(sol_constr(tz, lo, hi, unset_, tr->guard));
            }
            it = pending_k_.erase(it);
        }
    }

    /* Drop buffered events below the current trial head; timestamps still
     * needed by an unresolved skipped index are retained. */
    void release() {
        int floor = n_;
        for (int k : pending_k_) floor = std::min(floor, k - 1);
        while (first_ < floor && !buffer_.empty()) {
            released_time_ = buffer_.front().time;
            buffer_.pop_front();
            ++first_;
        }
    }

    bool try_start() {
        if (finished_ && n_ > total_ - m_ + 2) {
            phase_ = Phase::Done;
            return false;
        }
        // Match the offline head bound: a trial at n_ needs events up to
        // n_ + m_ - 2 before anything can be concluded.
        if (!finished_ && n_ > total_ - m_ + 2) return false;
        if (tables_.tail_enabled && m_ >= 2) {
            const int need = n_ + m_ - 2;
            if (!arrived(need)) return false; // bound check above covers a finished stream
            record(n_);                       // the head is examined, if only by the tail test
            if (!tables_.tail_labels.count(label_at(need))) {
                const int look = n_ + m_ - 1;
                if (!arrived(look)) {
                    if (finished_) phase_ = Phase::Done; // lookup runs off the word
                    return false;
                }
                n_ += delta_of(label_at(look));
                return true;
            }
        }
        if (!arrived(n_) && !finished_) return false; // tau_n bounds the head interval
        record(n_);
        const Time lo = time_at(n_ - 1);
        const std::optional<Time> hi = hi_at(n_);
        const Dbm t0 = t_interval(lo, hi);
        for (int s : et_.initials)
            for (const Transition* tr : et_.dollar_out[static_cast<std::size_t>(s)])
                emit(sol_constr(t0, lo, hi, unset_, tr->guard));
        cur_.clear();
        for (int s : et_.initials) cur_.push_back({s, unset_, t0});
        consumed_ = n_ - 1;
        phase_ = Phase::Running;
        return true;
    }

    bool advance_trial() {
        bool progressed = false;
        while (arrived(consumed_ + 1)) {
            const int j = consumed_ + 1;
            const Event e{label_at(j), time_at(j)};
            auto next = detail::step_configs(
                et_, cur_, e, [&](const Dbm& tz, const std::vector<Time>& rho, const Guard& g) {
                    pending_.push_back({j + 1, e.time, tz, rho, &g});
                });
            progressed = true;
            if (next.empty()) { // cur_ keeps the last alive set
                finish_trial();
                return true;
            }
            cur_ = std::move(next);
            consumed_ = j;
            flush_pending(); // replayed events determine earlier bounds at once
        }
        if (finished_) {
            finish_trial();
            return true;
        }
        return progressed;
    }

    void finish_trial() {
        std::set<int> locations;
        for (const TrialConfig& c : cur_) locations.insert(c.location);
        int skip = 1;
        for (int s : locations) skip = std::max(skip, beta_of(s));
        if (et_.initial_dollar)
            for (int k = n_ + 1; k <= n_ + skip - 1; ++k) pending_k_.push_back(k);
        n_ += skip;
        cur_.clear();
        phase_ = Phase::AwaitStart;
    }

    void pump() {
        for (;;) {
            flush_pending();
            resolve_pending_k();
            release();
            bool progress = false;
            switch (phase_) {
                case Phase::AwaitStart: progress = try_start(); break;
                case Phase::Running: progress = advance_trial(); break;
                case Phase::Done: break;
            }
            if (!progress) break;
        }
        flush_pending();
        resolve_pending_k();
        release();
    }

    TimedAutomaton a_;
    TimedSkipTables tables_;
    Options opts_;
    int m_;
    std::vector<Time> unset_;
    detail::EngineTables et_;

    std::deque<Event> buffer_;
    int first_ = 1;          // global 1-based index of buffer_.front()
    Time released_time_ = 0; // timestamp of the last released event
    int total_ = 0;
    Time last_time_ = 0;
    bool finished_ = false;
    std::size_t peak_ = 0;

    Phase phase_ = Phase::AwaitStart;
    int n_ = 1;
    int consumed_ = 0;
    std::vector<TrialConfig> cur_;
    std::deque<PendingEmit> pending_;
    std::deque<int> pending_k_;

    MatchSet zones_;
    std::vector<int> trial_starts_;
};

/* Convenience wrapper: stream a whole word through an OnlineMatcher. */
inline MatchResult online_match(const TimedAutomaton& a, const TimedWord& w,
                                const TimedSkipTables& tables, std::size_t max_buffer = 0,
                                std::size_t* peak_buffered = nullptr) {
    OnlineMatcher::Options opts;
    opts.max_buffer = max_buffer;
    OnlineMatcher matcher(a, tables, std::move(opts));
    for (const Event& e : w) matcher.push(e);
    matcher.finish();
    MatchResult r;
    r.zones = matcher.take_zones();
    r.trial_starts = matcher.trial_starts();
    if (peak_buffered) *peak_buffered = matcher.peak_buffered();
    return r;
}

} // namespace tpm
