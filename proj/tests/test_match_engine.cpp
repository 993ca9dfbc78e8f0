/* test_match_engine.cpp -- brute-force and FJS matching engines: goldens on
 * the running example, randomized oracle equivalence, point-membership
 * coherence, table-degradation safety */

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "support/fixtures.hpp"
#include "support/random_model.hpp"
#include "tpm/match_engine.hpp"

using tpm::brute_force_match;
using tpm::Dbm;
using tpm::fjs_match;
using tpm::kTick;
using tpm::MatchResult;
using tpm::MatchSet;
using tpm::Time;
using tpm::TimedAutomaton;
using tpm::TimedWord;

namespace {

/* Sample offsets around and between the timestamps of w, plus far-out
 * points, for exhaustive-ish membership probing. */
std::vector<Time> probe_times(const TimedWord& w) {
    std::set<Time> pts{0, kTick / 20};
    Time last = 0;
    for (const tpm::Event& e : w) {
        pts.insert(e.time - kTick / 20);
        pts.insert(e.time);
        pts.insert(e.time + kTick / 20);
        pts.insert((last + e.time) / 2);
        last = e.time;
    }
    pts.insert(last + kTick / 2);
    pts.insert(last + 7 * kTick);
    std::vector<Time> out;
    for (Time t : pts)
        if (t >= 0) out.push_back(t);
    return out;
}

/* Does the engine output agree with direct segment acceptance on a grid? */
void check_membership(const TimedAutomaton& a, const TimedWord& w, const MatchSet& zones) {
    const std::vector<Time> pts = probe_times(w);
    for (Time t : pts)
        for (Time tp : pts) {
            if (tp <= t) continue;
            const bool direct = tpm::accepts(a, tpm::segment(w, t, tp));
            const bool zoned = tpm::match_set_contains(zones, t, tp);
            if (direct != zoned) { // surface the failing point in the test log
                CAPTURE(tpm::format_time(t), tpm::format_time(tp), direct, zoned);
                REQUIRE(direct == zoned);
            }
        }
}

/* Union equality via normalized forms; raw emission lists can hold hundreds
 * of overlapping zones, which makes direct subtraction-based comparison
 * explode.  normalize() preserves the union exactly. */
bool same_match_set(const MatchSet& a, const MatchSet& b) {
    return tpm::match_sets_equal(tpm::normalize(a), tpm::normalize(b));
}

} // namespace

TEST_CASE("brute force finds exactly the running example's match zone") {
    const TimedAutomaton a = tpm::testing::simple_pattern();
    const TimedWord w = tpm::testing::simple_word();
    const MatchResult r = brute_force_match(a, w);

    const MatchSet norm = tpm::normalize(r.zones);
    REQUIRE(norm.size() == 1);
    CHECK(tpm::format_match_zone(norm.front()) == "t:[3.7,3.9) t':(6,inf) dt:(2.1,inf)");

    REQUIRE(r.trial_starts.size() == w.size() + 1);
    check_membership(a, w, r.zones);
}

TEST_CASE("FJS matches the running example visiting heads 1, 5, 7 only") {
    const TimedAutomaton a = tpm::testing::simple_pattern();
    const TimedWord w = tpm::testing::simple_word();
    const tpm::Precomputed pre = tpm::precompute(a);
    const MatchResult r = fjs_match(a, w, pre.tables);

    CHECK(r.trial_starts == std::vector<int>{1, 5, 7});
    const MatchSet norm = tpm::normalize(r.zones);
    REQUIRE(norm.size() == 1);
    CHECK(tpm::format_match_zone(norm.front()) == "t:[3.7,3.9) t':(6,inf) dt:(2.1,inf)");

    CHECK(tpm::match_sets_equal(tpm::normalize(fjs_match(a, w).zones), norm));
}

TEST_CASE("trial heads are strictly increasing and FJS visits a subset") {
    std::mt19937 rng(8181);
    for (int round = 0; round < 60; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        const TimedWord w = tpm::testing::random_timed_word(rng, 1 + (int)(rng() % 25), a.alphabet);
        tpm::TimedSkipTables tables;
        try {
            tables = tpm::precompute(a).tables;
        } catch (const tpm::NoAcceptedWord&) {
            CHECK(tpm::normalize(brute_force_match(a, w).zones).empty());
            continue;
        }
        const MatchResult bf = brute_force_match(a, w);
        const MatchResult fj = fjs_match(a, w, tables);

        CHECK(std::is_sorted(fj.trial_starts.begin(), fj.trial_starts.end()));
        CHECK(std::adjacent_find(fj.trial_starts.begin(), fj.trial_starts.end()) ==
              fj.trial_starts.end());
        CHECK(std::includes(bf.trial_starts.begin(), bf.trial_starts.end(),
                            fj.trial_starts.begin(), fj.trial_starts.end()));
        for (int n : fj.trial_starts) {
            CHECK(n >= 1);
            CHECK(n <= (int)w.size() + 1);
        }
    }
}

TEST_CASE("FJS and brute force agree on random instances") {
    std::mt19937 rng(130187);
    int nonempty = 0;
    for (int round = 0; round < 220; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        const TimedWord w = tpm::testing::random_timed_word(rng, 1 + (int)(rng() % 30), a.alphabet);
        tpm::TimedSkipTables tables;
        try {
            tables = tpm::precompute(a).tables;
        } catch (const tpm::NoAcceptedWord&) {
            CHECK(tpm::normalize(brute_force_match(a, w).zones).empty());
            continue;
        }
        const MatchSet bf = brute_force_match(a, w).zones;
        const MatchSet fj = fjs_match(a, w, tables).zones;
        CHECK(same_match_set(bf, fj));
        nonempty += tpm::normalize(bf).empty() ? 0 : 1;
    }
    CHECK(nonempty >= 40); // the generator must exercise real matches
}

TEST_CASE("membership coherence against direct segment acceptance") {
    std::mt19937 rng(424243);
    for (int round = 0; round < 40; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        const TimedWord w = tpm::testing::random_timed_word(rng, 1 + (int)(rng() % 10), a.alphabet);
        check_membership(a, w, brute_force_match(a, w).zones);
    }
}

TEST_CASE("weakened-but-sound skip tables stay exact") {
    std::mt19937 rng(5150);
    for (int round = 0; round < 60; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        const TimedWord w = tpm::testing::random_timed_word(rng, 1 + (int)(rng() % 20), a.alphabet);
        tpm::TimedSkipTables tables;
        try {
            tables = tpm::precompute(a).tables;
        } catch (const tpm::NoAcceptedWord&) {
            continue;
        }
        const MatchSet bf = brute_force_match(a, w).zones;

        /* Unit tables degrade FJS to near-brute-force but keep it exact. */
        tpm::TimedSkipTables unit = tables;
        for (auto& [c, v] : unit.delta) v = 1;
        for (auto& [s, v] : unit.beta) v = 1;
        CHECK(same_match_set(bf, fjs_match(a, w, unit).zones));

        /* Random downward perturbation of every skip is still sound. */
        tpm::TimedSkipTables weak = tables;
        for (auto& [c, v] : weak.delta) v = 1 + (int)(rng() % (unsigned)v);
        for (auto& [s, v] : weak.beta) v = 1 + (int)(rng() % (unsigned)v);
        CHECK(same_match_set(bf, fjs_match(a, w, weak).zones));

        /* The tail test is an optimization; disabling it changes nothing. */
        tpm::TimedSkipTables no_tail = tables;
        no_tail.tail_enabled = false;
        CHECK(same_match_set(bf, fjs_match(a, w, no_tail).zones));
    }
}

TEST_CASE("patterns accepting event-free segments (mstar = 1)") {
    /* s0 --$ (x < 2)--> s1, plus a one-event route s0 --a--> s2 --$ (x>1)--> s1. */
    TimedAutomaton a;
    a.alphabet = {'a'};
    a.clocks = {"x"};
    a.num_locations = 3;
    a.initial = {0};
    a.accepting = {1};
    a.transitions = {
        {0, 1, tpm::kTerminal, {{0, tpm::RelOp::Lt, 2}}, {}},
        {0, 2, 'a', {}, {}},
        {2, 1, tpm::kTerminal, {{0, tpm::RelOp::Gt, 1}}, {}},
    };
    tpm::validate_automaton(a);

    const TimedWord w = tpm::validate_word({{'a', 1 * kTick}, {'a', 3 * kTick}, {'a', 6 * kTick}});
    const tpm::Precomputed pre = tpm::precompute(a);
    REQUIRE(pre.tables.m == 1);
    CHECK_FALSE(pre.tables.tail_enabled);

    const MatchResult bf = brute_force_match(a, w);
    const MatchResult fj = fjs_match(a, w, pre.tables);
    CHECK(same_match_set(bf.zones, fj.zones));
    CHECK(fj.trial_starts == std::vector<int>{1, 2, 3, 4}); // every head: all skips are 1
    check_membership(a, w, bf.zones);

    /* Spot checks.  (0.5, 1.5) spans event 1, so only the one-event route
     * applies; its terminal guard x > 1 sees t'-t = 1.0 and rejects.
     * (0.5, 1.7) sees 1.2 > 1 and matches. */
    CHECK_FALSE(tpm::match_set_contains(bf.zones, kTick / 2, 3 * kTick / 2));
    CHECK(tpm::match_set_contains(bf.zones, kTick / 2, 17 * kTick / 10));
    /* Event-free match inside a gap: (3.1, 4.0), duration < 2. */
    CHECK(tpm::match_set_contains(bf.zones, 31 * kTick / 10, 4 * kTick));
    /* Not event-free and not one-event: (0.5, 6.5) spans three events. */
    CHECK_FALSE(tpm::match_set_contains(bf.zones, kTick / 2, 13 * kTick / 2));
}

TEST_CASE("matching the empty word") {
    const TimedAutomaton simple = tpm::testing::simple_pattern();
    const TimedWord empty;
    CHECK(tpm::normalize(brute_force_match(simple, empty).zones).empty());
    CHECK(tpm::normalize(fjs_match(simple, empty).zones).empty());

    TimedAutomaton direct;
    direct.alphabet = {'a'};
    direct.clocks = {"x"};
    direct.num_locations = 2;
    direct.initial = {0};
    direct.accepting = {1};
    direct.transitions = {{0, 1, tpm::kTerminal, {{0, tpm::RelOp::Ge, 3}}, {}}};
    tpm::validate_automaton(direct);

    const MatchSet bf = brute_force_match(direct, empty).zones;
    const MatchSet fj = fjs_match(direct, empty).zones;
    CHECK(same_match_set(bf, fj));
    CHECK(tpm::match_set_contains(bf, 0, 3 * kTick));
    CHECK(tpm::match_set_contains(bf, 5 * kTick, 100 * kTick));
    CHECK_FALSE(tpm::match_set_contains(bf, 2 * kTick, 4 * kTick)); // duration 2 < 3
    const MatchSet norm = tpm::normalize(bf);
    REQUIRE(norm.size() == 1);
    CHECK(tpm::format_match_zone(norm.front()) == "t:[0,inf) t':[3,inf) dt:[3,inf)");
}

TEST_CASE("words with letters outside the pattern alphabet are handled") {
    const TimedAutomaton a = tpm::testing::simple_pattern();
    TimedWord w = tpm::testing::simple_word();
    for (std::size_t i = 0; i < w.size(); i += 3) w[i].label = 'z';
    const MatchSet bf = brute_force_match(a, w).zones;
    const MatchSet fj = fjs_match(a, w).zones;
    CHECK(same_match_set(bf, fj));
    check_membership(a, w, bf);
}
