/* test_skips.cpp -- timed skip tables: goldens, untimed cross-check, cache */

#include <catch2/catch_amalgamated.hpp>

#include <future>
#include <random>

#include "tpm/nfa.hpp"
#include "tpm/skips.hpp"

#include "support/fixtures.hpp"
#include "support/random_model.hpp"

using tpm::build_zone_automaton;
using tpm::Precomputed;
using tpm::TimedAutomaton;
using tpm::timed_prefix_sets;

namespace {

/* Untimed shadow of a guard-free pattern: drop every terminal transition
 * and accept exactly the locations they left from.  Its word-based skip
 * tables must coincide with the timed ones (windows of a guard-free
 * pattern are plain words). */
tpm::Nfa untimed_shadow(const TimedAutomaton& a) {
    tpm::Nfa n;
    n.alphabet.assign(a.alphabet.begin(), a.alphabet.end());
    n.num_states = a.num_locations;
    n.initial = a.initial;
    for (const tpm::Transition& tr : a.transitions) {
        if (tr.label == tpm::kTerminal) {
            n.accepting.push_back(tr.from);
        } else {
            n.edges.push_back({tr.from, tr.label, tr.to});
        }
    }
    std::sort(n.accepting.begin(), n.accepting.end());
    n.accepting.erase(std::unique(n.accepting.begin(), n.accepting.end()), n.accepting.end());
    return n;
}

} // namespace

TEST_CASE("skip tables of the running example") {
    const TimedAutomaton a = tpm::testing::simple_pattern();
    const Precomputed p = precompute(a);

    CHECK(p.tables.m == 4);
    CHECK_FALSE(p.tables.fallback);
    CHECK(p.tables.delta == std::map<char, int>{{'a', 1}, {'b', 4}});
    CHECK(p.tables.beta == std::map<int, int>{{0, 1}, {1, 1}, {2, 2}, {3, 3}, {4, 3}});
    CHECK(p.tables.tail_labels == std::set<char>{'a'});
    CHECK(p.tables.tail_enabled);
    CHECK(p.seconds < 5.0);

    const std::string dump = dump_skip_tables(p.tables, a);
    CHECK(dump.find("delta a: 1") != std::string::npos);
    CHECK(dump.find("delta b: 4") != std::string::npos);
    CHECK(dump.find("beta s2: 2") != std::string::npos);
}

TEST_CASE("skip tables of tiny patterns are all ones") {
    TimedAutomaton a;
    a.alphabet = {'a'};
    a.clocks = {"x"};
    a.num_locations = 3;
    a.initial = {0};
    a.accepting = {2};
    a.transitions = {{0, 1, 'a', {}, {}}, {1, 2, tpm::kTerminal, {}, {}}};

    SECTION("single letter: m = 2") {
        const Precomputed p = precompute(a);
        CHECK(p.tables.m == 2);
        CHECK(p.tables.delta.at('a') == 1);
        for (const auto& [s, b] : p.tables.beta) CHECK(b == 1);
        CHECK(p.tables.tail_enabled);
        CHECK(p.tables.tail_labels == std::set<char>{'a'});
    }
    SECTION("empty word: m = 1, tail test disabled") {
        a.num_locations = 2;
        a.accepting = {1};
        a.transitions = {{0, 1, tpm::kTerminal, {}, {}}};
        const Precomputed p = precompute(a);
        CHECK(p.tables.m == 1);
        CHECK(p.tables.delta.at('a') == 1);
        CHECK_FALSE(p.tables.tail_enabled);
        for (const auto& [s, b] : p.tables.beta) CHECK(b == 1);
    }
}

TEST_CASE("guard-free patterns match the word-based tables") {
    std::mt19937 rng(20260814);
    int compared = 0;
    for (int round = 0; round < 800 && compared < 120; ++round) {
        TimedAutomaton a = tpm::testing::random_automaton(rng);
        for (tpm::Transition& tr : a.transitions) tr.guard.clear();

        Precomputed p;
        try {
            p = precompute(a);
        } catch (const tpm::NoAcceptedWord&) {
            continue;
        }
        if (p.prefixes.m < 2) continue; // the word-based tables need m >= 1

        const tpm::Nfa shadow = untimed_shadow(a);
        const tpm::PrefixSets ps = build_prefix_sets(shadow);
        REQUIRE_FALSE(ps.exploded);
        const tpm::NfaSkipTables word_tables = build_nfa_skip_tables(shadow, ps);

        REQUIRE(word_tables.m == p.prefixes.m - 1);
        for (char c : a.alphabet) CHECK(p.tables.delta.at(c) == word_tables.delta.at(c));
        for (const auto& [s, m_s] : p.prefixes.m_s) {
            if (a.is_accepting(s)) continue; // the shadow has no terminal step
            REQUIRE(word_tables.beta.count(s) == 1);
            CHECK(p.tables.beta.at(s) == word_tables.beta.at(s));
        }
        ++compared;
    }
    REQUIRE(compared >= 100);
}

TEST_CASE("beta never exceeds its window length and delta stays in range") {
    std::mt19937 rng(99);
    for (int round = 0; round < 120; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        Precomputed p;
        try {
            p = precompute(a);
        } catch (const tpm::NoAcceptedWord&) {
            continue;
        }
        for (const auto& [c, d] : p.tables.delta) {
            CHECK(d >= 1);
            CHECK(d <= p.tables.m);
        }
        for (const auto& [s, b] : p.tables.beta) {
            CHECK(b >= 1);
            auto it = p.prefixes.m_s.find(s);
            const int ell = it == p.prefixes.m_s.end()
                                ? 0
                                : std::min(it->second, p.prefixes.m - 1);
            CHECK(b <= std::max(ell, 1));
        }
    }
}

TEST_CASE("zone merging can only shrink skip values") {
    std::mt19937 rng(31337);
    for (int round = 0; round < 80; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        Precomputed merged, exact;
        try {
            merged = precompute(a, {.subsumption = true});
            exact = precompute(a, {.subsumption = false});
        } catch (const tpm::NoAcceptedWord&) {
            continue;
        }
        if (merged.prefixes.exploded || exact.prefixes.exploded) continue;
        REQUIRE(merged.tables.m == exact.tables.m);
        for (const auto& [c, d] : merged.tables.delta) CHECK(d <= exact.tables.delta.at(c));
        for (const auto& [s, b] : merged.tables.beta) CHECK(b <= exact.tables.beta.at(s));
    }
}

TEST_CASE("exhausted state budget falls back to unit beta") {
    const TimedAutomaton a = tpm::testing::simple_pattern();
    const Precomputed p = precompute(a, {.beta_budget = 0});
    CHECK(p.tables.beta == std::map<int, int>{{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}});
    /* delta is unaffected by the budget */
    CHECK(p.tables.delta == std::map<char, int>{{'a', 1}, {'b', 4}});
}

TEST_CASE("prefix explosion falls back to unit tables") {
    TimedAutomaton a;
    a.alphabet = {'a', 'b'};
    a.clocks = {"x"};
    a.num_locations = 3;
    a.initial = {0};
    a.accepting = {2};
    a.transitions = {
        {0, 1, 'a', {}, {}},
        {0, 1, 'b', {}, {}},
        {1, 2, tpm::kTerminal, {}, {}},
    };
    const Precomputed p = precompute(a, {.path_cap = 1});
    CHECK(p.prefixes.exploded);
    CHECK(p.tables.fallback);
    CHECK_FALSE(p.tables.tail_enabled);
    CHECK(p.tables.delta == std::map<char, int>{{'a', 1}, {'b', 1}});
    for (const auto& [s, b] : p.tables.beta) CHECK(b == 1);
}

TEST_CASE("the successor memo is transparent") {
    std::mt19937 rng(555);
    for (int round = 0; round < 40; ++round) {
        const TimedAutomaton a = tpm::testing::random_automaton(rng);
        Precomputed with_cache, without_cache;
        try {
            with_cache = precompute(a, {.use_cache = true});
            without_cache = precompute(a, {.use_cache = false});
        } catch (const tpm::NoAcceptedWord&) {
            continue;
        }
        CHECK(with_cache.tables.delta == without_cache.tables.delta);
        CHECK(with_cache.tables.beta == without_cache.tables.beta);
    }
}

TEST_CASE("a shared memo tolerates concurrent beta queries") {
    const TimedAutomaton a = tpm::testing::simple_pattern();
    const tpm::ZoneAutomaton z = build_zone_automaton(a);
    const tpm::TimedPrefixSets tps = timed_prefix_sets(z, a);
    const std::map<int, int> expected{{0, 1}, {1, 1}, {2, 2}, {3, 3}, {4, 3}};

    tpm::ProductExplorationCache cache;
    std::vector<std::future<std::map<int, int>>> jobs;
    for (int t = 0; t < 4; ++t)
        jobs.push_back(std::async(std::launch::async, [&] {
            return compute_beta(a, z, tps, {.cache = &cache});
        }));
    for (auto& job : jobs) CHECK(job.get() == expected);
    CHECK(cache.size() > 0);
}
