/* tpm_cli.cpp -- command-line front end
 *
 *   tpm match PATTERN WORD [--algorithm fjs|bruteforce] [--dump-skips] [--dump-zones]
 *   tpm monitor PATTERN [--max-buffer N] [--dump-skips] [--dump-zones]
 *   tpm gen --profile NAME --length N [--seed S] [--rate R]
 *   tpm bench PATTERN --sizes N,N,... [--algorithms ...] [--repeats R] [...]
 *
 * Exit codes: 0 success, 1 parse error, 2 validation error, 3 out-of-order
 * stream event, 4 monitor buffer overflow.  Debug dumps go to stderr so
 * stdout stays machine-readable.
 */

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpm/gen.hpp"
#include "tpm/io.hpp"
#include "tpm/match_engine.hpp"
#include "tpm/skips.hpp"
#include "tpm/zone_graph.hpp"

namespace {

/* Skip tables for matching; a pattern accepting no word at all still gets
 * matched (to the empty set) via unit tables. */
tpm::TimedSkipTables tables_or_unit(const tpm::TimedAutomaton& a, bool* empty_language,
                                    tpm::Precomputed* pre_out = nullptr) {
    try {
        tpm::Precomputed pre = tpm::precompute(a);
        if (pre_out) *pre_out = pre;
        if (empty_language) *empty_language = false;
        return pre.tables;
    } catch (const tpm::NoAcceptedWord&) {
        if (empty_language) *empty_language = true;
        tpm::TimedSkipTables unit;
        unit.m = 1;
        unit.fallback = true;
        return unit;
    }
}

void print_dumps(const tpm::TimedAutomaton& a, const tpm::TimedSkipTables& tables,
                 bool dump_skips, bool dump_zones) {
    if (dump_skips) std::cerr << tpm::dump_skip_tables(tables, a);
    if (dump_zones) {
        const tpm::ZoneAutomaton za = tpm::build_zone_automaton(a);
        std::cerr << tpm::dump_zone_automaton(za, a);
    }
}

int run_match(const std::string& pattern_path, const std::string& word_path,
              const std::string& algorithm, bool dump_skips, bool dump_zones) {
    const tpm::TimedAutomaton a = tpm::load_pattern(pattern_path);
    const tpm::TimedWord w = tpm::load_word(word_path);

    tpm::MatchResult result;
    if (algorithm == "bruteforce") {
        if (dump_skips || dump_zones) {
            bool empty_language = false;
            print_dumps(a, tables_or_unit(a, &empty_language), dump_skips, dump_zones);
        }
        result = tpm::brute_force_match(a, w);
    } else {
        bool empty_language = false;
        const tpm::TimedSkipTables tables = tables_or_unit(a, &empty_language);
        print_dumps(a, tables, dump_skips, dump_zones);
        if (empty_language)
            std::cerr << "note: the pattern accepts no word; the match set is empty\n";
        result = tpm::fjs_match(a, w, tables);
    }
    std::cout << tpm::format_match_set(tpm::normalize(result.zones));
    return 0;
}

int run_monitor(const std::string& pattern_path, std::size_t max_buffer, bool dump_skips,
                bool dump_zones) {
    const tpm::TimedAutomaton a = tpm::load_pattern(pattern_path);
    bool empty_language = false;
    const tpm::TimedSkipTables tables = tables_or_unit(a, &empty_language);
    print_dumps(a, tables, dump_skips, dump_zones);

    tpm::OnlineMatcher::Options opts;
    opts.max_buffer = max_buffer;
    opts.sink = [](const tpm::Dbm& z) { std::cout << tpm::format_match_zone(z) << std::endl; };
    tpm::OnlineMatcher matcher(a, tables, std::move(opts));

    std::string line;
    int line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        const std::optional<tpm::Event> e = tpm::parse_event_line(line, line_no);
        if (e) matcher.push(*e);
    }
    matcher.finish();
    return 0;
}

int run_gen(const std::string& profile, long long length, std::uint64_t seed, double rate) {
    if (const char* env = std::getenv("TPM_SEED")) {
        try {
            std::size_t used = 0;
            seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw tpm::ValidationError("TPM_SEED must be an unsigned integer, got '" +
                                       std::string(env) + "'");
        }
    }
    tpm::GenOptions opts;
    opts.seed = seed;
    opts.rate = rate;
    std::cout << tpm::print_word(tpm::gen_word(profile, static_cast<int>(length), opts));
    return 0;
}

int run_bench(const std::string& pattern_path, const std::vector<long long>& sizes,
              const std::vector<std::string>& algorithms, int repeats, const std::string& profile,
              std::uint64_t seed, double rate) {
    using Clock = std::chrono::steady_clock;
    const auto seconds_since = [](Clock::time_point start) {
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    const tpm::TimedAutomaton a = tpm::load_pattern(pattern_path);
    const auto pre_start = Clock::now();
    bool empty_language = false;
    const tpm::TimedSkipTables tables = tables_or_unit(a, &empty_language);
    std::cout << "# precompute_seconds=" << seconds_since(pre_start) << '\n';
    std::cout << "size,algorithm,run,wall_seconds,peak_buffer\n";

    tpm::GenOptions gen_opts;
    gen_opts.seed = seed;
    gen_opts.rate = rate;
    for (long long size : sizes) {
        const tpm::TimedWord w = tpm::gen_word(profile, static_cast<int>(size), gen_opts);
        for (const std::string& alg : algorithms) {
            double total_seconds = 0;
            std::size_t worst_peak = 0;
            for (int run = 1; run <= repeats; ++run) {
                std::size_t peak = w.size(); // offline algorithms hold the whole word
                const auto start = Clock::now();
                if (alg == "bruteforce") {
                    tpm::brute_force_match(a, w);
                } else if (alg == "online") {
                    tpm::online_match(a, w, tables, 0, &peak);
                } else {
                    tpm::fjs_match(a, w, tables);
                }
                const double elapsed = seconds_since(start);
                total_seconds += elapsed;
                worst_peak = std::max(worst_peak, peak);
                std::cout << size << ',' << alg << ',' << run << ',' << elapsed << ',' << peak
                          << '\n';
            }
            std::cout << size << ',' << alg << ",avg," << total_seconds / repeats << ','
                      << worst_peak << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"timed pattern matching over event logs"};
    app.require_subcommand(1);

    std::string pattern_path, word_path;
    std::string algorithm = "fjs";
    bool dump_skips = false, dump_zones = false;
    std::size_t max_buffer = 0;
    std::string profile = "simple-alternation";
    long long length = 0;
    std::uint64_t seed = 1;
    double rate = 1.0;
    std::vector<long long> sizes;
    std::vector<std::string> algorithms = {"fjs", "bruteforce"};
    int repeats = 5;

    CLI::App* match = app.add_subcommand("match", "match a pattern against a word file");
    match->add_option("pattern", pattern_path, "pattern file")->required();
    match->add_option("word", word_path, "word file")->required();
    match->add_option("--algorithm", algorithm, "matching algorithm")
        ->check(CLI::IsMember({"fjs", "bruteforce"}));
    match->add_flag("--dump-skips", dump_skips, "print the skip tables to stderr");
    match->add_flag("--dump-zones", dump_zones, "print the zone automaton to stderr");

    CLI::App* monitor = app.add_subcommand("monitor", "match a pattern against events on stdin");
    monitor->add_option("pattern", pattern_path, "pattern file")->required();
    monitor->add_option("--max-buffer", max_buffer,
                        "fail with exit code 4 if more events must be buffered (0: unbounded)");
    monitor->add_flag("--dump-skips", dump_skips, "print the skip tables to stderr");
    monitor->add_flag("--dump-zones", dump_zones, "print the zone automaton to stderr");

    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic word file on stdout");
    gen->add_option("--profile", profile, "workload shape")
        ->check(CLI::IsMember({"simple-alternation", "exp-superposition"}));
    gen->add_option("--length", length, "number of events")
        ->required()
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", seed, "generator seed (env TPM_SEED overrides)");
    gen->add_option("--rate", rate, "inter-arrival rate per second");

    CLI::App* bench = app.add_subcommand("bench", "time the matchers on generated words (CSV)");
    bench->add_option("pattern", pattern_path, "pattern file")->required();
    bench->add_option("--sizes", sizes, "word lengths to benchmark")
        ->required()
        ->delimiter(',');
    bench->add_option("--algorithms", algorithms, "algorithms to time")
        ->delimiter(',')
        ->check(CLI::IsMember({"fjs", "bruteforce", "online"}));
    bench->add_option("--repeats", repeats, "runs per cell")->check(CLI::PositiveNumber);
    bench->add_option("--profile", profile, "workload shape")
        ->check(CLI::IsMember({"simple-alternation", "exp-superposition"}));
    bench->add_option("--seed", seed, "generator seed");
    bench->add_option("--rate", rate, "inter-arrival rate per second");

    CLI11_PARSE(app, argc, argv);

    try {
        if (match->parsed())
            return run_match(pattern_path, word_path, algorithm, dump_skips, dump_zones);
        if (monitor->parsed()) return run_monitor(pattern_path, max_buffer, dump_skips, dump_zones);
        if (gen->parsed()) return run_gen(profile, length, seed, rate);
        if (bench->parsed())
            return run_bench(pattern_path, sizes, algorithms, repeats, profile, seed, rate);
    } catch (const tpm::OutOfOrderEvent& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const tpm::BufferOverflow& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const tpm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const tpm::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 70;
    }
    return 0;
}
