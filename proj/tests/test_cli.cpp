/* test_cli.cpp -- end-to-end checks of the command-line tool: output goldens,
 * exit codes, stream monitoring, generators, and the bench CSV shape */

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kCli = TPM_CLI_PATH;
const std::string kFixtures = TPM_FIXTURES_DIR;

struct CmdResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("tpm_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
    const auto path = scratch_dir() / name;
    std::ofstream(path) << content;
    return path;
}

/* Run "tpm <args>" through the shell, feeding stdin_text, capturing both
 * output streams and the exit code.  env_prefix lets tests set variables for
 * a single invocation ("TPM_SEED=7"). */
CmdResult run_cli(const std::string& args, const std::string& stdin_text = "",
                  const std::string& env_prefix = "") {
    static int counter = 0;
    const auto base = scratch_dir() / ("run" + std::to_string(counter++));
    const auto in_path = base.string() + ".in";
    const auto out_path = base.string() + ".out";
    const auto err_path = base.string() + ".err";
    std::ofstream(in_path) << stdin_text;
    const std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + kCli + " " + args +
                            " < " + in_path + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {exit_code, slurp(out_path), slurp(err_path)};
}

const std::string kGolden = "t:[3.7,3.9) t':(6,inf) dt:(2.1,inf)\n";

} // namespace

TEST_CASE("match prints the normalized match set") {
    const std::string files = kFixtures + "/example.pattern " + kFixtures + "/example.word";
    const CmdResult fjs = run_cli("match " + files);
    CHECK(fjs.exit_code == 0);
    CHECK(fjs.out == kGolden);

    const CmdResult brute = run_cli("match " + files + " --algorithm bruteforce");
    CHECK(brute.exit_code == 0);
    CHECK(brute.out == fjs.out);
}

TEST_CASE("match reports parse and validation errors with the right exit codes") {
    SECTION("malformed guard: exit 1, message names the transition") {
        const auto bad = write_file("bad_guard.pattern",
                                    "alphabet a\nclocks x\nlocation s0 initial\n"
                                    "location s1 accepting\ntrans s0 s1 $ guard x >> 1\n");
        const CmdResult r = run_cli("match " + bad.string() + " " + kFixtures + "/example.word");
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("transition s0 -> s1") != std::string::npos);
        CHECK(r.err.find("line 5") != std::string::npos);
    }
    SECTION("assumption violation: exit 2") {
        const auto bad = write_file("bad_structure.pattern",
                                    "alphabet a\nlocation s0 initial\n"
                                    "location s1 accepting\ntrans s0 s1 a\n");
        const CmdResult r = run_cli("match " + bad.string() + " " + kFixtures + "/example.word");
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("must be labelled $") != std::string::npos);
    }
    SECTION("missing file: exit 1") {
        const CmdResult r = run_cli("match /no/such/file.pattern " + kFixtures + "/example.word");
        CHECK(r.exit_code == 1);
    }
    SECTION("non-monotone word file: exit 2") {
        const auto bad = write_file("bad_word.word", "a 1\nb 0.5\n");
        const CmdResult r = run_cli("match " + kFixtures + "/example.pattern " + bad.string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("line 2") != std::string::npos);
    }
}

TEST_CASE("monitor replays a stream to the same output as match") {
    const CmdResult r = run_cli("monitor " + kFixtures + "/example.pattern",
                                slurp(kFixtures + "/example.word"));
    CHECK(r.exit_code == 0);
    CHECK(r.out == kGolden);
}

TEST_CASE("monitor handles stream errors with dedicated exit codes") {
    SECTION("empty stdin: empty output, exit 0") {
        const CmdResult r = run_cli("monitor " + kFixtures + "/example.pattern", "");
        CHECK(r.exit_code == 0);
        CHECK(r.out.empty());
    }
    SECTION("out-of-order event: exit 3 naming the index") {
        const CmdResult r = run_cli("monitor " + kFixtures + "/example.pattern", "a 2\nb 1\n");
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("event 2") != std::string::npos);
    }
    SECTION("buffer overflow under --max-buffer: exit 4") {
        /* Trials on this pattern stay alive for the whole stream, so five
         * events cannot fit in a four-event buffer. */
        const auto watchdog = write_file("watchdog.pattern",
                                         "alphabet a\nclocks x\nlocation s0 initial\n"
                                         "location s1\nlocation s2 accepting\n"
                                         "trans s0 s1 a reset x\ntrans s1 s1 a\n"
                                         "trans s1 s2 $ guard x >= 5\n");
        const CmdResult r = run_cli("monitor " + watchdog.string() + " --max-buffer 4",
                                    "a 1\na 2\na 3\na 4\na 5\n");
        CHECK(r.exit_code == 4);
        CHECK(r.err.find("4 events") != std::string::npos);
    }
}

TEST_CASE("gen is deterministic and honors TPM_SEED") {
    const CmdResult a = run_cli("gen --profile simple-alternation --length 50 --seed 5");
    const CmdResult b = run_cli("gen --profile simple-alternation --length 50 --seed 5");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);

    const CmdResult other = run_cli("gen --profile simple-alternation --length 50 --seed 6");
    CHECK(a.out != other.out);

    const CmdResult env = run_cli("gen --profile simple-alternation --length 50 --seed 5", "",
                                  "TPM_SEED=6");
    CHECK(env.out == other.out); // the environment wins over the flag

    const CmdResult bad_env = run_cli("gen --profile simple-alternation --length 5", "",
                                      "TPM_SEED=banana");
    CHECK(bad_env.exit_code == 2);

    const CmdResult empty = run_cli("gen --profile exp-superposition --length 0");
    CHECK(empty.exit_code == 0);
    CHECK(empty.out.empty());
}

TEST_CASE("generated words feed back into the matchers") {
    const CmdResult gen = run_cli("gen --profile simple-alternation --length 300 --seed 11");
    REQUIRE(gen.exit_code == 0);
    const auto word = write_file("gen.word", gen.out);

    const std::string files = kFixtures + "/simple.pattern " + word.string();
    const CmdResult fjs = run_cli("match " + files);
    const CmdResult brute = run_cli("match " + files + " --algorithm bruteforce");
    REQUIRE(fjs.exit_code == 0);
    REQUIRE(brute.exit_code == 0);
    CHECK(fjs.out == brute.out);
    CHECK(!fjs.out.empty()); // a,b alternations certainly contain matches
}

TEST_CASE("dump flags expose the preprocessing on stderr") {
    const CmdResult r = run_cli("match " + kFixtures + "/example.pattern " + kFixtures +
                                "/example.word --dump-skips --dump-zones");
    CHECK(r.exit_code == 0);
    CHECK(r.out == kGolden); // stdout stays clean
    CHECK(r.err.find("delta b: 4") != std::string::npos);
    CHECK(r.err.find("beta s2: 2") != std::string::npos);
    CHECK(r.err.find("edge") != std::string::npos);
}

TEST_CASE("bench emits per-run rows, an average row, and the precompute line") {
    const CmdResult r = run_cli("bench " + kFixtures +
                                "/example.pattern --sizes 100,200 --repeats 3 --algorithms fjs,online");
    REQUIRE(r.exit_code == 0);
    std::istringstream out(r.out);
    std::string line;
    REQUIRE(std::getline(out, line));
    CHECK(line.find("# precompute_seconds=") == 0);
    REQUIRE(std::getline(out, line));
    CHECK(line == "size,algorithm,run,wall_seconds,peak_buffer");
    int rows = 0, avg_rows = 0;
    while (std::getline(out, line)) {
        ++rows;
        if (line.find(",avg,") != std::string::npos) ++avg_rows;
    }
    CHECK(rows == 2 * 2 * (3 + 1)); // sizes x algorithms x (runs + average)
    CHECK(avg_rows == 2 * 2);
}
