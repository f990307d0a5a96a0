#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "markov/io.hpp"
#include "markov/transducer.hpp"

using namespace markov;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

std::string corpus(const std::string& name) {
    return std::string(MARKOV_CORPUS_DIR) + "/" + name;
}

CmdResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string capture = "/tmp/markov_cli_capture_" + std::to_string(getpid()) + "_" +
                                std::to_string(counter++) + ".txt";
    const std::string cmd =
        std::string(MARKOV_CLI_PATH) + " " + args + " > " + capture + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.out = buf.str();
    std::remove(capture.c_str());
    return r;
}

std::vector<Json> json_lines(const std::string& text) {
    std::vector<Json> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(Json::parse(line));
    return lines;
}

}  // namespace

TEST_CASE("cli filter runs the worked example") {
    CmdResult r = run_cli("filter --machine " + corpus("persist.json") + " --outputs 0,0");
    REQUIRE(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0]["predicted"]["0"] == "1/2");
    CHECK(lines[0]["posterior"]["a"] == "3/4");
    CHECK(lines[1]["posterior"]["a"] == "9/10");
    CHECK(lines[2]["posterior"]["a"] == "9/10");
    CHECK(lines[2]["posterior"]["b"] == "1/10");
}

TEST_CASE("cli filter with an empty trace reports the prior") {
    CmdResult r = run_cli("filter --machine " + corpus("persist.json") + " --prior 9/10,1/10");
    REQUIRE(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["posterior"]["a"] == "9/10");
    CHECK(lines[0]["posterior"]["b"] == "1/10");
}

TEST_CASE("cli filter exits with 4 on an impossible observation") {
    CmdResult r = run_cli("filter --machine " + corpus("alternator.json") +
                          " --prior 1,0 --outputs 0,0");
    CHECK(r.code == 4);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 1);  // the partial trace up to the failure
    CHECK(lines[0]["step"] == 0);
}

TEST_CASE("cli filter handles mealy machines with explicit inputs") {
    CmdResult r = run_cli("filter --machine " + corpus("mealy_xor.json") +
                          " --inputs 1,1 --outputs 1,1");
    REQUIRE(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[2]["posterior"]["h0"] == "1");

    CmdResult missing = run_cli("filter --machine " + corpus("mealy_xor.json") + " --outputs 1,1");
    CHECK(missing.code == 2);
}

TEST_CASE("cli filter writes to a file with --out") {
    const std::string out_file = "/tmp/markov_cli_trace.jsonl";
    CmdResult r = run_cli("filter --machine " + corpus("persist.json") + " --outputs 0 --out " +
                          out_file);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto lines = json_lines(buf.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["posterior"]["a"] == "3/4");
    std::remove(out_file.c_str());
}

TEST_CASE("cli check exchangeability") {
    CmdResult r = run_cli("check --machine " + corpus("iid_coin.json") +
                          " --suite exchangeability");
    REQUIRE(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["pass"] == true);
    CHECK(lines[0]["checks"][0]["name"] == "exchangeability");

    CmdResult alt = run_cli("check --machine " + corpus("alternator.json") +
                            " --suite exchangeability");
    CHECK(alt.code == 3);
    CHECK(json_lines(alt.out)[0]["pass"] == false);
}

TEST_CASE("cli check reports a comb witness for a mealy machine") {
    CmdResult r = run_cli("check --machine " + corpus("mealy_echo.json") + " --suite comb");
    CHECK(r.code == 3);
    auto report = json_lines(r.out)[0];
    CHECK(report["pass"] == false);
    const Json& witness = report["checks"][0]["witness"];
    CHECK(witness["state"] == "h");
    CHECK(witness["input_a"].is_string());
    CHECK(witness["output"].is_string());
}

TEST_CASE("cli check all passes on the whole corpus") {
    for (const std::string name :
         {"persist.json", "bernoulli_generator.json", "alternator.json", "iid_coin.json",
          "reset_machine.json", "mealy_echo.json", "mealy_xor.json"}) {
        CmdResult r = run_cli("check --machine " + corpus(name) + " --suite all");
        CHECK(r.code == 0);
        auto report = json_lines(r.out)[0];
        CHECK(report["pass"] == true);
    }
}

TEST_CASE("cli oracle agrees with the filter and is byte deterministic") {
    const std::string cmd = "oracle --machine " + corpus("persist.json") +
                            " --trials 200 --horizon 5 --seed 7";
    CmdResult first = run_cli(cmd);
    REQUIRE(first.code == 0);
    auto report = json_lines(first.out)[0];
    CHECK(report["trials"] == 200);
    CHECK(report["mismatches"] == 0);
    CHECK(report["matches"] == 200);

    CmdResult second = run_cli(cmd);
    CHECK(second.out == first.out);

    CmdResult parallel = run_cli(cmd + " --parallel 4");
    CHECK(parallel.code == 0);
    CHECK(parallel.out == first.out);
}

TEST_CASE("cli oracle covers machines with impossible traces") {
    CmdResult r = run_cli("oracle --machine " + corpus("alternator.json") +
                          " --trials 50 --horizon 4 --seed 11");
    REQUIRE(r.code == 0);
    auto report = json_lines(r.out)[0];
    CHECK(report["mismatches"] == 0);
    CHECK(report["impossible"].get<int>() > 0);
}

TEST_CASE("cli oracle with horizon zero matches trivially") {
    CmdResult r = run_cli("oracle --machine " + corpus("reset_machine.json") +
                          " --trials 10 --horizon 0 --seed 3");
    REQUIRE(r.code == 0);
    auto report = json_lines(r.out)[0];
    CHECK(report["matches"] == 10);
    CHECK(report["impossible"] == 0);
}

TEST_CASE("cli unroll emits the process of the machine") {
    CmdResult r = run_cli("unroll --machine " + corpus("iid_coin.json") + " --horizon 3");
    REQUIRE(r.code == 0);
    ControlledProcess p = process_from_json(json_lines(r.out)[0]);
    CHECK(p.horizon == 3);
    for (const auto& [tuple, prob] : p.levels[2].at({0, 0}).w) {
        (void)tuple;
        CHECK(prob == Rat(1, 8));
    }

    CmdResult again = run_cli("unroll --machine " + corpus("iid_coin.json") + " --horizon 3");
    CHECK(again.out == r.out);
}

TEST_CASE("cli unroll output supports external conditioning") {
    CmdResult r = run_cli("unroll --machine " + corpus("persist.json") + " --horizon 3");
    REQUIRE(r.code == 0);
    ControlledProcess p = process_from_json(json_lines(r.out)[0]);

    auto conditioned = std::get<ControlledProcess>(process_update(p, 0, 0));
    LoadedMachine lm = load_machine(corpus("persist.json"));
    const Belief posterior =
        std::get<Belief>(filter_step(*lm.comb, uniform_dist(lm.mealy.states), 0, 0));
    CHECK(conditioned == unroll(*lm.comb, posterior, 2));
}

TEST_CASE("cli kalman runs the one-dimensional example") {
    CmdResult r = run_cli("kalman --machine " + corpus("kalman_1d.json") + " --outputs " +
                          corpus("kalman_1d_obs.json"));
    REQUIRE(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(std::fabs(lines[0]["mean"][0].get<double>() - 0.5) < 1e-12);
    CHECK(std::fabs(lines[0]["cov"][0][0].get<double>() - 0.5) < 1e-12);
}

TEST_CASE("cli rejects malformed invocations with exit code 2") {
    CHECK(run_cli("filter --machine /nonexistent.json --outputs 0").code == 2);
    CHECK(run_cli("filter --machine " + corpus("persist.json") + " --outputs 7").code == 2);
    CHECK(run_cli("filter --machine " + corpus("persist.json") + " --prior 1/2,1/3").code == 2);
    CHECK(run_cli("check --machine " + corpus("persist.json") + " --suite bogus").code == 2);
    CHECK(run_cli("oracle --machine " + corpus("persist.json") + " --trials 5").code == 2);
    CHECK(run_cli("unroll --machine " + corpus("persist.json") + " --horizon 0").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("").code == 2);
}
