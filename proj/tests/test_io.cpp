#include <doctest.h>

#include <cstdio>
#include <string>

#include "markov/errors.hpp"
#include "markov/io.hpp"

using namespace markov;

namespace {

Json persist_json() {
    return Json::parse(R"({
        "version": "v1",
        "kind": "unifilar",
        "name": "persist",
        "inputs": ["u"],
        "outputs": ["0", "1"],
        "states": ["a", "b"],
        "transition": [
            {"input": "u", "state": "a", "output": "0", "next_state": "a", "prob": "3/4"},
            {"input": "u", "state": "a", "output": "1", "next_state": "a", "prob": "1/4"},
            {"input": "u", "state": "b", "output": "0", "next_state": "b", "prob": "1/4"},
            {"input": "u", "state": "b", "output": "1", "next_state": "b", "prob": "3/4"}
        ]
    })");
}

Json kalman_json() {
    return Json::parse(R"({
        "version": "v1",
        "state_dim": 1,
        "obs_dim": 1,
        "M": [[1], [1]],
        "c": [0, 0],
        "noise": [[0, 0], [0, 1]],
        "prior_mean": [0],
        "prior_cov": [[1]]
    })");
}

}  // namespace

TEST_CASE("machine json round trip") {
    LoadedMachine m = machine_from_json(persist_json());
    CHECK(m.kind == MachineKind::unifilar);
    CHECK(m.name == "persist");
    REQUIRE(m.comb.has_value());
    REQUIRE(m.unifilar.has_value());
    CHECK(m.comb->readout.prob(0, 0) == Rat(3, 4));

    Json serialized = machine_to_json(m);
    LoadedMachine again = machine_from_json(serialized);
    CHECK(again.kind == m.kind);
    CHECK(again.name == m.name);
    CHECK(again.mealy.transition == m.mealy.transition);
    CHECK(again.comb->readout == m.comb->readout);

    CHECK(machine_to_json(again).dump(2) == serialized.dump(2));
}

TEST_CASE("machine json accepts an explicit matching readout") {
    Json j = persist_json();
    j["readout"] = Json::parse(R"([
        {"state": "a", "output": "0", "prob": "3/4"},
        {"state": "a", "output": "1", "prob": "1/4"},
        {"state": "b", "output": "0", "prob": "1/4"},
        {"state": "b", "output": "1", "prob": "3/4"}
    ])");
    CHECK(machine_from_json(j).comb.has_value());

    j["readout"][0]["prob"] = "1/4";
    j["readout"][1]["prob"] = "3/4";
    CHECK_THROWS_AS(machine_from_json(j), ParseError);
}

TEST_CASE("machine json validation") {
    Json bad_version = persist_json();
    bad_version["version"] = "v2";
    CHECK_THROWS_AS(machine_from_json(bad_version), ParseError);

    Json missing = persist_json();
    missing.erase("states");
    CHECK_THROWS_AS(machine_from_json(missing), ParseError);

    Json unnormalized = persist_json();
    unnormalized["transition"][0]["prob"] = "1/2";
    CHECK_THROWS_AS(machine_from_json(unnormalized), ParseError);

    Json uncovered = persist_json();
    uncovered["transition"].erase(3);
    uncovered["transition"].erase(2);
    CHECK_THROWS_AS(machine_from_json(uncovered), ParseError);

    Json duplicate = persist_json();
    duplicate["transition"][1] = duplicate["transition"][0];
    CHECK_THROWS_AS(machine_from_json(duplicate), ParseError);

    Json decimal = persist_json();
    decimal["transition"][0]["prob"] = "0.75";
    CHECK_THROWS_AS(machine_from_json(decimal), ParseError);

    Json unknown_label = persist_json();
    unknown_label["transition"][0]["state"] = "c";
    CHECK_THROWS_AS(machine_from_json(unknown_label), ParseError);

    Json dup_labels = persist_json();
    dup_labels["states"] = {"a", "a"};
    CHECK_THROWS_AS(machine_from_json(dup_labels), ParseError);

    Json empty_labels = persist_json();
    empty_labels["outputs"] = Json::array();
    CHECK_THROWS_AS(machine_from_json(empty_labels), ParseError);

    Json readout_on_mealy = persist_json();
    readout_on_mealy["kind"] = "mealy";
    readout_on_mealy["readout"] = Json::array();
    CHECK_THROWS_AS(machine_from_json(readout_on_mealy), ParseError);

    CHECK_THROWS_AS(kind_from_string("moore"), ParseError);
}

TEST_CASE("declared kinds are verified") {
    Json not_comb = Json::parse(R"({
        "version": "v1",
        "kind": "comb",
        "name": "echo",
        "inputs": ["0", "1"],
        "outputs": ["0", "1"],
        "states": ["h"],
        "transition": [
            {"input": "0", "state": "h", "output": "0", "next_state": "h", "prob": "1"},
            {"input": "1", "state": "h", "output": "1", "next_state": "h", "prob": "1"}
        ]
    })");
    try {
        machine_from_json(not_comb);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("comb condition") != std::string::npos);
        CHECK(std::string(e.what()).find("state 'h'") != std::string::npos);
    }

    not_comb["kind"] = "mealy";
    LoadedMachine mealy = machine_from_json(not_comb);
    CHECK(!mealy.comb.has_value());

    Json not_unifilar = Json::parse(R"({
        "version": "v1",
        "kind": "unifilar",
        "name": "spread",
        "inputs": ["u"],
        "outputs": ["0"],
        "states": ["a", "b"],
        "transition": [
            {"input": "u", "state": "a", "output": "0", "next_state": "a", "prob": "1/2"},
            {"input": "u", "state": "a", "output": "0", "next_state": "b", "prob": "1/2"},
            {"input": "u", "state": "b", "output": "0", "next_state": "b", "prob": "1"}
        ]
    })");
    CHECK_THROWS_AS(machine_from_json(not_unifilar), ParseError);
    not_unifilar["kind"] = "comb";
    CHECK(machine_from_json(not_unifilar).comb.has_value());
}

TEST_CASE("load_machine names the file in errors") {
    const std::string path = "/tmp/markov_io_broken.json";
    write_file(path, "{ not json");
    try {
        load_machine(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("dist json round trip") {
    SetPtr s = FinSet::make("s", {"a", "b", "c"});
    Dist d = make_dist(s, {{0, Rat(1, 3)}, {2, Rat(2, 3)}});
    Json j = dist_to_json(d);
    CHECK(j.size() == 2);
    CHECK(j["a"] == "1/3");
    CHECK(dist_from_json(s, j) == d);

    Json unknown = Json::object();
    unknown["z"] = "1";
    CHECK_THROWS_AS(dist_from_json(s, unknown), ParseError);

    Json short_mass = Json::object();
    short_mass["a"] = "1/3";
    CHECK_THROWS_AS(dist_from_json(s, short_mass), ParseError);

    Json numeric = Json::object();
    numeric["a"] = 1.0;
    CHECK_THROWS_AS(dist_from_json(s, numeric), ParseError);
}

namespace {

CombMachine tiny_machine() {
    SetPtr i = FinSet::make("i", {"u"});
    SetPtr o = FinSet::make("o", {"0", "1"});
    SetPtr s = FinSet::make("s", {"a", "b"});
    SetPtr src = FinSet::product(i, s);
    SetPtr tgt = FinSet::product(o, s);
    Kernel t = make_kernel(src, tgt, [&](int idx) {
        int st = src->unpair(idx).second;
        Rat p0 = st == 0 ? Rat(3, 4) : Rat(1, 4);
        return make_dist(tgt, {{tgt->pair_index(0, st), p0}, {tgt->pair_index(1, st), 1 - p0}});
    });
    return std::get<CombMachine>(check_comb(MealyMachine{i, o, s, t}));
}

}  // namespace

TEST_CASE("process json round trip") {
    CombMachine m = tiny_machine();
    ControlledProcess p = unroll(m, uniform_dist(m.m.states), 3);
    Json j = process_to_json(p);
    ControlledProcess q = process_from_json(j);
    CHECK(q == p);
    CHECK(process_to_json(q).dump(2) == j.dump(2));
}

TEST_CASE("process json validation") {
    CombMachine m = tiny_machine();
    Json good = process_to_json(unroll(m, uniform_dist(m.m.states), 2));

    Json bad_version = good;
    bad_version["version"] = "v0";
    CHECK_THROWS_AS(process_from_json(bad_version), ParseError);

    Json bad_horizon = good;
    bad_horizon["horizon"] = 0;
    CHECK_THROWS_AS(process_from_json(bad_horizon), ParseError);

    Json bad_level = good;
    bad_level["entries"][0]["level"] = 5;
    CHECK_THROWS_AS(process_from_json(bad_level), ParseError);

    Json bad_tuple = good;
    bad_tuple["entries"][0]["outputs"] = {"0", "1"};
    CHECK_THROWS_AS(process_from_json(bad_tuple), ParseError);

    Json duplicate = good;
    duplicate["entries"].push_back(duplicate["entries"][0]);
    CHECK_THROWS_AS(process_from_json(duplicate), ParseError);

    Json unnormalized = good;
    unnormalized["entries"][0]["prob"] = "1/3";
    CHECK_THROWS_AS(process_from_json(unnormalized), ParseError);

    Json uncovered = good;
    Json kept = Json::array();
    for (const auto& entry : uncovered["entries"])
        if (entry["level"] == 1) kept.push_back(entry);
    uncovered["entries"] = kept;
    CHECK_THROWS_AS(process_from_json(uncovered), ParseError);
}

TEST_CASE("kalman system json round trip") {
    KalmanSystem sys = kalman_system_from_json(kalman_json());
    CHECK(sys.step.in_dim() == 1);
    CHECK(sys.step.out_dim() == 2);
    CHECK(sys.obs_dim == 1);
    CHECK(sys.prior.sigma_p(0, 0) == 1.0);

    Json j = kalman_system_to_json(sys);
    KalmanSystem again = kalman_system_from_json(j);
    CHECK(again.step.M == sys.step.M);
    CHECK(again.step.c == sys.step.c);
    CHECK(again.step.noise == sys.step.noise);
    CHECK(again.prior.hbar == sys.prior.hbar);
    CHECK(again.prior.sigma_p == sys.prior.sigma_p);
    CHECK(kalman_system_to_json(again).dump(2) == j.dump(2));
}

TEST_CASE("kalman system json validation") {
    Json not_psd = kalman_json();
    not_psd["noise"] = {{-1, 0}, {0, 1}};
    CHECK_THROWS_AS(kalman_system_from_json(not_psd), ParseError);

    Json bad_shape = kalman_json();
    bad_shape["M"] = {{1}};
    CHECK_THROWS_AS(kalman_system_from_json(bad_shape), ParseError);

    Json zero_dim = kalman_json();
    zero_dim["state_dim"] = 0;
    CHECK_THROWS_AS(kalman_system_from_json(zero_dim), ParseError);

    Json text_entry = kalman_json();
    text_entry["c"][0] = "zero";
    CHECK_THROWS_AS(kalman_system_from_json(text_entry), ParseError);
}

TEST_CASE("observations json") {
    Json j = Json::parse(R"({"version": "v1", "observations": [[1.0], [2.5], [-3.0]]})");
    auto obs = observations_from_json(j, 1);
    REQUIRE(obs.size() == 3);
    CHECK(obs[1](0) == 2.5);

    CHECK_THROWS_AS(observations_from_json(j, 2), ParseError);

    Json text = Json::parse(R"({"version": "v1", "observations": [["one"]]})");
    CHECK_THROWS_AS(observations_from_json(text, 1), ParseError);
}

TEST_CASE("parse_prior") {
    SetPtr s = FinSet::make("s", {"a", "b"});
    CHECK(parse_prior("uniform", s) == uniform_dist(s));
    CHECK(parse_prior("9/10,1/10", s) == make_dist(s, {{0, Rat(9, 10)}, {1, Rat(1, 10)}}));
    CHECK(parse_prior("1, 0", s) == delta_dist(s, 0));

    CHECK_THROWS_AS(parse_prior("1/2", s), ParseError);
    CHECK_THROWS_AS(parse_prior("1/2,1/3", s), ParseError);
    CHECK_THROWS_AS(parse_prior("1/2,junk", s), ParseError);
}

TEST_CASE("parse_labels") {
    SetPtr o = FinSet::make("o", {"0", "1"});
    CHECK(parse_labels("0,0,1", o) == std::vector<int>{0, 0, 1});
    CHECK(parse_labels(" 0 , 1 ", o) == std::vector<int>{0, 1});
    CHECK(parse_labels("", o).empty());
    CHECK_THROWS_AS(parse_labels("2", o), ParseError);
}
