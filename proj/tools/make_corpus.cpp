// Regenerates the machine corpus used by the CLI tests. Usage:
//   make_corpus <output-dir>

#include <iostream>
#include <map>
#include <string>

#include "markov/io.hpp"

using namespace markov;

namespace {

LoadedMachine wrap(MachineKind kind, const std::string& name, MealyMachine m) {
    LoadedMachine lm;
    lm.kind = kind;
    lm.name = name;
    lm.mealy = std::move(m);
    if (kind != MachineKind::mealy) {
        lm.comb = std::get<CombMachine>(check_comb(lm.mealy));
        if (kind == MachineKind::unifilar) lm.unifilar = make_unifilar(*lm.comb);
    }
    return lm;
}

/// Persisting hidden state with an emission chosen per state.
MealyMachine persisting(const SetPtr& inputs, const SetPtr& outputs, const SetPtr& states,
                        const std::vector<Dist>& emissions) {
    SetPtr src = FinSet::product(inputs, states);
    SetPtr tgt = FinSet::product(outputs, states);
    Kernel t = make_kernel(src, tgt, [&](int idx) {
        int s = src->unpair(idx).second;
        std::map<int, Rat> w;
        for (const auto& [o, p] : emissions[static_cast<std::size_t>(s)].w)
            w[tgt->pair_index(o, s)] = p;
        return make_dist(tgt, w);
    });
    return MealyMachine{inputs, outputs, states, t};
}

LoadedMachine persist() {
    SetPtr i = FinSet::make("inputs", {"u"});
    SetPtr o = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"a", "b"});
    std::vector<Dist> em{make_dist(o, {{0, Rat(3, 4)}, {1, Rat(1, 4)}}),
                         make_dist(o, {{0, Rat(1, 4)}, {1, Rat(3, 4)}})};
    return wrap(MachineKind::unifilar, "persist", persisting(i, o, s, em));
}

LoadedMachine bernoulli_generator() {
    SetPtr i = FinSet::make("inputs", {"u"});
    SetPtr o = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"t1", "t2"});
    std::vector<Dist> em{make_dist(o, {{0, Rat(2, 3)}, {1, Rat(1, 3)}}),
                         make_dist(o, {{0, Rat(1, 6)}, {1, Rat(5, 6)}})};
    return wrap(MachineKind::unifilar, "bernoulli_generator", persisting(i, o, s, em));
}

LoadedMachine alternator() {
    SetPtr i = FinSet::make("inputs", {"u"});
    SetPtr o = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"e", "f"});
    SetPtr src = FinSet::product(i, s);
    SetPtr tgt = FinSet::product(o, s);
    Kernel t = make_kernel(src, tgt, [&](int idx) {
        int st = src->unpair(idx).second;
        return delta_dist(tgt, tgt->pair_index(st, 1 - st));
    });
    return wrap(MachineKind::unifilar, "alternator", MealyMachine{i, o, s, t});
}

LoadedMachine iid_coin() {
    SetPtr i = FinSet::make("inputs", {"u"});
    SetPtr o = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"s"});
    std::vector<Dist> em{uniform_dist(o)};
    return wrap(MachineKind::comb, "iid_coin", persisting(i, o, s, em));
}

LoadedMachine reset_machine() {
    SetPtr i = FinSet::make("inputs", {"i0", "i1"});
    SetPtr o = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"a", "b"});
    SetPtr src = FinSet::product(i, s);
    SetPtr tgt = FinSet::product(o, s);
    Kernel t = make_kernel(src, tgt, [&](int idx) {
        auto [ii, st] = src->unpair(idx);
        Rat p0 = st == 0 ? Rat(3, 4) : Rat(1, 4);
        Rat va = ii == 0 ? Rat(2, 3) : Rat(1, 5);
        std::map<int, Rat> w;
        w[tgt->pair_index(0, 0)] = p0 * va;
        w[tgt->pair_index(0, 1)] = p0 * (1 - va);
        w[tgt->pair_index(1, 0)] = (1 - p0) * va;
        w[tgt->pair_index(1, 1)] = (1 - p0) * (1 - va);
        return make_dist(tgt, w);
    });
    return wrap(MachineKind::comb, "reset_machine", MealyMachine{i, o, s, t});
}

LoadedMachine mealy_echo() {
    SetPtr io = FinSet::make("inputs", {"0", "1"});
    SetPtr out = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"h"});
    SetPtr src = FinSet::product(io, s);
    SetPtr tgt = FinSet::product(out, s);
    Kernel t = make_kernel(src, tgt, [&](int idx) {
        int ii = src->unpair(idx).first;
        return delta_dist(tgt, tgt->pair_index(ii, 0));
    });
    return wrap(MachineKind::mealy, "mealy_echo", MealyMachine{io, out, s, t});
}

LoadedMachine mealy_xor() {
    SetPtr io = FinSet::make("inputs", {"0", "1"});
    SetPtr out = FinSet::make("outputs", {"0", "1"});
    SetPtr s = FinSet::make("states", {"h0", "h1"});
    SetPtr src = FinSet::product(io, s);
    SetPtr tgt = FinSet::product(out, s);
    Kernel t = make_kernel(src, tgt, [&](int idx) {
        auto [ii, st] = src->unpair(idx);
        return delta_dist(tgt, tgt->pair_index(ii ^ st, st));
    });
    return wrap(MachineKind::mealy, "mealy_xor", MealyMachine{io, out, s, t});
}

Json kalman_1d() {
    Eigen::MatrixXd m(2, 1);
    m << 1, 1;
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(2, 2);
    noise(1, 1) = 1.0;
    KalmanSystem sys{GaussMorphism(m, Eigen::VectorXd::Zero(2), noise),
                     KalmanState(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)), 1};
    return kalman_system_to_json(sys);
}

void save(const std::string& dir, const std::string& name, const Json& j) {
    write_file(dir + "/" + name, j.dump(2) + "\n");
    std::cout << "wrote " << dir << "/" << name << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_corpus <output-dir>\n";
        return 2;
    }
    const std::string dir = argv[1];
    save(dir, "persist.json", machine_to_json(persist()));
    save(dir, "bernoulli_generator.json", machine_to_json(bernoulli_generator()));
    save(dir, "alternator.json", machine_to_json(alternator()));
    save(dir, "iid_coin.json", machine_to_json(iid_coin()));
    save(dir, "reset_machine.json", machine_to_json(reset_machine()));
    save(dir, "mealy_echo.json", machine_to_json(mealy_echo()));
    save(dir, "mealy_xor.json", machine_to_json(mealy_xor()));
    save(dir, "kalman_1d.json", kalman_1d());
    Json obs;
    obs["version"] = "v1";
    obs["observations"] = Json::array({Json::array({1.0})});
    save(dir, "kalman_1d_obs.json", obs);
    return 0;
}
