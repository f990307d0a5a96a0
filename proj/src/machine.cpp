#include "markov/machine.hpp"

#include "markov/errors.hpp"

namespace markov {

Kernel mealy_emission(const MealyMachine& m) { return marginal(m.transition, Side::first); }

std::variant<CombMachine, CombWitness> check_comb(const MealyMachine& m) {
    const Kernel emission = mealy_emission(m);  // product(I,S) -> O
    const int ni = m.inputs->size();
    const int ns = m.states->size();
    const int no = m.outputs->size();
    for (int s = 0; s < ns; ++s) {
        const Dist& reference = emission.row(m.transition.source->pair_index(0, s));
        for (int i = 1; i < ni; ++i) {
            const Dist& candidate = emission.row(m.transition.source->pair_index(i, s));
            if (candidate == reference) continue;
            for (int o = 0; o < no; ++o)
                if (candidate.prob(o) != reference.prob(o)) return CombWitness{s, 0, i, o};
        }
    }
    const Kernel readout = make_kernel(m.states, m.outputs, [&](int s) {
        return emission.row(m.transition.source->pair_index(0, s));
    });
    return CombMachine{m, readout};
}

Kernel extract_update(const CombMachine& m) {
    const SetPtr source = FinSet::product(m.m.outputs, m.m.transition.source);
    const SetPtr states = m.m.states;
    return make_kernel(source, states, [&](int ois) {
        const auto [o, is] = source->unpair(ois);
        const auto [i, s] = m.m.transition.source->unpair(is);
        (void)i;
        const Rat total = m.readout.prob(s, o);
        if (total == 0) return uniform_dist(states);
        std::map<int, Rat> weights;
        for (const auto& [os2, p] : m.m.transition.row(is).w) {
            const auto [o2, s2] = m.m.transition.target->unpair(os2);
            if (o2 != o) continue;
            weights[s2] += p / total;
        }
        return make_dist(states, weights);
    });
}

bool is_unifilar(const CombMachine& m) { return is_deterministic_given(m.m.transition); }

UnifilarMachine make_unifilar(const CombMachine& m) { return UnifilarMachine{m, extract_update(m)}; }

bool is_machine_morphism(const Kernel& map, const MealyMachine& m, const MealyMachine& n) {
    if (!same_elements(m.inputs, n.inputs) || !same_elements(m.outputs, n.outputs))
        throw SetMismatch("is_machine_morphism: machines over different input/output sets");
    if (!same_elements(map.source, m.states) || !same_elements(map.target, n.states))
        throw SetMismatch("is_machine_morphism: map does not go between the state sets");
    const Kernel lhs = compose(m.transition, tensor(identity_kernel(m.outputs), map));
    const Kernel rhs = compose(tensor(identity_kernel(m.inputs), map), n.transition);
    return lhs == rhs;
}

bool readout_commutes(const Kernel& map, const CombMachine& m, const CombMachine& n) {
    return m.readout == compose(map, n.readout);
}

Dist run_joint(const CombMachine& m, const Dist& prior, const std::vector<int>& inputs, int horizon) {
    if (static_cast<int>(inputs.size()) != horizon)
        throw HorizonMismatch("run_joint: got " + std::to_string(inputs.size()) + " inputs for horizon " +
                              std::to_string(horizon));
    if (!same_elements(prior.carrier, m.m.states))
        throw SetMismatch("run_joint: prior is not over the state set");
    const int no = m.m.outputs->size();

    // Weights over (flat output prefix, current state); the prefix index keeps
    // o_0 most significant, matching FinSet::power's nesting.
    std::map<std::pair<long long, int>, Rat> weights;
    for (const auto& [s, p] : prior.w) weights[{0, s}] = p;
    for (int input : inputs) {
        std::map<std::pair<long long, int>, Rat> next;
        for (const auto& [key, wgt] : weights) {
            const auto [prefix, s] = key;
            const int row = m.m.transition.source->pair_index(input, s);
            for (const auto& [os2, p] : m.m.transition.row(row).w) {
                const auto [o, s2] = m.m.transition.target->unpair(os2);
                next[{prefix * no + o, s2}] += wgt * p;
            }
        }
        weights = std::move(next);
    }
    const SetPtr tuple_set = FinSet::power(m.m.outputs, horizon);
    const SetPtr carrier = FinSet::product(m.m.states, tuple_set);
    std::map<int, Rat> out;
    for (const auto& [key, wgt] : weights) {
        const auto [prefix, s] = key;
        out[carrier->pair_index(s, static_cast<int>(prefix))] += wgt;
    }
    return make_dist(carrier, out);
}

}  // namespace markov
