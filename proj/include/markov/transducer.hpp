#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "markov/filtering.hpp"

namespace markov {

/// Finite-horizon controlled stochastic process: for n = 1..horizon, a map from
/// input tuples (i_1..i_{n-1}) to exact distributions over output tuples
/// (o_0..o_{n-1}). Level n lives at levels[n-1]; output tuples are indexed with
/// o_0 most significant, matching FinSet::power.
struct ControlledProcess {
    SetPtr inputs, outputs;
    int horizon = 0;
    std::vector<std::map<std::vector<int>, Dist>> levels;

    bool operator==(const ControlledProcess& other) const {
        return same_elements(inputs, other.inputs) && same_elements(outputs, other.outputs) &&
               horizon == other.horizon && levels == other.levels;
    }
    bool operator!=(const ControlledProcess& other) const { return !(*this == other); }
};

/// Behaviour of a machine from a starting belief: level n chains n-1 transitions
/// under the given inputs and produces the final output with the readout.
ControlledProcess unroll(const CombMachine& m, const Belief& start, int horizon);

struct CausalityWitness {
    int level = 0;  // the n whose marginalization fails
    std::vector<int> inputs;
};

/// First violation of the marginalization identity: dropping the last output of
/// level n and the last input of its tuple must give level n-1, for every tuple.
std::optional<CausalityWitness> causality_witness(const ControlledProcess& p);
bool check_causality(const ControlledProcess& p);

/// Conditions the process on one interaction (input, output): the new process of
/// horizon-1 is p_{n+1}(o,outs | i,ins) / p_1(o), defined when p_1(o) > 0.
std::variant<ControlledProcess, ImpossibleObservation> process_update(const ControlledProcess& p,
                                                                      int input, int output);

/// Equal unrolls at the given horizon.
bool behaviour_equal(const CombMachine& m1, const Belief& b1, const CombMachine& m2, const Belief& b2,
                     int horizon);

/// Finite-support convex mixture of processes over the same sets and horizon.
ControlledProcess mix_processes(const std::vector<std::pair<Rat, ControlledProcess>>& components);

}  // namespace markov
