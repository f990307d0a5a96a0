#pragma once

#include <variant>
#include <vector>

#include "markov/kernel.hpp"

namespace markov {

/// Transition kernel over product(inputs, states) -> product(outputs, states).
/// The input is received before the output is produced.
struct MealyMachine {
    SetPtr inputs, outputs, states;
    Kernel transition;
};

/// A Mealy machine whose emitted output cannot depend on the current input,
/// together with the induced readout states -> outputs.
struct CombMachine {
    MealyMachine m;
    Kernel readout;
};

/// A comb machine together with an update kernel product(outputs, product(inputs, states)) -> states.
/// When the machine is unifilar the update rows are point masses wherever the
/// readout gives the output positive probability.
struct UnifilarMachine {
    CombMachine comb;
    Kernel update;
};

/// Counterexample to the comb condition: at `state`, the output marginal for
/// `input_a` and `input_b` disagrees at `output`.
struct CombWitness {
    int state, input_a, input_b, output;
};

/// Emission marginal product(inputs, states) -> outputs of a Mealy machine.
Kernel mealy_emission(const MealyMachine& m);

/// Verifies that the output marginal of the transition is the same for every
/// input; on success returns the machine with the derived readout.
std::variant<CombMachine, CombWitness> check_comb(const MealyMachine& m);

/// Canonical update: u(s'|o,i,s) = transition(o,s'|i,s) / readout(o|s) on the
/// support, uniform elsewhere. Recomposing with the readout restores the
/// transition exactly.
Kernel extract_update(const CombMachine& m);

/// True iff the transition is deterministic given the output factor.
bool is_unifilar(const CombMachine& m);

/// Pairs the machine with its canonical update.
UnifilarMachine make_unifilar(const CombMachine& m);

/// Mealy machine morphism condition for map: states(m) -> states(n):
/// transition_m ; (id_O (x) map) = (id_I (x) map) ; transition_n, exactly.
bool is_machine_morphism(const Kernel& map, const MealyMachine& m, const MealyMachine& n);

/// readout_m = map ; readout_n, exactly. For genuine comb machines this follows
/// from the morphism square, so it doubles as a consistency check.
bool readout_commutes(const Kernel& map, const CombMachine& m, const CombMachine& n);

/// Exact joint distribution over product(states, outputs^n) of the final state
/// and the n outputs produced by running the chained transitions from `prior`
/// under the given inputs. `horizon` must equal inputs.size().
Dist run_joint(const CombMachine& m, const Dist& prior, const std::vector<int>& inputs, int horizon);

}  // namespace markov
