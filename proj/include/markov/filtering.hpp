#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "markov/machine.hpp"

namespace markov {

/// A distribution over the hidden-state set, in canonical (zero-dropped) form,
/// so beliefs compare by structural equality.
using Belief = Dist;

/// The observation had predicted probability zero under the current belief.
/// Surfaced as a value, never replaced by an arbitrary posterior.
struct ImpossibleObservation {
    int step = 0;  // 0-based index of the offending observation

    bool operator==(const ImpossibleObservation& other) const { return step == other.step; }
};

using FilterResult = std::variant<Belief, ImpossibleObservation>;

/// Selects how downstream checks wire emissions: comb machines emit from the
/// state alone, Mealy machines from (input, state).
enum class Wiring { comb, mealy };

/// The machine a model induces on beliefs. Lazy: belief states are computed on
/// demand and the (infinite) belief space is never materialized.
class BeliefMachine {
public:
    explicit BeliefMachine(CombMachine model);

    const CombMachine& model() const { return model_; }

    /// Predicted output distribution under a belief (readout on beliefs).
    Dist predict(const Belief& b) const;
    /// Mealy variant: emission given the current input.
    Dist predict(const Belief& b, int input) const;

    /// One exact Bayes update; deterministic wherever the prediction is positive.
    FilterResult update(const Belief& b, int input, int output) const;

private:
    CombMachine model_;
};

/// Wraps the model in its belief machine.
BeliefMachine build_filter(const CombMachine& k);

/// b'(h') = sum_h b(h) k(h',o|h,i) / sum_{h,h''} b(h) k(h'',o|h,i).
/// Works for Mealy models too: the normalizer is the input-dependent emission.
FilterResult filter_step(const CombMachine& k, const Belief& b, int input, int output);

/// Left fold of filter_step. Reports the 0-based step index on failure.
FilterResult filter_sequence(const CombMachine& k, const Belief& b0, const std::vector<int>& inputs,
                             const std::vector<int>& outputs);

/// Independent route to the same posterior: materializes the exact joint of
/// (final state, output tuple) with run_joint, then conditions on the observed
/// tuple by fiber normalization. On an impossible tuple, reports the first
/// prefix length whose probability is zero, like filter_sequence does.
FilterResult posterior_oracle(const CombMachine& k, const Belief& b0, const std::vector<int>& inputs,
                              const std::vector<int>& outputs);

/// Action of the belief construction on kernels: pushforward of beliefs.
std::function<Belief(const Belief&)> b_on_morphism(const Kernel& f);

/// Transposes a kernel S -> H to the deterministic assignment s |-> row f(-|s).
std::vector<Belief> transpose_up(const Kernel& f);

/// Inverse of transpose_up: reads each belief as a kernel row.
Kernel transpose_down(SetPtr states, const std::vector<Belief>& beliefs);

/// Verifies that psi: states(m) -> states(k) interprets machine m as a filter
/// for model k: (a) m's emission equals psi followed by k's emission, and
/// (b) emitting then updating through m's update then psi equals psi followed
/// by k's transition, as kernels (I x S) -> (H x O). Both sides vanish wherever
/// the emission does, so exact equality is the almost-sure check.
/// Under Wiring::mealy the readouts are ignored and emissions are input-dependent.
bool check_interpretation(const Kernel& psi, const UnifilarMachine& m, const CombMachine& k,
                          Wiring wiring = Wiring::comb);

/// Exact Bayes rule for the model f: Theta -> X.
FilterResult bayes_f(const Kernel& f, const Belief& prior, int observation);

/// Finite-support distribution over distributions (all over one carrier).
using HyperDist = std::vector<std::pair<Dist, Rat>>;

/// Bayesian update of an unknown distribution: reweights each component d by
/// d(observation) and renormalizes.
std::variant<HyperDist, ImpossibleObservation> bayes_x(const HyperDist& prior, int observation);

/// The iid generator machine of a model f: Theta -> X: trivial inputs, states
/// Theta that persist, emissions f.
CombMachine generator_machine(const Kernel& f);

/// Conjugacy of a parametrized family psi: S -> Theta for the model f: Theta -> X
/// under the hyperparameter update u: product(X, S) -> S:
/// psi(th|s) f(x|th) = (psi;f)(x|s) * sum_{s'} u(s'|x,s) psi(th|s') for all s,x,th.
/// Both sides vanish off the predictive support, so exact equality suffices.
bool conjugate_check(const Kernel& psi, const Kernel& f, const Kernel& u);

/// For a trivial-input machine: the two-step joint over (state, o_0, o_1) from
/// every initial state is invariant under swapping the two outputs.
bool exchangeability_check(const CombMachine& k);

/// Output-marginalized belief transition: with the predicted probability of o,
/// move to filter_step(b, input, o). One branch per positive-probability output.
std::function<std::vector<std::pair<Rat, Belief>>(const Belief&, int)> belief_mdp(const CombMachine& k);

/// Reachable-belief cap: env MARKOV_MACHINES_MAX_BELIEFS, default 10000.
std::size_t default_belief_cap();

struct ReachableBeliefs {
    std::vector<Belief> beliefs;  // in discovery (BFS) order
    bool truncated = false;
};

/// Closure of the initial beliefs under filter_step over all positive-probability
/// (input, output) pairs. Stops with truncated=true when the cap is hit.
ReachableBeliefs reachable_beliefs(const CombMachine& k, const std::vector<Belief>& init,
                                   Wiring wiring = Wiring::comb, std::size_t cap = default_belief_cap());

/// The filtering machine restricted to an explicitly closed finite belief set:
/// states are the beliefs, transitions emit o with its predicted probability and
/// jump to the filtered belief, the readout is the prediction, psi is the
/// inclusion kernel (each state's row is its own belief). Throws NotClosed if
/// some one-step update leaves the set.
struct InducedFilterMachine {
    UnifilarMachine machine;
    std::vector<Belief> states;
    Kernel psi;
};

InducedFilterMachine induced_filter_machine(const CombMachine& k, const std::vector<Belief>& beliefs,
                                            Wiring wiring = Wiring::comb);

/// Morphism condition into the belief machine of `model` for the deterministic
/// assignment s |-> assigned[s]: for every (i,s,o), the transition mass of
/// s_machine to each successor class matches emission-times-update of the belief
/// machine. This is the adjunction's right-hand side without materializing any
/// belief closure.
bool is_filter_morphism(const CombMachine& s_machine, const std::vector<Belief>& assigned,
                        const CombMachine& model, Wiring wiring = Wiring::comb);

}  // namespace markov
