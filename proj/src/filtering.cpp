#include "markov/filtering.hpp"

#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <string>

#include "markov/errors.hpp"

namespace markov {

BeliefMachine::BeliefMachine(CombMachine model) : model_(std::move(model)) {}

Dist BeliefMachine::predict(const Belief& b) const { return pushforward(model_.readout, b); }

Dist BeliefMachine::predict(const Belief& b, int input) const {
    const Kernel emission = mealy_emission(model_.m);
    std::map<int, Rat> acc;
    for (const auto& [h, p] : b.w)
        for (const auto& [o, q] : emission.row(emission.source->pair_index(input, h)).w) acc[o] += p * q;
    return make_dist(model_.m.outputs, acc);
}

FilterResult BeliefMachine::update(const Belief& b, int input, int output) const {
    return filter_step(model_, b, input, output);
}

BeliefMachine build_filter(const CombMachine& k) { return BeliefMachine(k); }

FilterResult filter_step(const CombMachine& k, const Belief& b, int input, int output) {
    if (!same_elements(b.carrier, k.m.states))
        throw SetMismatch("filter_step: belief is not over the state set");
    std::map<int, Rat> numerator;
    Rat denominator(0);
    for (const auto& [h, p] : b.w) {
        const int row = k.m.transition.source->pair_index(input, h);
        for (const auto& [oh2, q] : k.m.transition.row(row).w) {
            const auto [o, h2] = k.m.transition.target->unpair(oh2);
            if (o != output) continue;
            numerator[h2] += p * q;
            denominator += p * q;
        }
    }
    if (denominator == 0) return ImpossibleObservation{0};
    for (auto& [h2, p] : numerator) p /= denominator;
    return make_dist(k.m.states, numerator);
}

FilterResult filter_sequence(const CombMachine& k, const Belief& b0, const std::vector<int>& inputs,
                             const std::vector<int>& outputs) {
    if (inputs.size() != outputs.size())
        throw HorizonMismatch("filter_sequence: input and output traces differ in length");
    Belief current = b0;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        FilterResult next = filter_step(k, current, inputs[t], outputs[t]);
        if (std::holds_alternative<ImpossibleObservation>(next))
            return ImpossibleObservation{static_cast<int>(t)};
        current = std::get<Belief>(std::move(next));
    }
    return current;
}

FilterResult posterior_oracle(const CombMachine& k, const Belief& b0, const std::vector<int>& inputs,
                              const std::vector<int>& outputs) {
    if (inputs.size() != outputs.size())
        throw HorizonMismatch("posterior_oracle: input and output traces differ in length");
    const int n = static_cast<int>(inputs.size());
    const int no = k.m.outputs->size();
    const Dist joint = run_joint(k, b0, inputs, n);

    long long tuple = 0;
    for (int o : outputs) tuple = tuple * no + o;

    std::map<int, Rat> posterior;
    Rat total(0);
    for (const auto& [sx, p] : joint.w) {
        const auto [s, x] = joint.carrier->unpair(sx);
        if (x != static_cast<int>(tuple)) continue;
        posterior[s] += p;
        total += p;
    }
    if (total == 0) {
        // Locate the first prefix with zero probability, independently.
        for (int t = 1; t <= n; ++t) {
            const std::vector<int> prefix_inputs(inputs.begin(), inputs.begin() + t);
            const Dist prefix_joint = run_joint(k, b0, prefix_inputs, t);
            long long prefix = 0;
            for (int j = 0; j < t; ++j) prefix = prefix * no + outputs[static_cast<std::size_t>(j)];
            Rat mass(0);
            for (const auto& [sx, p] : prefix_joint.w) {
                const auto [s, x] = prefix_joint.carrier->unpair(sx);
                (void)s;
                if (x == static_cast<int>(prefix)) mass += p;
            }
            if (mass == 0) return ImpossibleObservation{t - 1};
        }
        return ImpossibleObservation{n - 1};  // unreachable for consistent run_joint
    }
    for (auto& [s, p] : posterior) p /= total;
    return make_dist(k.m.states, posterior);
}

std::function<Belief(const Belief&)> b_on_morphism(const Kernel& f) {
    return [f](const Belief& b) { return pushforward(f, b); };
}

std::vector<Belief> transpose_up(const Kernel& f) { return f.rows; }

Kernel transpose_down(SetPtr states, const std::vector<Belief>& beliefs) {
    return make_kernel(std::move(states), beliefs.at(0).carrier, std::vector<Dist>(beliefs));
}

static Kernel reorder_transition(const MealyMachine& k) {
    // product(I,H) -> product(O,H) composed with the swap, giving targets (H,O).
    return compose(k.transition, swap_kernel(k.outputs, k.states));
}

bool check_interpretation(const Kernel& psi, const UnifilarMachine& m, const CombMachine& k,
                          Wiring wiring) {
    const MealyMachine& ms = m.comb.m;
    if (!same_elements(ms.inputs, k.m.inputs) || !same_elements(ms.outputs, k.m.outputs))
        throw SetMismatch("check_interpretation: machines over different input/output sets");
    if (!same_elements(psi.source, ms.states) || !same_elements(psi.target, k.m.states))
        throw SetMismatch("check_interpretation: psi does not map machine states to model states");

    // (a) the machine's emission is psi followed by the model's emission
    const Kernel machine_emission = (wiring == Wiring::comb)
                                        ? m.comb.readout
                                        : mealy_emission(ms);
    const Kernel model_emission_through_psi =
        (wiring == Wiring::comb)
            ? compose(psi, k.readout)
            : compose(tensor(identity_kernel(ms.inputs), psi), mealy_emission(k.m));
    if (machine_emission != model_emission_through_psi) return false;

    // (b) psi ; transition  =  emit, update, psi  (as kernels (I x S) -> (H x O))
    const Kernel lhs = compose(tensor(identity_kernel(ms.inputs), psi), reorder_transition(k.m));
    const SetPtr is_set = ms.transition.source;
    const SetPtr ho_set = lhs.target;
    const Kernel rhs = make_kernel(is_set, ho_set, [&](int is) {
        const auto [i, s] = is_set->unpair(is);
        std::map<int, Rat> acc;
        for (int o = 0; o < ms.outputs->size(); ++o) {
            const Rat emitted = (wiring == Wiring::comb)
                                    ? m.comb.readout.prob(s, o)
                                    : machine_emission.prob(is, o);
            if (emitted == 0) continue;
            const Dist& upd = m.update.row(m.update.source->pair_index(o, is));
            for (const auto& [s2, pu] : upd.w)
                for (const auto& [h, ph] : psi.row(s2).w)
                    acc[ho_set->pair_index(h, o)] += emitted * pu * ph;
        }
        return make_dist(ho_set, acc);
    });
    return lhs == rhs;
}

FilterResult bayes_f(const Kernel& f, const Belief& prior, int observation) {
    if (!same_elements(prior.carrier, f.source))
        throw SetMismatch("bayes_f: prior is not over the parameter set");
    std::map<int, Rat> posterior;
    Rat evidence(0);
    for (const auto& [theta, p] : prior.w) {
        const Rat like = f.prob(theta, observation);
        if (like == 0) continue;
        posterior[theta] = p * like;
        evidence += p * like;
    }
    if (evidence == 0) return ImpossibleObservation{0};
    for (auto& [theta, p] : posterior) p /= evidence;
    return make_dist(f.source, posterior);
}

std::variant<HyperDist, ImpossibleObservation> bayes_x(const HyperDist& prior, int observation) {
    Rat evidence(0);
    for (const auto& [component, weight] : prior) evidence += weight * component.prob(observation);
    if (evidence == 0) return ImpossibleObservation{0};
    HyperDist posterior;
    for (const auto& [component, weight] : prior) {
        const Rat mass = weight * component.prob(observation);
        if (mass == 0) continue;
        posterior.emplace_back(component, mass / evidence);
    }
    return posterior;
}

CombMachine generator_machine(const Kernel& f) {
    const SetPtr inputs = FinSet::unit();
    const SetPtr theta = f.source;
    const SetPtr x = f.target;
    const SetPtr is_set = FinSet::product(inputs, theta);
    const SetPtr xs_set = FinSet::product(x, theta);
    const Kernel transition = make_kernel(is_set, xs_set, [&](int is) {
        const auto [i, th] = is_set->unpair(is);
        (void)i;
        std::map<int, Rat> row;
        for (const auto& [obs, p] : f.row(th).w) row[xs_set->pair_index(obs, th)] = p;
        return make_dist(xs_set, row);
    });
    return CombMachine{MealyMachine{inputs, x, theta, transition}, f};
}

bool conjugate_check(const Kernel& psi, const Kernel& f, const Kernel& u) {
    if (!same_elements(psi.target, f.source))
        throw SetMismatch("conjugate_check: psi does not land in the parameter set");
    if (!u.source->is_product() || !same_elements(u.source->left(), f.target) ||
        !same_elements(u.source->right(), psi.source) || !same_elements(u.target, psi.source))
        throw SetMismatch("conjugate_check: update is not product(X, S) -> S");
    const int ns = psi.source->size();
    const int nx = f.target->size();
    const int nt = f.source->size();
    const Kernel predictive = compose(psi, f);
    for (int s = 0; s < ns; ++s)
        for (int x = 0; x < nx; ++x) {
            const Rat pred = predictive.prob(s, x);
            std::map<int, Rat> updated;  // theta -> sum_{s'} u(s'|x,s) psi(theta|s')
            for (const auto& [s2, pu] : u.row(u.source->pair_index(x, s)).w)
                for (const auto& [theta, pt] : psi.row(s2).w) updated[theta] += pu * pt;
            for (int theta = 0; theta < nt; ++theta) {
                const Rat lhs = psi.prob(s, theta) * f.prob(theta, x);
                Rat rhs(0);
                if (auto it = updated.find(theta); it != updated.end()) rhs = pred * it->second;
                if (lhs != rhs) return false;
            }
        }
    return true;
}

bool exchangeability_check(const CombMachine& k) {
    if (k.m.inputs->size() != 1)
        throw NotAGenerator("exchangeability_check: input set must be trivial, got " +
                            std::to_string(k.m.inputs->size()) + " elements");
    const int no = k.m.outputs->size();
    for (int s = 0; s < k.m.states->size(); ++s) {
        const Dist joint = run_joint(k, delta_dist(k.m.states, s), {0, 0}, 2);
        for (const auto& [sx, p] : joint.w) {
            const auto [s2, tuple] = joint.carrier->unpair(sx);
            const int o0 = tuple / no, o1 = tuple % no;
            if (joint.prob(joint.carrier->pair_index(s2, o1 * no + o0)) != p) return false;
        }
    }
    return true;
}

std::function<std::vector<std::pair<Rat, Belief>>(const Belief&, int)> belief_mdp(const CombMachine& k) {
    return [k](const Belief& b, int input) {
        const Dist pred = pushforward(k.readout, b);
        std::vector<std::pair<Rat, Belief>> branches;
        for (const auto& [o, p] : pred.w)
            branches.emplace_back(p, std::get<Belief>(filter_step(k, b, input, o)));
        return branches;
    };
}

std::size_t default_belief_cap() {
    if (const char* env = std::getenv("MARKOV_MACHINES_MAX_BELIEFS")) {
        const long value = std::atol(env);
        if (value > 0) return static_cast<std::size_t>(value);
    }
    return 10000;
}

static Dist predict_by_wiring(const BeliefMachine& bm, const Belief& b, int input, Wiring wiring) {
    return (wiring == Wiring::comb) ? bm.predict(b) : bm.predict(b, input);
}

ReachableBeliefs reachable_beliefs(const CombMachine& k, const std::vector<Belief>& init, Wiring wiring,
                                   std::size_t cap) {
    const BeliefMachine bm(k);
    ReachableBeliefs result;
    std::set<Belief, DistLess> seen;
    std::deque<Belief> queue;
    const auto admit = [&](Belief b) {
        if (!seen.insert(b).second) return true;
        if (result.beliefs.size() >= cap) {
            result.truncated = true;
            return false;
        }
        result.beliefs.push_back(b);
        queue.push_back(std::move(b));
        return true;
    };
    for (const auto& b : init)
        if (!admit(b)) return result;
    while (!queue.empty()) {
        const Belief b = std::move(queue.front());
        queue.pop_front();
        for (int i = 0; i < k.m.inputs->size(); ++i) {
            const Dist pred = predict_by_wiring(bm, b, i, wiring);
            for (const auto& [o, p] : pred.w) {
                (void)p;
                if (!admit(std::get<Belief>(filter_step(k, b, i, o)))) return result;
            }
        }
    }
    return result;
}

InducedFilterMachine induced_filter_machine(const CombMachine& k, const std::vector<Belief>& beliefs,
                                            Wiring wiring) {
    const BeliefMachine bm(k);
    std::map<Belief, int, DistLess> index;
    std::vector<std::string> labels;
    for (const auto& b : beliefs) {
        if (!index.emplace(b, static_cast<int>(labels.size())).second)
            throw std::invalid_argument("induced_filter_machine: duplicate belief");
        labels.push_back("b" + std::to_string(labels.size()));
    }
    const SetPtr states = FinSet::make("beliefs", labels);
    const SetPtr is_set = FinSet::product(k.m.inputs, states);
    const SetPtr os_set = FinSet::product(k.m.outputs, states);

    std::vector<Dist> transition_rows(static_cast<std::size_t>(is_set->size()), Dist{});
    for (int i = 0; i < k.m.inputs->size(); ++i)
        for (int s = 0; s < states->size(); ++s) {
            const Belief& b = beliefs[static_cast<std::size_t>(s)];
            const Dist pred = predict_by_wiring(bm, b, i, wiring);
            std::map<int, Rat> row;
            for (const auto& [o, p] : pred.w) {
                const Belief next = std::get<Belief>(filter_step(k, b, i, o));
                const auto found = index.find(next);
                if (found == index.end())
                    throw NotClosed("induced_filter_machine: belief set is not closed under filtering");
                row[os_set->pair_index(o, found->second)] = p;
            }
            transition_rows[static_cast<std::size_t>(is_set->pair_index(i, s))] = make_dist(os_set, row);
        }
    const Kernel transition = make_kernel(is_set, os_set, std::move(transition_rows));

    // Readout = prediction; under the mealy wiring it is a placeholder (input 0).
    const Kernel readout = make_kernel(states, k.m.outputs, [&](int s) {
        return predict_by_wiring(bm, beliefs[static_cast<std::size_t>(s)], 0, wiring);
    });
    // Update built directly from the filter: deterministic on the support. Not via
    // extract_update, whose normalizer assumes input-independent emissions.
    const SetPtr upd_source = FinSet::product(k.m.outputs, is_set);
    const Kernel update = make_kernel(upd_source, states, [&](int ois) {
        const auto [o, is] = upd_source->unpair(ois);
        const auto [i, s] = is_set->unpair(is);
        const Belief& b = beliefs[static_cast<std::size_t>(s)];
        if (predict_by_wiring(bm, b, i, wiring).prob(o) == 0) return uniform_dist(states);
        return delta_dist(states, index.at(std::get<Belief>(filter_step(k, b, i, o))));
    });
    const MealyMachine mealy{k.m.inputs, k.m.outputs, states, transition};
    const CombMachine comb{mealy, readout};
    return InducedFilterMachine{UnifilarMachine{comb, update}, beliefs, transpose_down(states, beliefs)};
}

bool is_filter_morphism(const CombMachine& s_machine, const std::vector<Belief>& assigned,
                        const CombMachine& model, Wiring wiring) {
    if (!same_elements(s_machine.m.inputs, model.m.inputs) ||
        !same_elements(s_machine.m.outputs, model.m.outputs))
        throw SetMismatch("is_filter_morphism: machines over different input/output sets");
    if (assigned.size() != static_cast<std::size_t>(s_machine.m.states->size()))
        throw SetMismatch("is_filter_morphism: one belief per machine state required");
    const BeliefMachine bm(model);
    const SetPtr is_set = s_machine.m.transition.source;
    for (int i = 0; i < s_machine.m.inputs->size(); ++i)
        for (int s = 0; s < s_machine.m.states->size(); ++s) {
            const Belief& b = assigned[static_cast<std::size_t>(s)];
            const Dist pred = predict_by_wiring(bm, b, i, wiring);
            std::map<int, Rat> mass;  // output -> transition mass
            std::map<int, std::vector<int>> successors;
            for (const auto& [os2, p] : s_machine.m.transition.row(is_set->pair_index(i, s)).w) {
                const auto [o, s2] = s_machine.m.transition.target->unpair(os2);
                mass[o] += p;
                successors[o].push_back(s2);
            }
            for (int o = 0; o < s_machine.m.outputs->size(); ++o) {
                const Rat lhs = mass.count(o) ? mass[o] : Rat(0);
                if (lhs != pred.prob(o)) return false;
                if (lhs == 0) continue;
                const Belief next = std::get<Belief>(filter_step(model, b, i, o));
                for (int s2 : successors[o])
                    if (assigned[static_cast<std::size_t>(s2)] != next) return false;
            }
        }
    return true;
}

}  // namespace markov
