#include "markov/transducer.hpp"

#include "markov/errors.hpp"

namespace markov {

static std::vector<std::vector<int>> all_tuples(int alphabet, int length) {
    std::vector<std::vector<int>> out{{}};
    for (int pos = 0; pos < length; ++pos) {
        std::vector<std::vector<int>> next;
        next.reserve(out.size() * static_cast<std::size_t>(alphabet));
        for (const auto& tuple : out)
            for (int sym = 0; sym < alphabet; ++sym) {
                auto extended = tuple;
                extended.push_back(sym);
                next.push_back(std::move(extended));
            }
        out = std::move(next);
    }
    return out;
}

ControlledProcess unroll(const CombMachine& m, const Belief& start, int horizon) {
    if (horizon < 1) throw HorizonMismatch("unroll: horizon must be at least 1");
    const int ni = m.m.inputs->size();
    const int no = m.m.outputs->size();
    ControlledProcess p{m.m.inputs, m.m.outputs, horizon, {}};
    for (int n = 1; n <= horizon; ++n) {
        std::map<std::vector<int>, Dist> level;
        const SetPtr tuple_set = FinSet::power(m.m.outputs, n);
        for (const auto& ins : all_tuples(ni, n - 1)) {
            const Dist joint = run_joint(m, start, ins, n - 1);
            // Outputs o_0..o_{n-2} from the transitions, o_{n-1} from the readout.
            std::map<int, Rat> weights;
            for (const auto& [sx, wgt] : joint.w) {
                const auto [s, prefix] = joint.carrier->unpair(sx);
                for (const auto& [last, q] : m.readout.row(s).w) weights[prefix * no + last] += wgt * q;
            }
            level.emplace(ins, make_dist(tuple_set, weights));
        }
        p.levels.push_back(std::move(level));
    }
    return p;
}

std::optional<CausalityWitness> causality_witness(const ControlledProcess& p) {
    const int no = p.outputs->size();
    for (int n = 2; n <= p.horizon; ++n) {
        const auto& level = p.levels[static_cast<std::size_t>(n - 1)];
        const auto& prev = p.levels[static_cast<std::size_t>(n - 2)];
        for (const auto& [ins, dist] : level) {
            std::map<int, Rat> marginalized;
            for (const auto& [tuple, wgt] : dist.w) marginalized[tuple / no] += wgt;
            const std::vector<int> shorter(ins.begin(), ins.end() - 1);
            const Dist& expected = prev.at(shorter);
            bool equal = marginalized.size() == expected.w.size();
            if (equal)
                for (const auto& [t, wgt] : marginalized)
                    if (expected.prob(t) != wgt) {
                        equal = false;
                        break;
                    }
            if (!equal) return CausalityWitness{n, ins};
        }
    }
    return std::nullopt;
}

bool check_causality(const ControlledProcess& p) { return !causality_witness(p).has_value(); }

std::variant<ControlledProcess, ImpossibleObservation> process_update(const ControlledProcess& p,
                                                                      int input, int output) {
    if (p.horizon < 2) throw HorizonMismatch("process_update: needs horizon >= 2");
    const int no = p.outputs->size();
    const Rat first = p.levels[0].at({}).prob(output);
    if (first == 0) return ImpossibleObservation{0};
    ControlledProcess q{p.inputs, p.outputs, p.horizon - 1, {}};
    for (int n = 1; n <= q.horizon; ++n) {
        std::map<std::vector<int>, Dist> level;
        const SetPtr tuple_set = FinSet::power(p.outputs, n);
        for (const auto& [ins, dist] : p.levels[static_cast<std::size_t>(n)]) {
            if (ins.empty() || ins.front() != input) continue;
            const std::vector<int> rest(ins.begin() + 1, ins.end());
            // Keep tuples beginning with the observed output; strip it and rescale.
            long long block = 1;
            for (int j = 0; j < n; ++j) block *= no;
            std::map<int, Rat> weights;
            for (const auto& [tuple, wgt] : dist.w) {
                if (tuple / block != output) continue;
                weights[static_cast<int>(tuple % block)] += wgt / first;
            }
            level.emplace(rest, make_dist(tuple_set, weights));
        }
        q.levels.push_back(std::move(level));
    }
    return q;
}

bool behaviour_equal(const CombMachine& m1, const Belief& b1, const CombMachine& m2, const Belief& b2,
                     int horizon) {
    if (!same_elements(m1.m.inputs, m2.m.inputs) || !same_elements(m1.m.outputs, m2.m.outputs))
        throw SetMismatch("behaviour_equal: machines over different input/output sets");
    return unroll(m1, b1, horizon) == unroll(m2, b2, horizon);
}

ControlledProcess mix_processes(const std::vector<std::pair<Rat, ControlledProcess>>& components) {
    if (components.empty()) throw std::invalid_argument("mix_processes: empty mixture");
    const ControlledProcess& head = components.front().second;
    Rat total(0);
    for (const auto& [weight, proc] : components) {
        if (weight < 0) throw std::invalid_argument("mix_processes: negative weight");
        total += weight;
        if (!same_elements(proc.inputs, head.inputs) || !same_elements(proc.outputs, head.outputs) ||
            proc.horizon != head.horizon)
            throw SetMismatch("mix_processes: components do not share sets and horizon");
    }
    if (total != 1) throw std::invalid_argument("mix_processes: weights sum to " + rat_to_string(total));
    ControlledProcess out{head.inputs, head.outputs, head.horizon, {}};
    for (int n = 1; n <= head.horizon; ++n) {
        std::map<std::vector<int>, Dist> level;
        const SetPtr tuple_set = FinSet::power(head.outputs, n);
        for (const auto& [ins, dist] : head.levels[static_cast<std::size_t>(n - 1)]) {
            std::map<int, Rat> weights;
            for (const auto& [weight, proc] : components) {
                if (weight == 0) continue;
                for (const auto& [tuple, wgt] : proc.levels[static_cast<std::size_t>(n - 1)].at(ins).w)
                    weights[tuple] += weight * wgt;
            }
            (void)dist;
            level.emplace(ins, make_dist(tuple_set, weights));
        }
        out.levels.push_back(std::move(level));
    }
    return out;
}

}  // namespace markov
