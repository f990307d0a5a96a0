#include "markov/dist.hpp"

#include <stdexcept>

#include "markov/errors.hpp"

namespace markov {

bool DistLess::operator()(const Dist& a, const Dist& b) const {
    if (a.carrier->size() != b.carrier->size()) return a.carrier->size() < b.carrier->size();
    return a.w < b.w;
}

Dist make_dist(SetPtr carrier, const std::map<int, Rat>& weights) {
    Dist d{std::move(carrier), {}};
    Rat total(0);
    for (const auto& [index, weight] : weights) {
        if (index < 0 || index >= d.carrier->size())
            throw std::invalid_argument("distribution index out of range for set '" + d.carrier->name() + "'");
        if (weight < 0)
            throw std::invalid_argument("negative weight in distribution over '" + d.carrier->name() + "'");
        if (weight == 0) continue;
        d.w.emplace(index, weight);
        total += weight;
    }
    if (total != 1)
        throw std::invalid_argument("weights sum to " + rat_to_string(total) + ", expected 1, over '" +
                                    d.carrier->name() + "'");
    return d;
}

Dist delta_dist(SetPtr carrier, int index) {
    std::map<int, Rat> w{{index, Rat(1)}};
    return make_dist(std::move(carrier), w);
}

Dist uniform_dist(SetPtr carrier) {
    const int n = carrier->size();
    std::map<int, Rat> w;
    for (int i = 0; i < n; ++i) w.emplace(i, Rat(1, n));
    return make_dist(std::move(carrier), w);
}

std::optional<int> point_mass_at(const Dist& d) {
    if (d.w.size() != 1) return std::nullopt;
    const auto& [index, weight] = *d.w.begin();
    if (weight != 1) return std::nullopt;  // unreachable for a valid Dist
    return index;
}

Dist flatten(const std::vector<std::pair<Dist, Rat>>& mixture) {
    if (mixture.empty()) throw std::invalid_argument("flatten() of an empty mixture");
    const SetPtr carrier = mixture.front().first.carrier;
    Rat outer_total(0);
    std::map<int, Rat> acc;
    for (const auto& [component, weight] : mixture) {
        if (!same_elements(component.carrier, carrier))
            throw SetMismatch("flatten(): mixture components over different sets");
        if (weight < 0) throw std::invalid_argument("flatten(): negative outer weight");
        outer_total += weight;
        for (const auto& [index, p] : component.w) acc[index] += weight * p;
    }
    if (outer_total != 1)
        throw std::invalid_argument("flatten(): outer weights sum to " + rat_to_string(outer_total));
    return make_dist(carrier, acc);
}

}  // namespace markov
