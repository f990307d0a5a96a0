#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "markov/finset.hpp"
#include "markov/rat.hpp"

namespace markov {

/// Exact finitely supported probability distribution over a FinSet.
/// Canonical form: zero weights are never stored, weights sum to exactly 1.
struct Dist {
    SetPtr carrier;
    std::map<int, Rat> w;

    Rat prob(int index) const {
        auto it = w.find(index);
        return it == w.end() ? Rat(0) : it->second;
    }
    Rat prob(const std::string& label) const { return prob(carrier->index_of(label)); }

    bool operator==(const Dist& other) const {
        return same_elements(carrier, other.carrier) && w == other.w;
    }
    bool operator!=(const Dist& other) const { return !(*this == other); }
};

/// Strict weak order so distributions can key std::set / std::map.
/// Orders by carrier size, then by the weight map.
struct DistLess {
    bool operator()(const Dist& a, const Dist& b) const;
};

/// Validates weights (nonnegative, total exactly 1), drops zeros.
Dist make_dist(SetPtr carrier, const std::map<int, Rat>& weights);

Dist delta_dist(SetPtr carrier, int index);
Dist uniform_dist(SetPtr carrier);

/// Index of the single unit-weight element, if this is a point mass.
std::optional<int> point_mass_at(const Dist& d);

/// Convex mixture of distributions over one carrier; the outer weights are a
/// distribution on distributions with finite support. Validates both levels.
Dist flatten(const std::vector<std::pair<Dist, Rat>>& mixture);

}  // namespace markov
