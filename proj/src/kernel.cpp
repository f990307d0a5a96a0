#include "markov/kernel.hpp"

#include <set>
#include <stdexcept>

#include "markov/errors.hpp"

namespace markov {

Kernel make_kernel(SetPtr source, SetPtr target, std::vector<Dist> rows) {
    if (static_cast<int>(rows.size()) != source->size())
        throw std::invalid_argument("kernel from '" + source->name() + "' needs " +
                                    std::to_string(source->size()) + " rows, got " +
                                    std::to_string(rows.size()));
    for (const auto& row : rows)
        if (!same_elements(row.carrier, target))
            throw SetMismatch("kernel row carrier differs from declared target '" + target->name() + "'");
    return Kernel{std::move(source), std::move(target), std::move(rows)};
}

Kernel make_kernel(SetPtr source, SetPtr target, const std::function<Dist(int)>& row_of) {
    std::vector<Dist> rows;
    rows.reserve(static_cast<std::size_t>(source->size()));
    for (int i = 0; i < source->size(); ++i) rows.push_back(row_of(i));
    return make_kernel(std::move(source), std::move(target), std::move(rows));
}

Kernel identity_kernel(SetPtr a) {
    return make_kernel(a, a, [&](int i) { return delta_dist(a, i); });
}

Kernel compose(const Kernel& f, const Kernel& g) {
    if (!same_elements(f.target, g.source))
        throw SetMismatch("compose: target '" + f.target->name() + "' does not match source '" +
                          g.source->name() + "'");
    return make_kernel(f.source, g.target, [&](int a) {
        std::map<int, Rat> acc;
        for (const auto& [b, p] : f.row(a).w)
            for (const auto& [c, q] : g.row(b).w) acc[c] += p * q;
        return make_dist(g.target, acc);
    });
}

Kernel tensor(const Kernel& f, const Kernel& g) {
    const SetPtr source = FinSet::product(f.source, g.source);
    const SetPtr target = FinSet::product(f.target, g.target);
    return make_kernel(source, target, [&](int ac) {
        const auto [a, c] = source->unpair(ac);
        std::map<int, Rat> acc;
        for (const auto& [b, p] : f.row(a).w)
            for (const auto& [d, q] : g.row(c).w) acc[target->pair_index(b, d)] = p * q;
        return make_dist(target, acc);
    });
}

Kernel copy_kernel(SetPtr a) {
    const SetPtr aa = FinSet::product(a, a);
    return make_kernel(a, aa, [&](int i) { return delta_dist(aa, aa->pair_index(i, i)); });
}

Kernel discard_kernel(SetPtr a) {
    const SetPtr one = FinSet::unit();
    return make_kernel(std::move(a), one, [&](int) { return delta_dist(one, 0); });
}

Kernel swap_kernel(SetPtr a, SetPtr b) {
    const SetPtr ab = FinSet::product(a, b);
    const SetPtr ba = FinSet::product(b, a);
    return make_kernel(ab, ba, [&](int i) {
        const auto [ia, ib] = ab->unpair(i);
        return delta_dist(ba, ba->pair_index(ib, ia));
    });
}

Kernel marginal(const Kernel& f, Side keep) {
    if (!f.target->is_product())
        throw NotAProduct("marginal: target '" + f.target->name() + "' is not a product");
    const SetPtr kept = (keep == Side::first) ? f.target->left() : f.target->right();
    return make_kernel(f.source, kept, [&](int a) {
        std::map<int, Rat> acc;
        for (const auto& [xy, p] : f.row(a).w) {
            const auto [x, y] = f.target->unpair(xy);
            acc[keep == Side::first ? x : y] += p;
        }
        return make_dist(kept, acc);
    });
}

bool is_deterministic(const Kernel& f) {
    for (const auto& row : f.rows)
        if (!point_mass_at(row)) return false;
    return true;
}

Kernel conditional(const Kernel& f) {
    if (!f.target->is_product())
        throw NotAProduct("conditional: target '" + f.target->name() + "' is not a product");
    const SetPtr x_set = f.target->left();
    const SetPtr y_set = f.target->right();
    const SetPtr source = FinSet::product(x_set, f.source);
    return make_kernel(source, y_set, [&](int xa) {
        const auto [x, a] = source->unpair(xa);
        std::map<int, Rat> fiber;
        Rat total(0);
        for (const auto& [xy, p] : f.row(a).w) {
            const auto [fx, fy] = f.target->unpair(xy);
            if (fx != x) continue;
            fiber[fy] += p;
            total += p;
        }
        if (total == 0) return uniform_dist(y_set);
        for (auto& [y, p] : fiber) p /= total;
        return make_dist(y_set, fiber);
    });
}

bool gas_equal(const Kernel& f, const Kernel& g, const Kernel& p) {
    if (!same_elements(f.source, g.source) || !same_elements(f.target, g.target))
        throw SetMismatch("gas_equal: f and g are kernels over different sets");
    const auto f_leaves = f.source->leaves();
    const SetPtr x_set = f_leaves.front();
    if (!same_elements(p.target, x_set))
        throw SetMismatch("gas_equal: witness target does not match the X factor");
    const auto p_leaves = p.source->leaves();
    const SetPtr a_set = p_leaves.front();
    const bool f_has_a = f_leaves.size() >= 2 && same_elements(f_leaves.back(), a_set);
    if (!f_has_a && a_set->size() != 1)
        throw SetMismatch("gas_equal: A factor of the witness does not occur in f's source");

    std::set<std::pair<int, int>> support;  // (x, a) with p(x|a,c) > 0 for some c
    for (int ac = 0; ac < p.source->size(); ++ac) {
        const int a = p.source->unpack(ac).front();
        for (const auto& [x, q] : p.row(ac).w) {
            (void)q;
            support.emplace(x, a);
        }
    }
    for (int s = 0; s < f.source->size(); ++s) {
        const auto leaf_idx = f.source->unpack(s);
        const int x = leaf_idx.front();
        const int a = f_has_a ? leaf_idx.back() : 0;
        if (!support.count({x, a})) continue;
        if (f.row(s) != g.row(s)) return false;
    }
    return true;
}

bool is_deterministic_given(const Kernel& f) {
    if (!f.target->is_product())
        throw NotAProduct("is_deterministic_given: target '" + f.target->name() + "' is not a product");
    for (const auto& row : f.rows) {
        std::map<int, int> seen;  // x -> first y observed
        for (const auto& [xy, p] : row.w) {
            (void)p;
            const auto [x, y] = f.target->unpair(xy);
            auto [it, fresh] = seen.emplace(x, y);
            if (!fresh && it->second != y) return false;
        }
    }
    return true;
}

DiamondRep diamond(const Kernel& f) {
    DiamondRep rep{marginal(f, Side::first), {}};
    const SetPtr y_set = f.target->right();
    for (int a = 0; a < f.source->size(); ++a) {
        std::map<int, std::map<int, Rat>> fibers;  // x -> weights over y
        std::map<int, Rat> totals;
        for (const auto& [xy, p] : f.row(a).w) {
            const auto [x, y] = f.target->unpair(xy);
            fibers[x][y] += p;
            totals[x] += p;
        }
        for (auto& [x, weights] : fibers) {
            for (auto& [y, p] : weights) p /= totals[x];
            rep.fibers.emplace(std::make_pair(a, x), make_dist(y_set, weights));
        }
    }
    return rep;
}

Kernel recompose(const DiamondRep& rep) {
    const Kernel& base = rep.base;
    if (rep.fibers.empty()) throw std::invalid_argument("recompose: no fibers");
    const SetPtr y_set = rep.fibers.begin()->second.carrier;
    const SetPtr target = FinSet::product(base.target, y_set);
    return make_kernel(base.source, target, [&](int a) {
        std::map<int, Rat> acc;
        for (const auto& [x, px] : base.row(a).w) {
            const Dist& fiber = rep.fibers.at({a, x});
            for (const auto& [y, q] : fiber.w) acc[target->pair_index(x, y)] = px * q;
        }
        return make_dist(target, acc);
    });
}

bool diamond_equivalent(const DiamondRep& lhs, const DiamondRep& rhs) {
    if (lhs.base != rhs.base) return false;
    for (int a = 0; a < lhs.base.source->size(); ++a)
        for (const auto& [x, px] : lhs.base.row(a).w) {
            (void)px;
            if (lhs.fibers.at({a, x}) != rhs.fibers.at({a, x})) return false;
        }
    return true;
}

Dist pushforward(const Kernel& f, const Dist& d) {
    if (!same_elements(d.carrier, f.source))
        throw SetMismatch("pushforward: distribution over '" + d.carrier->name() +
                          "' does not match kernel source '" + f.source->name() + "'");
    std::map<int, Rat> acc;
    for (const auto& [a, p] : d.w)
        for (const auto& [b, q] : f.row(a).w) acc[b] += p * q;
    return make_dist(f.target, acc);
}

}  // namespace markov
