#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "markov/dist.hpp"

namespace markov {

/// Exact stochastic kernel between finite sets: one distribution per source element.
struct Kernel {
    SetPtr source, target;
    std::vector<Dist> rows;  // indexed by source element

    const Dist& row(int source_index) const { return rows.at(static_cast<std::size_t>(source_index)); }
    const Dist& row(const std::string& label) const { return row(source->index_of(label)); }
    Rat prob(int source_index, int target_index) const { return row(source_index).prob(target_index); }

    bool operator==(const Kernel& other) const {
        return same_elements(source, other.source) && same_elements(target, other.target) &&
               rows == other.rows;
    }
    bool operator!=(const Kernel& other) const { return !(*this == other); }
};

/// Validates row count and row carriers.
Kernel make_kernel(SetPtr source, SetPtr target, std::vector<Dist> rows);
/// Builds rows by calling row_of(i) for each source index.
Kernel make_kernel(SetPtr source, SetPtr target, const std::function<Dist(int)>& row_of);

Kernel identity_kernel(SetPtr a);

/// Kleisli composition: (f ; g)(c|a) = sum_b f(b|a) * g(c|b).
Kernel compose(const Kernel& f, const Kernel& g);

/// (f (x) g)((b,d)|(a,c)) = f(b|a) * g(d|c), on lexicographic product sets.
Kernel tensor(const Kernel& f, const Kernel& g);

Kernel copy_kernel(SetPtr a);              // a -> (a,a)
Kernel discard_kernel(SetPtr a);           // a -> *
Kernel swap_kernel(SetPtr a, SetPtr b);    // (a,b) -> (b,a)

enum class Side { first, second };

/// Sums out the other coordinate of a kernel into a product set.
Kernel marginal(const Kernel& f, Side keep);

/// True iff every row is a point mass.
bool is_deterministic(const Kernel& f);

/// For f: A -> X x Y returns c: X x A -> Y with f(x,y|a) = f_X(x|a) * c(y|x,a)
/// on the support and the uniform distribution on zero-probability fibers.
Kernel conditional(const Kernel& f);

/// Equality of f,g: X x B x A -> Y on the support of p: A x C -> X, i.e. at all
/// (x,b,a) such that p(x|a,c) > 0 for some c. X is the first leaf of f's source
/// and A its last leaf; A is the first leaf of p's source. When f's source has a
/// single leaf, p's A-coordinate must be trivial (a one-element set).
bool gas_equal(const Kernel& f, const Kernel& g, const Kernel& p);

/// For f: A -> X x Y: true iff every positive-probability fiber over x is a point mass.
bool is_deterministic_given(const Kernel& f);

/// Finite encoding of the posterior factorization of f: A -> X x Y:
/// base is the X-marginal, and for every (a,x) with base(x|a) > 0 the fiber is
/// the normalized slice f(x,-|a) / base(x|a).
struct DiamondRep {
    Kernel base;                               // A -> X
    std::map<std::pair<int, int>, Dist> fibers;  // (a, x) on support -> Dist over Y
};

DiamondRep diamond(const Kernel& f);

/// Rebuilds A -> X x Y from a diamond representation: f(x,y|a) = base(x|a) * fiber[a,x](y).
Kernel recompose(const DiamondRep& rep);

/// True iff the two representations have equal bases and equal fibers wherever
/// the base is positive (off-support fibers are free).
bool diamond_equivalent(const DiamondRep& lhs, const DiamondRep& rhs);

/// (Pf)(d)(b) = sum_a d(a) * f(b|a).
Dist pushforward(const Kernel& f, const Dist& d);

}  // namespace markov
