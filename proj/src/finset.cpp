#include "markov/finset.hpp"

#include <stdexcept>

#include "markov/errors.hpp"

namespace markov {

FinSet::FinSet(std::string name, std::vector<std::string> elements)
    : name_(std::move(name)), elems_(std::move(elements)) {
    if (elems_.empty()) throw std::invalid_argument("set '" + name_ + "' has no elements");
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (!index_.emplace(elems_[i], static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate element '" + elems_[i] + "' in set '" + name_ + "'");
    }
}

SetPtr FinSet::make(std::string name, std::vector<std::string> elements) {
    return std::make_shared<FinSet>(std::move(name), std::move(elements));
}

SetPtr FinSet::unit() {
    static const SetPtr one = make("1", {"*"});
    return one;
}

SetPtr FinSet::product(SetPtr left, SetPtr right) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(left->size()) * static_cast<std::size_t>(right->size()));
    for (const auto& a : left->elements())
        for (const auto& b : right->elements()) labels.push_back("(" + a + "," + b + ")");
    auto set = std::make_shared<FinSet>("(" + left->name() + "x" + right->name() + ")", std::move(labels));
    set->left_ = std::move(left);
    set->right_ = std::move(right);
    return set;
}

SetPtr FinSet::power(SetPtr a, int n) {
    if (n < 0) throw std::invalid_argument("negative power of a set");
    if (n == 0) return make(a->name() + "^0", {"()"});
    SetPtr acc = a;
    for (int i = 1; i < n; ++i) acc = product(acc, a);
    return acc;
}

std::optional<int> FinSet::find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int FinSet::index_of(const std::string& label) const {
    auto found = find(label);
    if (!found) throw std::out_of_range("no element '" + label + "' in set '" + name_ + "'");
    return *found;
}

std::pair<int, int> FinSet::unpair(int index) const {
    if (!is_product()) throw NotAProduct("set '" + name_ + "' is not a product");
    const int r = right_->size();
    return {index / r, index % r};
}

int FinSet::pair_index(int left_index, int right_index) const {
    if (!is_product()) throw NotAProduct("set '" + name_ + "' is not a product");
    return left_index * right_->size() + right_index;
}

std::vector<SetPtr> FinSet::leaves() const {
    if (!is_product()) return {std::make_shared<FinSet>(*this)};
    std::vector<SetPtr> out;
    auto l = left_->leaves();
    auto r = right_->leaves();
    out.insert(out.end(), l.begin(), l.end());
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

std::vector<int> FinSet::unpack(int index) const {
    if (!is_product()) return {index};
    auto [li, ri] = unpair(index);
    auto out = left_->unpack(li);
    auto r = right_->unpack(ri);
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

int FinSet::pack(const std::vector<int>& leaf_indices) const {
    std::size_t cursor = 0;
    // Recursive fold matching the leaves() order.
    struct Packer {
        const std::vector<int>& idx;
        std::size_t& cur;
        int operator()(const FinSet& set) const {
            if (!set.is_product()) {
                if (cur >= idx.size()) throw std::invalid_argument("too few leaf indices in pack()");
                return idx[cur++];
            }
            const int li = (*this)(*set.left());
            const int ri = (*this)(*set.right());
            return li * set.right()->size() + ri;
        }
    } packer{leaf_indices, cursor};
    const int result = packer(*this);
    if (cursor != leaf_indices.size()) throw std::invalid_argument("too many leaf indices in pack()");
    return result;
}

bool same_elements(const FinSet& a, const FinSet& b) { return a.elements() == b.elements(); }

bool same_elements(const SetPtr& a, const SetPtr& b) {
    if (a.get() == b.get()) return true;
    return same_elements(*a, *b);
}

}  // namespace markov
