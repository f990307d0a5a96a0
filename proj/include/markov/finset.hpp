#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace markov {

class FinSet;
using SetPtr = std::shared_ptr<const FinSet>;

/// A named finite set with a fixed element order.
///
/// Sets built by product() additionally remember their two factors; indices of a
/// product set are mixed-radix with the left factor most significant, i.e.
/// index(a,b) = index(a)*|B| + index(b), and element labels are "(a,b)".
/// Equality of sets for composability purposes compares element labels only
/// (see same_elements); names and product structure are bookkeeping.
class FinSet {
public:
    FinSet(std::string name, std::vector<std::string> elements);

    static SetPtr make(std::string name, std::vector<std::string> elements);

    /// The one-element set "1" with element "*". Shared instance.
    static SetPtr unit();

    static SetPtr product(SetPtr left, SetPtr right);

    /// Left-nested n-fold product of a set with itself. power(a,0) is a fresh
    /// singleton {"()"} (the empty tuple), power(a,1) is a itself.
    static SetPtr power(SetPtr a, int n);

    const std::string& name() const { return name_; }
    int size() const { return static_cast<int>(elems_.size()); }
    const std::vector<std::string>& elements() const { return elems_; }
    const std::string& label(int index) const { return elems_.at(static_cast<std::size_t>(index)); }

    std::optional<int> find(const std::string& label) const;
    /// Like find() but throws std::out_of_range naming the set and label.
    int index_of(const std::string& label) const;

    bool is_product() const { return left_ != nullptr; }
    SetPtr left() const { return left_; }
    SetPtr right() const { return right_; }

    /// Splits a product index into (left index, right index).
    std::pair<int, int> unpair(int index) const;
    int pair_index(int left_index, int right_index) const;

    /// Flattened factor list; a non-product set is its own single leaf.
    std::vector<SetPtr> leaves() const;
    /// Leaf indices of an element, in leaves() order.
    std::vector<int> unpack(int index) const;
    int pack(const std::vector<int>& leaf_indices) const;

private:
    std::string name_;
    std::vector<std::string> elems_;
    std::map<std::string, int> index_;
    SetPtr left_, right_;
};

/// True when the two sets have identical element label lists (same order).
bool same_elements(const FinSet& a, const FinSet& b);
bool same_elements(const SetPtr& a, const SetPtr& b);

}  // namespace markov
