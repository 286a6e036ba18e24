#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhcplan {

/// A set of atomic propositions encoded as a bitmask. Bit i corresponds to
/// the i-th atom of the owning AtomSet; the ordering is fixed for the whole
/// session because evaluation vectors depend on it.
using LabelMask = std::uint32_t;

constexpr std::size_t kMaxAtoms = 16;

class unknown_atom : public std::runtime_error {
public:
    explicit unknown_atom(const std::string& name)
        : std::runtime_error("unknown atom: " + name) {}
};

/// Ordered universe of proposition names. Names are unique and the order is
/// stable, so label masks built against one AtomSet are comparable.
class AtomSet {
public:
    AtomSet() = default;

    explicit AtomSet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.size() > kMaxAtoms)
            throw std::invalid_argument("atom set larger than " + std::to_string(kMaxAtoms));
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty())
                throw std::invalid_argument("empty atom name");
            auto [it, fresh] = index_.emplace(names_[i], static_cast<std::uint32_t>(i));
            (void)it;
            if (!fresh)
                throw std::invalid_argument("duplicate atom name: " + names_[i]);
        }
    }

    AtomSet(std::initializer_list<const char*> names)
        : AtomSet(std::vector<std::string>(names.begin(), names.end())) {}

    std::size_t size() const { return names_.size(); }

    const std::string& name(std::size_t i) const { return names_.at(i); }

    const std::vector<std::string>& names() const { return names_; }

    /// Index of `name`, or -1 when the atom is not declared.
    int index_of(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : static_cast<int>(it->second);
    }

    std::uint32_t require(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw unknown_atom(name);
        return it->second;
    }

    LabelMask mask_of(const std::vector<std::string>& atoms) const {
        LabelMask m = 0;
        for (const auto& a : atoms) m |= LabelMask{1} << require(a);
        return m;
    }

    LabelMask mask_of(std::initializer_list<const char*> atoms) const {
        LabelMask m = 0;
        for (const char* a : atoms) m |= LabelMask{1} << require(a);
        return m;
    }

    LabelMask full_mask() const {
        return size() == 0 ? 0 : (LabelMask{1} << size()) - 1;
    }

    std::vector<std::string> names_of(LabelMask m) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < size(); ++i)
            if (m & (LabelMask{1} << i)) out.push_back(names_[i]);
        return out;
    }

    std::string format(LabelMask m) const {
        std::string s = "{";
        bool first = true;
        for (std::size_t i = 0; i < size(); ++i) {
            if (!(m & (LabelMask{1} << i))) continue;
            if (!first) s += ",";
            s += names_[i];
            first = false;
        }
        s += "}";
        return s;
    }

    bool operator==(const AtomSet& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::uint32_t> index_;
};

/// Characteristic 0/1 vector of a label set under the AtomSet ordering.
inline std::vector<int> eval_labels(LabelMask l, const AtomSet& atoms) {
    if (l & ~atoms.full_mask()) throw unknown_atom("bit outside atom universe");
    std::vector<int> v(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
        v[i] = (l >> i) & 1u;
    return v;
}

/// l1 distance between the evaluation vectors of two label sets.
inline int label_distance(LabelMask a, LabelMask b) {
    return std::popcount(a ^ b);
}

/// Dist(l, X): 0 when l is in X, otherwise the minimum rho to an element.
/// X must be non-empty.
inline int distance_to_set(LabelMask l, const std::vector<LabelMask>& xs) {
    if (xs.empty()) throw std::logic_error("distance_to_set: empty label set");
    int best = label_distance(l, xs.front());
    for (std::size_t i = 1; i < xs.size() && best > 0; ++i)
        best = std::min(best, label_distance(l, xs[i]));
    return best;
}

} // namespace rhcplan
