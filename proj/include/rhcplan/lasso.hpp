#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rhcplan/ltl.hpp"

namespace rhcplan {

/// Finite representation prefix . cycle^omega of an ultimately periodic word
/// over 2^Pi. The cycle must be non-empty.
struct LassoWord {
    std::vector<LabelMask> prefix;
    std::vector<LabelMask> cycle;

    std::size_t positions() const { return prefix.size() + cycle.size(); }

    LabelMask at(std::size_t pos) const {
        return pos < prefix.size() ? prefix[pos] : cycle[pos - prefix.size()];
    }

    /// Position reached one step after `pos`, wrapping into the cycle.
    std::size_t next(std::size_t pos) const {
        return pos + 1 < positions() ? pos + 1 : prefix.size();
    }
};

namespace detail {

class LassoEval {
public:
    explicit LassoEval(const LassoWord& w) : w_(w) {
        if (w.cycle.empty()) throw std::invalid_argument("lasso cycle must be non-empty");
    }

    bool eval(const LtlNode* f, std::size_t pos) {
        auto key = std::pair<const LtlNode*, std::size_t>(f, pos);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool v = compute(f, pos);
        memo_.emplace(key, v);
        return v;
    }

private:
    bool compute(const LtlNode* f, std::size_t pos) {
        switch (f->kind) {
            case LtlKind::Atom:
                return (w_.at(pos) >> f->atom) & 1u;
            case LtlKind::True:
                return true;
            case LtlKind::False:
                return false;
            case LtlKind::Not:
                return !eval(f->lhs.get(), pos);
            case LtlKind::And:
                return eval(f->lhs.get(), pos) && eval(f->rhs.get(), pos);
            case LtlKind::Or:
                return eval(f->lhs.get(), pos) || eval(f->rhs.get(), pos);
            case LtlKind::Next:
                return eval(f->lhs.get(), w_.next(pos));
            case LtlKind::Eventually:
                return until_from(nullptr, f->lhs.get(), pos);
            case LtlKind::Always:
                return always_from(f->lhs.get(), pos);
            case LtlKind::Until:
                return until_from(f->lhs.get(), f->rhs.get(), pos);
        }
        throw std::logic_error("unreachable ltl kind");
    }

    // phi1 U phi2 along the orbit of pos; the orbit revisits a position after
    // at most positions() steps, at which point the until can no longer hold.
    bool until_from(const LtlNode* phi1, const LtlNode* phi2, std::size_t pos) {
        std::size_t p = pos;
        for (std::size_t steps = 0; steps <= w_.positions(); ++steps) {
            if (eval(phi2, p)) return true;
            if (phi1 != nullptr && !eval(phi1, p)) return false;
            p = w_.next(p);
        }
        return false;
    }

    bool always_from(const LtlNode* phi, std::size_t pos) {
        std::size_t p = pos;
        for (std::size_t steps = 0; steps <= w_.positions(); ++steps) {
            if (!eval(phi, p)) return false;
            p = w_.next(p);
        }
        return true;
    }

    const LassoWord& w_;
    std::map<std::pair<const LtlNode*, std::size_t>, bool> memo_;
};

} // namespace detail

/// Direct LTL semantics on an ultimately periodic word: true iff
/// prefix . cycle^omega satisfies f.
inline bool evaluate_word(const LtlPtr& f, const LassoWord& w) {
    return detail::LassoEval(w).eval(f.get(), 0);
}

} // namespace rhcplan
