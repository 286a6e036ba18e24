#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "rhcplan/dts.hpp"
#include "rhcplan/nba.hpp"

namespace rhcplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ProductState {
    std::uint32_t q = 0;
    std::uint32_t sh = 0;
    std::uint32_t ss = 0;
};

struct ProductEdge {
    std::uint32_t to = 0;
    std::uint32_t dts_edge = 0;  // index into Dts::edges()
    std::uint32_t hard_edge = 0; // index into hard NBA edges
    std::uint32_t soft_edge = 0; // index into soft NBA edges
    float omega = 0.0f;          // DTS transition weight
    std::uint16_t violation = 0; // v = Dist(L(q), X(ss, ss'))
    std::uint8_t hard_blocked = 0; // h = infinity when the hard move is not
                                   // enabled by the current known L(q)
};

/// Relaxed (or strict) product T x B_h x B_s. Soft moves always exist
/// structurally; their per-edge violation annotation prices how far the
/// current label is from one that would enable them. The edge set never
/// changes after construction -- label updates only rewrite annotations.
class RelaxedProduct {
public:
    RelaxedProduct(const Dts& dts, Nba hard, Nba soft, double beta)
        : hard_(std::move(hard)), soft_(std::move(soft)), beta_(beta) {
        nq_ = dts.num_states();
        nh_ = hard_.num_states;
        ns_ = soft_.num_states;
    }

    std::uint32_t id(std::uint32_t q, std::uint32_t sh, std::uint32_t ss) const {
        return (q * nh_ + sh) * ns_ + ss;
    }
    std::uint32_t id(const ProductState& s) const { return id(s.q, s.sh, s.ss); }
    ProductState unpack(std::uint32_t id) const {
        return {id / (nh_ * ns_), (id / ns_) % nh_, id % ns_};
    }
    std::uint32_t cell_of(std::uint32_t id) const { return id / (nh_ * ns_); }

    std::uint32_t num_states() const { return nq_ * nh_ * ns_; }
    std::size_t num_edges() const { return edges_.size(); }
    double beta() const { return beta_; }
    const Nba& hard() const { return hard_; }
    const Nba& soft() const { return soft_; }

    const std::vector<std::uint32_t>& initial() const { return initial_; }
    const std::vector<std::uint32_t>& accepting() const { return accepting_; }
    bool is_accepting(std::uint32_t s) const { return accepting_mask_[s]; }

    std::uint32_t out_begin(std::uint32_t s) const { return off_[s]; }
    std::uint32_t out_end(std::uint32_t s) const { return off_[s + 1]; }
    const ProductEdge& edge(std::uint32_t i) const { return edges_[i]; }

    std::uint32_t in_begin(std::uint32_t s) const { return roff_[s]; }
    std::uint32_t in_end(std::uint32_t s) const { return roff_[s + 1]; }
    /// Index of the i-th incoming edge (into the forward edge array).
    std::uint32_t in_edge(std::uint32_t i) const { return redges_[i]; }
    std::uint32_t edge_source(std::uint32_t edge_index) const { return edge_src_[edge_index]; }

    /// omega_P = h + omega + beta * v, with h absorbing to infinity.
    double edge_weight(const ProductEdge& e) const {
        if (e.hard_blocked) return kInf;
        return e.omega + beta_ * e.violation;
    }

    /// True when the state can leave through at least one finite-weight edge.
    bool has_finite_exit(std::uint32_t s) const { return alive_[s]; }

    int find_edge(std::uint32_t from, std::uint32_t to) const {
        for (auto i = off_[from]; i < off_[from + 1]; ++i)
            if (edges_[i].to == to) return static_cast<int>(i);
        return -1;
    }

    /// Recomputes h and v for all edges leaving states that project to cell q.
    /// Returns the number of edges whose annotation changed.
    std::size_t refresh_cell(const Dts& dts, std::uint32_t q) {
        std::size_t changed = 0;
        LabelMask l = dts.label(q);
        std::uint32_t first = id(q, 0, 0), last = id(q, nh_ - 1, ns_ - 1);
        for (std::uint32_t s = first; s <= last; ++s) {
            bool any_alive = false;
            for (auto i = off_[s]; i < off_[s + 1]; ++i) {
                auto& e = edges_[i];
                std::uint8_t blocked = strict_ ? 0 : !hard_.edges[e.hard_edge].enabled_by(l);
                std::uint16_t v =
                    strict_ ? 0
                            : static_cast<std::uint16_t>(
                                  distance_to_set(l, soft_.edges[e.soft_edge].labels));
                if (blocked != e.hard_blocked || v != e.violation) ++changed;
                e.hard_blocked = blocked;
                e.violation = v;
                if (!blocked) any_alive = true;
            }
            alive_[s] = any_alive;
        }
        return changed;
    }

    friend RelaxedProduct build_relaxed_product(const Dts&, const Nba&, const Nba&, double);
    friend RelaxedProduct build_strict_product(const Dts&, const Nba&, const Nba&);

private:
    void build(const Dts& dts, bool strict) {
        strict_ = strict;
        if (hard_.atoms.size() != dts.atoms().size() || soft_.atoms.size() != dts.atoms().size())
            throw std::invalid_argument("product requires a shared atom universe");
        const std::uint64_t states = static_cast<std::uint64_t>(nq_) * nh_ * ns_;
        if (states == 0 || states > (std::uint64_t{1} << 31))
            throw std::invalid_argument("product state space empty or too large");
        std::uint64_t edge_estimate = static_cast<std::uint64_t>(dts.edges().size()) *
                                      hard_.edges.size() * soft_.edges.size();
        if (edge_estimate > 120'000'000)
            throw std::length_error("product edge set too large (" +
                                    std::to_string(edge_estimate) + " edges)");

        off_.assign(states + 1, 0);
        edges_.clear();
        if (!strict) edges_.reserve(edge_estimate);
        for (std::uint32_t q = 0; q < nq_; ++q) {
            LabelMask l = dts.label(q);
            for (std::uint32_t sh = 0; sh < nh_; ++sh) {
                for (std::uint32_t ss = 0; ss < ns_; ++ss) {
                    std::uint32_t src = id(q, sh, ss);
                    for (auto di = dts.out_begin(q); di < dts.out_end(q); ++di) {
                        const auto& de = dts.edges()[di];
                        for (auto hi = hard_.out_begin[sh]; hi < hard_.out_begin[sh + 1]; ++hi) {
                            const auto& he = hard_.edges[hi];
                            bool h_enabled = he.enabled_by(l);
                            if (strict && !h_enabled) continue;
                            for (auto si = soft_.out_begin[ss]; si < soft_.out_begin[ss + 1];
                                 ++si) {
                                const auto& se = soft_.edges[si];
                                if (strict && !se.enabled_by(l)) continue;
                                ProductEdge e;
                                e.to = id(de.to, he.to, se.to);
                                e.dts_edge = di;
                                e.hard_edge = hi;
                                e.soft_edge = si;
                                e.omega = static_cast<float>(de.weight);
                                e.hard_blocked = strict ? 0 : !h_enabled;
                                e.violation =
                                    strict ? 0
                                           : static_cast<std::uint16_t>(
                                                 distance_to_set(l, se.labels));
                                edges_.push_back(e);
                            }
                        }
                    }
                    off_[src + 1] = static_cast<std::uint32_t>(edges_.size());
                }
            }
        }
        // off_ entries are cumulative already because states were visited in
        // id order; fill gaps for states without edges.
        for (std::size_t i = 1; i < off_.size(); ++i)
            if (off_[i] < off_[i - 1]) off_[i] = off_[i - 1];

        for (auto sh0 : hard_.initial)
            for (auto ss0 : soft_.initial) initial_.push_back(id(dts.initial(), sh0, ss0));
        if (initial_.empty()) throw std::invalid_argument("product has no initial states");

        accepting_mask_.assign(states, 0);
        for (std::uint32_t q = 0; q < nq_; ++q)
            for (auto fh : hard_.accepting)
                for (auto fs : soft_.accepting) {
                    accepting_mask_[id(q, fh, fs)] = 1;
                    accepting_.push_back(id(q, fh, fs));
                }
        std::sort(accepting_.begin(), accepting_.end());

        edge_src_.assign(edges_.size(), 0);
        for (std::uint32_t s = 0; s < states; ++s)
            for (auto i = off_[s]; i < off_[s + 1]; ++i) edge_src_[i] = s;

        roff_.assign(states + 1, 0);
        for (const auto& e : edges_) roff_[e.to + 1]++;
        for (std::size_t i = 1; i < roff_.size(); ++i) roff_[i] += roff_[i - 1];
        redges_.assign(edges_.size(), 0);
        std::vector<std::uint32_t> cursor(roff_.begin(), roff_.end() - 1);
        for (std::uint32_t i = 0; i < edges_.size(); ++i)
            redges_[cursor[edges_[i].to]++] = i;

        alive_.assign(states, 0);
        for (std::uint32_t s = 0; s < states; ++s)
            for (auto i = off_[s]; i < off_[s + 1]; ++i)
                if (!edges_[i].hard_blocked) {
                    alive_[s] = 1;
                    break;
                }
    }

    Nba hard_, soft_;
    double beta_ = 1.0;
    bool strict_ = false;
    std::uint32_t nq_ = 0, nh_ = 0, ns_ = 0;
    std::vector<ProductEdge> edges_;
    std::vector<std::uint32_t> off_;
    std::vector<std::uint32_t> edge_src_;
    std::vector<std::uint32_t> redges_, roff_;
    std::vector<std::uint32_t> initial_;
    std::vector<std::uint32_t> accepting_;
    std::vector<std::uint8_t> accepting_mask_;
    std::vector<std::uint8_t> alive_;
};

/// Relaxed product: soft transitions are label-free, hard moves carry
/// an infinite h annotation when the current label does not enable them.
inline RelaxedProduct build_relaxed_product(const Dts& dts, const Nba& hard, const Nba& soft,
                                            double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    RelaxedProduct p(dts, hard, soft, beta);
    p.build(dts, false);
    return p;
}

/// Strict product of the transition system with both automata: every move must be enabled
/// by the current label; h == 0 and v == 0 on all edges.
inline RelaxedProduct build_strict_product(const Dts& dts, const Nba& hard, const Nba& soft) {
    RelaxedProduct p(dts, hard, soft, 1.0);
    p.build(dts, true);
    return p;
}

/// Classic two-way product, realized as a strict triple product with a one-state
/// universal automaton in the hard slot.
inline RelaxedProduct build_strict_product(const Dts& dts, const Nba& b) {
    return build_strict_product(dts, universal_nba(dts.atoms()), b);
}

/// Total weight of a finite trajectory (sum of h + w + beta*v per edge);
/// infinity as soon as one edge
/// carries h = infinity.
inline double trajectory_weight(const RelaxedProduct& p, std::span<const std::uint32_t> traj) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        int e = p.find_edge(traj[i], traj[i + 1]);
        if (e < 0) throw non_transition(traj[i], traj[i + 1]);
        total += p.edge_weight(p.edge(static_cast<std::uint32_t>(e)));
    }
    return total;
}

/// Violation cost of a soft-automaton move under the current label:
/// Dist(L(q), X(ss, ss')). The move must exist structurally.
inline int violation_cost(const Nba& soft, std::uint32_t ss, std::uint32_t ss2,
                          LabelMask current_label) {
    for (auto i = soft.out_begin[ss]; i < soft.out_begin[ss + 1]; ++i)
        if (soft.edges[i].to == ss2)
            return distance_to_set(current_label, soft.edges[i].labels);
    throw std::invalid_argument("soft automaton has no transition " + std::to_string(ss) +
                                " -> " + std::to_string(ss2));
}

/// Text listing of states and annotated edges, for diagnostics and goldens.
inline void dump_product(const RelaxedProduct& p, const Dts& dts, std::ostream& os) {
    os << "states " << p.num_states() << " edges " << p.num_edges() << "\n";
    for (std::uint32_t s = 0; s < p.num_states(); ++s) {
        auto ps = p.unpack(s);
        if (p.out_begin(s) == p.out_end(s) && !p.is_accepting(s)) continue;
        os << (p.is_accepting(s) ? "*" : " ") << s << " = (q" << ps.q << ",h" << ps.sh << ",s"
           << ps.ss << ") label " << dts.atoms().format(dts.label(ps.q)) << "\n";
        for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
            const auto& e = p.edge(i);
            os << "    -> " << e.to << " w=" << e.omega << " v=" << e.violation
               << (e.hard_blocked ? " h=inf" : " h=0") << "\n";
        }
    }
}

} // namespace rhcplan
