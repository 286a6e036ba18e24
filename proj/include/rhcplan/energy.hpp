#pragma once

#include <array>
#include <optional>
#include <queue>
#include <vector>

#include "rhcplan/product.hpp"

namespace rhcplan {

struct FStarSet {
    std::vector<std::uint32_t> members; // sorted
    std::vector<std::uint8_t> mask;

    bool contains(std::uint32_t s) const { return mask[s]; }
    std::size_t size() const { return members.size(); }
    bool operator==(const FStarSet& other) const { return members == other.members; }
};

struct EnergyTable {
    std::vector<double> J;
    double operator[](std::uint32_t s) const { return J[s]; }
};

namespace detail {

// SCC decomposition of the full product digraph (annotations ignored).
inline void product_sccs(const RelaxedProduct& p, std::vector<std::int32_t>& comp,
                         std::int32_t& ncomp) {
    const std::uint32_t n = p.num_states();
    comp.assign(n, -1);
    ncomp = 0;
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::uint32_t> scc_stack;
    std::int32_t counter = 0;
    struct Frame {
        std::uint32_t v;
        std::uint32_t next;
    };
    std::vector<Frame> frames;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        frames.push_back({root, p.out_begin(root)});
        index[root] = low[root] = counter++;
        scc_stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& fr = frames.back();
            bool descended = false;
            while (fr.next < p.out_end(fr.v)) {
                std::uint32_t t = p.edge(fr.next++).to;
                if (index[t] < 0) {
                    frames.push_back({t, p.out_begin(t)});
                    index[t] = low[t] = counter++;
                    scc_stack.push_back(t);
                    on_stack[t] = 1;
                    descended = true;
                    break;
                }
                if (on_stack[t]) low[fr.v] = std::min(low[fr.v], index[t]);
            }
            if (descended) continue;
            if (low[fr.v] == index[fr.v]) {
                for (;;) {
                    auto u = scc_stack.back();
                    scc_stack.pop_back();
                    on_stack[u] = 0;
                    comp[u] = ncomp;
                    if (u == fr.v) break;
                }
                ++ncomp;
            }
            auto v = fr.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
    }
}

} // namespace detail

/// Largest self-reachable subset of the accepting states: the fixpoint of
/// pruning accepting states that cannot reach another member through at least
/// one transition. Computed on the unweighted topology (h is ignored), which
/// is why label updates never change it. Equivalent formulation used here:
/// an accepting state belongs to F* iff it can reach a non-trivial SCC that
/// contains an accepting state.
inline FStarSet compute_f_star(const RelaxedProduct& p) {
    const std::uint32_t n = p.num_states();
    std::vector<std::int32_t> comp;
    std::int32_t ncomp = 0;
    detail::product_sccs(p, comp, ncomp);

    std::vector<std::uint8_t> comp_nontrivial(ncomp, 0), comp_accepting(ncomp, 0);
    std::vector<std::uint32_t> comp_size(ncomp, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        comp_size[comp[v]]++;
        if (p.is_accepting(v)) comp_accepting[comp[v]] = 1;
    }
    for (std::uint32_t v = 0; v < n; ++v)
        for (auto i = p.out_begin(v); i < p.out_end(v); ++i) {
            std::uint32_t t = p.edge(i).to;
            if (comp[v] == comp[t] && (v == t || comp_size[comp[v]] > 1))
                comp_nontrivial[comp[v]] = 1;
        }

    FStarSet f;
    f.mask.assign(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::uint8_t> reaches(n, 0); // can reach a recurrent accepting SCC
    for (std::uint32_t v = 0; v < n; ++v)
        if (comp_nontrivial[comp[v]] && comp_accepting[comp[v]]) {
            reaches[v] = 1;
            stack.push_back(v);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto i = p.in_begin(v); i < p.in_end(v); ++i) {
            auto s = p.edge_source(p.in_edge(i));
            if (!reaches[s]) {
                reaches[s] = 1;
                stack.push_back(s);
            }
        }
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (p.is_accepting(v) && reaches[v]) {
            f.mask[v] = 1;
            f.members.push_back(v);
        }
    return f;
}

/// True when some run from an initial state visits accepting states
/// infinitely often, i.e. a reachable non-trivial SCC contains an accepting
/// state. Structural edges only; on a strict product this is exactly the
/// model-checking emptiness question.
inline bool has_accepting_lasso(const RelaxedProduct& p) {
    const std::uint32_t n = p.num_states();
    std::vector<std::uint8_t> reach(n, 0);
    std::vector<std::uint32_t> stack;
    for (auto s : p.initial())
        if (!reach[s]) {
            reach[s] = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto i = p.out_begin(v); i < p.out_end(v); ++i) {
            auto t = p.edge(i).to;
            if (!reach[t]) {
                reach[t] = 1;
                stack.push_back(t);
            }
        }
    }
    std::vector<std::int32_t> comp;
    std::int32_t ncomp = 0;
    detail::product_sccs(p, comp, ncomp);
    std::vector<std::uint32_t> comp_size(ncomp, 0);
    for (std::uint32_t v = 0; v < n; ++v) comp_size[comp[v]]++;
    std::vector<std::uint8_t> nontrivial(ncomp, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        for (auto i = p.out_begin(v); i < p.out_end(v); ++i) {
            auto t = p.edge(i).to;
            if (comp[v] == comp[t] && (v == t || comp_size[comp[v]] > 1))
                nontrivial[comp[v]] = 1;
        }
    for (std::uint32_t v = 0; v < n; ++v)
        if (reach[v] && p.is_accepting(v) && nontrivial[comp[v]]) return true;
    return false;
}

/// Energy function J: zero on F*, otherwise the cheapest
/// finite-weight distance to F*. One backward multi-source Dijkstra from F*
/// over reversed edges; hard-blocked edges are excluded outright.
inline EnergyTable compute_energy(const RelaxedProduct& p, const FStarSet& f) {
    const std::uint32_t n = p.num_states();
    EnergyTable table;
    table.J.assign(n, kInf);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (auto s : f.members) {
        table.J[s] = 0.0;
        pq.push({0.0, s});
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > table.J[v]) continue;
        for (auto i = p.in_begin(v); i < p.in_end(v); ++i) {
            std::uint32_t ei = p.in_edge(i);
            const auto& e = p.edge(ei);
            if (e.hard_blocked) continue;
            std::uint32_t src = p.edge_source(ei);
            if (f.contains(src)) continue; // J pinned to zero on F*
            double nd = d + p.edge_weight(e);
            if (nd < table.J[src]) {
                table.J[src] = nd;
                pq.push({nd, src});
            }
        }
    }
    return table;
}

/// Distance: cheapest finite-weight trajectory from src to dst.
/// The empty trajectory gives d(s, s) = 0.
inline double shortest_distance(const RelaxedProduct& p, std::uint32_t src, std::uint32_t dst) {
    if (src == dst) return 0.0;
    std::vector<double> dist(p.num_states(), kInf);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (v == dst) return d;
        for (auto i = p.out_begin(v); i < p.out_end(v); ++i) {
            const auto& e = p.edge(i);
            if (e.hard_blocked) continue;
            double nd = d + p.edge_weight(e);
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                pq.push({nd, e.to});
            }
        }
    }
    return dist[dst];
}

struct DecreaseReport {
    std::vector<std::uint32_t> violators;
    bool ok() const { return violators.empty(); }
};

/// Energy-descent check: every state with finite positive energy has a successor
/// with strictly smaller energy reachable through an unblocked edge.
inline DecreaseReport verify_decrease(const RelaxedProduct& p, const FStarSet& f,
                                      const EnergyTable& table) {
    DecreaseReport report;
    for (std::uint32_t s = 0; s < p.num_states(); ++s) {
        double j = table.J[s];
        if (!(j > 0.0) || j == kInf) continue;
        bool found = false;
        for (auto i = p.out_begin(s); i < p.out_end(s) && !found; ++i) {
            const auto& e = p.edge(i);
            if (!e.hard_blocked && table.J[e.to] < j) found = true;
        }
        if (!found) report.violators.push_back(s);
        (void)f;
    }
    return report;
}

struct AcceptingLasso {
    std::vector<std::uint32_t> prefix; // from an initial state to the anchor
    std::vector<std::uint32_t> cycle;  // anchor ... anchor (anchor not repeated)
    double cycle_violation = 0.0;
    double cycle_weight = 0.0;
};

namespace detail {

// Lexicographic (violation, weight) Dijkstra over finite-weight edges.
struct LexDist {
    std::vector<double> v, w;
    std::vector<std::int32_t> parent_edge;
};

inline LexDist lex_dijkstra(const RelaxedProduct& p, const std::vector<std::uint32_t>& sources) {
    const std::uint32_t n = p.num_states();
    LexDist out;
    out.v.assign(n, kInf);
    out.w.assign(n, kInf);
    out.parent_edge.assign(n, -1);
    using Key = std::pair<std::pair<double, double>, std::uint32_t>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
    for (auto s : sources) {
        out.v[s] = 0.0;
        out.w[s] = 0.0;
        pq.push({{0.0, 0.0}, s});
    }
    while (!pq.empty()) {
        auto [key, s] = pq.top();
        pq.pop();
        if (key.first > out.v[s] || (key.first == out.v[s] && key.second > out.w[s])) continue;
        for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
            const auto& e = p.edge(i);
            if (e.hard_blocked) continue;
            double nv = key.first + e.violation;
            double nw = key.second + e.omega;
            if (nv < out.v[e.to] || (nv == out.v[e.to] && nw < out.w[e.to])) {
                out.v[e.to] = nv;
                out.w[e.to] = nw;
                out.parent_edge[e.to] = static_cast<std::int32_t>(i);
                pq.push({{nv, nw}, e.to});
            }
        }
    }
    return out;
}

} // namespace detail

/// Accepting lasso with the least per-period violation (weight breaks ties):
/// choose the F* anchor whose cheapest finite-weight return cycle minimizes
/// (sum v, sum omega), with the prefix from the initial states minimized the
/// same way. Returns nothing when no anchor has both a finite prefix and a
/// finite cycle.
inline std::optional<AcceptingLasso> find_min_violation_lasso(const RelaxedProduct& p,
                                                              const FStarSet& f) {
    auto from_init = detail::lex_dijkstra(p, p.initial());
    std::optional<AcceptingLasso> best;
    std::array<double, 4> best_key{kInf, kInf, kInf, kInf};
    for (auto anchor : f.members) {
        if (from_init.v[anchor] == kInf) continue;
        auto from_anchor = detail::lex_dijkstra(p, {anchor});
        // Cheapest cycle anchor -> ... -> anchor of length >= 1.
        std::pair<double, double> cyc{kInf, kInf};
        std::int32_t closing = -1;
        for (auto i = p.in_begin(anchor); i < p.in_end(anchor); ++i) {
            std::uint32_t ei = p.in_edge(i);
            const auto& e = p.edge(ei);
            if (e.hard_blocked) continue;
            std::uint32_t src = p.edge_source(ei);
            if (from_anchor.v[src] == kInf) continue;
            std::pair<double, double> cand{from_anchor.v[src] + e.violation,
                                           from_anchor.w[src] + e.omega};
            if (cand < cyc) {
                cyc = cand;
                closing = static_cast<std::int32_t>(ei);
            }
        }
        if (closing < 0) continue;
        std::array<double, 4> total{cyc.first, cyc.second, from_init.v[anchor],
                                    from_init.w[anchor]};
        if (total < best_key) {
            best_key = total;
            AcceptingLasso lasso;
            lasso.cycle_violation = cyc.first;
            lasso.cycle_weight = cyc.second;
            // Reconstruct the cycle backwards from the closing edge.
            std::vector<std::uint32_t> rev;
            std::uint32_t cur = p.edge_source(static_cast<std::uint32_t>(closing));
            while (cur != anchor) {
                rev.push_back(cur);
                cur = p.edge_source(static_cast<std::uint32_t>(from_anchor.parent_edge[cur]));
            }
            rev.push_back(anchor);
            lasso.cycle.assign(rev.rbegin(), rev.rend());
            std::vector<std::uint32_t> pre;
            cur = anchor;
            while (from_init.parent_edge[cur] >= 0) {
                pre.push_back(cur);
                cur = p.edge_source(static_cast<std::uint32_t>(from_init.parent_edge[cur]));
            }
            pre.push_back(cur);
            lasso.prefix.assign(pre.rbegin(), pre.rend());
            lasso.prefix.pop_back(); // anchor starts the cycle instead
            best = std::move(lasso);
        }
    }
    return best;
}

} // namespace rhcplan
