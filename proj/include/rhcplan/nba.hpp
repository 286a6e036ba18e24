#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rhcplan/atoms.hpp"
#include "rhcplan/lasso.hpp"

namespace rhcplan {

struct NbaEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::vector<LabelMask> labels; // sorted, explicit elements of 2^Pi

    bool enabled_by(LabelMask l) const {
        return std::binary_search(labels.begin(), labels.end(), l);
    }
};

/// Nondeterministic Buchi automaton over the alphabet 2^Pi. Transition labels
/// are stored as explicit sets of label masks; parallel (from,to) edges are
/// merged when finalize() runs.
struct Nba {
    AtomSet atoms;
    std::uint32_t num_states = 0;
    std::vector<std::uint32_t> initial;   // sorted, unique
    std::vector<std::uint32_t> accepting; // sorted, unique
    std::vector<NbaEdge> edges;           // sorted by (from, to) after finalize
    std::vector<std::uint32_t> out_begin; // CSR offsets, size num_states + 1

    bool is_accepting(std::uint32_t s) const {
        return std::binary_search(accepting.begin(), accepting.end(), s);
    }

    bool is_initial(std::uint32_t s) const {
        return std::binary_search(initial.begin(), initial.end(), s);
    }

    std::size_t out_degree(std::uint32_t s) const {
        return out_begin[s + 1] - out_begin[s];
    }

    /// Sorts and merges edges, builds the CSR index, and validates that all
    /// referenced states exist.
    void finalize() {
        auto check = [&](std::uint32_t s, const char* what) {
            if (s >= num_states)
                throw std::invalid_argument(std::string("nba: dangling ") + what +
                                            " state " + std::to_string(s));
        };
        auto dedup = [](std::vector<std::uint32_t>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        dedup(initial);
        dedup(accepting);
        for (auto s : initial) check(s, "initial");
        for (auto s : accepting) check(s, "accepting");

        std::sort(edges.begin(), edges.end(), [](const NbaEdge& a, const NbaEdge& b) {
            return a.from != b.from ? a.from < b.from : a.to < b.to;
        });
        std::vector<NbaEdge> merged;
        for (auto& e : edges) {
            check(e.from, "edge source");
            check(e.to, "edge target");
            std::sort(e.labels.begin(), e.labels.end());
            e.labels.erase(std::unique(e.labels.begin(), e.labels.end()), e.labels.end());
            if (e.labels.empty()) continue;
            if (!merged.empty() && merged.back().from == e.from && merged.back().to == e.to) {
                auto& dst = merged.back().labels;
                dst.insert(dst.end(), e.labels.begin(), e.labels.end());
                std::sort(dst.begin(), dst.end());
                dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
            } else {
                merged.push_back(std::move(e));
            }
        }
        edges = std::move(merged);

        out_begin.assign(num_states + 1, 0);
        for (const auto& e : edges) out_begin[e.from + 1]++;
        for (std::size_t i = 1; i < out_begin.size(); ++i) out_begin[i] += out_begin[i - 1];
    }
};

/// One-state NBA accepting every word over the given atoms.
inline Nba universal_nba(const AtomSet& atoms) {
    Nba b;
    b.atoms = atoms;
    b.num_states = 1;
    b.initial = {0};
    b.accepting = {0};
    NbaEdge e;
    e.from = 0;
    e.to = 0;
    for (LabelMask l = 0; l <= atoms.full_mask(); ++l) {
        e.labels.push_back(l);
        if (atoms.full_mask() == 0) break;
    }
    b.edges.push_back(std::move(e));
    b.finalize();
    return b;
}

/// True iff some run of `b` over prefix . cycle^omega visits an accepting
/// state infinitely often. Checked on the product of the automaton with the
/// lasso positions: acceptance is the existence of a reachable cycle through
/// a node whose automaton component is accepting.
inline bool nba_accepts_lasso(const Nba& b, const LassoWord& w) {
    if (w.cycle.empty()) throw std::invalid_argument("lasso cycle must be non-empty");
    const std::size_t npos = w.positions();
    const std::size_t n = static_cast<std::size_t>(b.num_states) * npos;
    if (n == 0) return false;
    auto node = [&](std::uint32_t s, std::size_t pos) { return s * npos + pos; };

    // Reachable nodes from the initial front.
    std::vector<std::uint8_t> reach(n, 0);
    std::vector<std::uint32_t> stack;
    for (auto s0 : b.initial) {
        auto v = node(s0, 0);
        if (!reach[v]) {
            reach[v] = 1;
            stack.push_back(static_cast<std::uint32_t>(v));
        }
    }
    auto for_successors = [&](std::uint32_t v, auto&& fn) {
        std::uint32_t s = v / npos;
        std::size_t pos = v % npos;
        LabelMask l = w.at(pos);
        std::size_t nxt = w.next(pos);
        for (auto i = b.out_begin[s]; i < b.out_begin[s + 1]; ++i) {
            if (b.edges[i].enabled_by(l))
                fn(static_cast<std::uint32_t>(node(b.edges[i].to, nxt)));
        }
    };
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for_successors(v, [&](std::uint32_t t) {
            if (!reach[t]) {
                reach[t] = 1;
                stack.push_back(t);
            }
        });
    }

    // Iterative Tarjan over the reachable subgraph; acceptance needs a
    // non-trivial SCC containing a node with accepting automaton component.
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::uint32_t> scc_stack;
    std::int32_t counter = 0;

    struct Frame {
        std::uint32_t v;
        std::vector<std::uint32_t> succ;
        std::size_t next = 0;
    };

    for (std::size_t root = 0; root < n; ++root) {
        if (!reach[root] || index[root] >= 0) continue;
        std::vector<Frame> frames;
        auto push_frame = [&](std::uint32_t v) {
            index[v] = low[v] = counter++;
            scc_stack.push_back(v);
            on_stack[v] = 1;
            Frame fr;
            fr.v = v;
            for_successors(v, [&](std::uint32_t t) {
                if (reach[t]) fr.succ.push_back(t);
            });
            frames.push_back(std::move(fr));
        };
        push_frame(static_cast<std::uint32_t>(root));
        while (!frames.empty()) {
            Frame& fr = frames.back();
            if (fr.next < fr.succ.size()) {
                std::uint32_t t = fr.succ[fr.next++];
                if (index[t] < 0) {
                    push_frame(t);
                } else if (on_stack[t]) {
                    low[fr.v] = std::min(low[fr.v], index[t]);
                }
            } else {
                if (low[fr.v] == index[fr.v]) {
                    // Pop one SCC and test it.
                    std::vector<std::uint32_t> comp;
                    for (;;) {
                        auto u = scc_stack.back();
                        scc_stack.pop_back();
                        on_stack[u] = 0;
                        comp.push_back(u);
                        if (u == fr.v) break;
                    }
                    bool has_accepting = false;
                    for (auto u : comp)
                        if (b.is_accepting(u / npos)) {
                            has_accepting = true;
                            break;
                        }
                    if (has_accepting) {
                        bool nontrivial = comp.size() > 1;
                        if (!nontrivial) {
                            bool self = false;
                            for_successors(comp[0], [&](std::uint32_t t) {
                                if (t == comp[0]) self = true;
                            });
                            nontrivial = self;
                        }
                        if (nontrivial) return true;
                    }
                }
                std::uint32_t v = fr.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return false;
}

} // namespace rhcplan
