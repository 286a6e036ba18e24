#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "rhcplan/nba.hpp"

namespace rhcplan {

namespace detail {

// Desugared formula over {atom,true,false,not,and,or,next,until}, hash-consed
// into a flat node table with children before parents.
struct Compiled {
    struct Node {
        LtlKind kind;
        std::uint32_t atom = 0;
        int c0 = -1, c1 = -1;
    };
    std::vector<Node> nodes;
    int root = -1;
    std::vector<int> untils;              // node ids
    std::vector<int> nexts;               // node ids
    std::vector<std::uint32_t> atoms_used; // global atom indices, sorted
    std::vector<int> atom_bit;            // global atom index -> free-bit slot or -1
};

class Compiler {
public:
    explicit Compiler(std::size_t num_atoms) { out_.atom_bit.assign(num_atoms, -1); }

    Compiled run(const LtlPtr& f) {
        out_.root = compile(f.get());
        for (int i = 0; i < static_cast<int>(out_.nodes.size()); ++i) {
            if (out_.nodes[i].kind == LtlKind::Until) out_.untils.push_back(i);
            if (out_.nodes[i].kind == LtlKind::Next) out_.nexts.push_back(i);
        }
        return std::move(out_);
    }

private:
    int compile(const LtlNode* f) {
        switch (f->kind) {
            case LtlKind::Atom: {
                if (out_.atom_bit.size() <= f->atom)
                    throw std::invalid_argument("formula references atom outside universe");
                if (out_.atom_bit[f->atom] < 0) {
                    out_.atom_bit[f->atom] = static_cast<int>(out_.atoms_used.size());
                    out_.atoms_used.push_back(f->atom);
                }
                return intern(LtlKind::Atom, f->atom, -1, -1);
            }
            case LtlKind::True: return intern(LtlKind::True, 0, -1, -1);
            case LtlKind::False: return intern(LtlKind::False, 0, -1, -1);
            case LtlKind::Not: return mk_not(compile(f->lhs.get()));
            case LtlKind::And:
                return intern(LtlKind::And, 0, compile(f->lhs.get()), compile(f->rhs.get()));
            case LtlKind::Or:
                return intern(LtlKind::Or, 0, compile(f->lhs.get()), compile(f->rhs.get()));
            case LtlKind::Next: return intern(LtlKind::Next, 0, compile(f->lhs.get()), -1);
            case LtlKind::Eventually:
                return intern(LtlKind::Until, 0, intern(LtlKind::True, 0, -1, -1),
                              compile(f->lhs.get()));
            case LtlKind::Always:
                // [] f  ==  !(true U !f)
                return mk_not(intern(LtlKind::Until, 0, intern(LtlKind::True, 0, -1, -1),
                                     mk_not(compile(f->lhs.get()))));
            case LtlKind::Until:
                return intern(LtlKind::Until, 0, compile(f->lhs.get()), compile(f->rhs.get()));
        }
        throw std::logic_error("unreachable ltl kind");
    }

    int mk_not(int c) {
        const auto& n = out_.nodes[c];
        if (n.kind == LtlKind::Not) return n.c0;
        if (n.kind == LtlKind::True) return intern(LtlKind::False, 0, -1, -1);
        if (n.kind == LtlKind::False) return intern(LtlKind::True, 0, -1, -1);
        return intern(LtlKind::Not, 0, c, -1);
    }

    int intern(LtlKind k, std::uint32_t atom, int c0, int c1) {
        auto key = std::make_tuple(static_cast<int>(k), atom, c0, c1);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        out_.nodes.push_back({k, atom, c0, c1});
        int id = static_cast<int>(out_.nodes.size() - 1);
        memo_.emplace(key, id);
        return id;
    }

    Compiled out_;
    std::map<std::tuple<int, std::uint32_t, int, int>, int> memo_;
};

// One locally consistent truth assignment, with everything the tableau needs.
struct Elementary {
    LabelMask letter = 0;       // atom bits mapped to global indices
    std::uint32_t profile = 0;  // until values | next-argument values
    std::uint32_t req_care = 0; // constrained successor-profile bits
    std::uint32_t req_val = 0;
    std::uint32_t acc = 0;      // acceptance-set membership per until
    bool initial = false;
};

inline std::vector<Elementary> enumerate_elementary(const Compiled& cf) {
    const std::size_t na = cf.atoms_used.size();
    const std::size_t nu = cf.untils.size();
    const std::size_t nx = cf.nexts.size();
    const std::size_t bits = na + nu + nx;
    if (bits > 24)
        throw std::invalid_argument("formula too large for tableau translation");
    if (cf.nodes.size() > 64)
        throw std::invalid_argument("formula closure exceeds 64 nodes");

    std::vector<int> slot(cf.nodes.size(), -1);
    for (std::size_t j = 0; j < nu; ++j) slot[cf.untils[j]] = static_cast<int>(j);
    for (std::size_t j = 0; j < nx; ++j) slot[cf.nexts[j]] = static_cast<int>(j);

    std::vector<Elementary> out;
    std::vector<std::uint8_t> val(cf.nodes.size());
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << bits); ++a) {
        auto bit = [&](std::size_t i) -> std::uint8_t { return (a >> i) & 1u; };
        bool ok = true;
        for (std::size_t i = 0; i < cf.nodes.size(); ++i) {
            const auto& n = cf.nodes[i];
            switch (n.kind) {
                case LtlKind::Atom:
                    val[i] = bit(cf.atom_bit[n.atom]);
                    break;
                case LtlKind::True: val[i] = 1; break;
                case LtlKind::False: val[i] = 0; break;
                case LtlKind::Not: val[i] = !val[n.c0]; break;
                case LtlKind::And: val[i] = val[n.c0] && val[n.c1]; break;
                case LtlKind::Or: val[i] = val[n.c0] || val[n.c1]; break;
                case LtlKind::Next:
                    val[i] = bit(na + nu + slot[i]);
                    break;
                case LtlKind::Until:
                    val[i] = bit(na + slot[i]);
                    break;
                default:
                    throw std::logic_error("unexpected node kind in compiled formula");
            }
        }
        // Local consistency of untils: psi2 -> u, and (u && !psi2) -> psi1.
        for (std::size_t j = 0; j < nu && ok; ++j) {
            const auto& n = cf.nodes[cf.untils[j]];
            std::uint8_t vu = val[cf.untils[j]], v1 = val[n.c0], v2 = val[n.c1];
            if (v2 && !vu) ok = false;
            if (vu && !v2 && !v1) ok = false;
        }
        if (!ok) continue;

        Elementary e;
        for (std::size_t i = 0; i < na; ++i)
            if (bit(i)) e.letter |= LabelMask{1} << cf.atoms_used[i];
        for (std::size_t j = 0; j < nu; ++j)
            if (val[cf.untils[j]]) e.profile |= 1u << j;
        for (std::size_t j = 0; j < nx; ++j)
            if (val[cf.nodes[cf.nexts[j]].c0]) e.profile |= 1u << (nu + j);
        for (std::size_t j = 0; j < nx; ++j) {
            e.req_care |= 1u << (nu + j);
            if (val[cf.nexts[j]]) e.req_val |= 1u << (nu + j);
        }
        for (std::size_t j = 0; j < nu; ++j) {
            const auto& n = cf.nodes[cf.untils[j]];
            std::uint8_t vu = val[cf.untils[j]], v1 = val[n.c0], v2 = val[n.c1];
            if (vu && !v2) {
                e.req_care |= 1u << j; // successor must keep the until pending
                e.req_val |= 1u << j;
            } else if (!vu && v1) {
                e.req_care |= 1u << j; // successor must keep it refuted
            }
            if (!vu || v2) e.acc |= 1u << j;
        }
        e.initial = val[cf.root];
        out.push_back(e);
    }
    return out;
}

// Working automaton between degeneralization and the final Nba: states with
// merged edges carrying letter sets over the closure atoms.
struct WorkEdge {
    std::uint32_t from, to;
    std::vector<LabelMask> letters; // sorted
};
struct WorkAut {
    std::uint32_t num_states = 0;
    std::uint32_t initial = 0;
    std::vector<std::uint8_t> accepting;
    std::vector<WorkEdge> edges;
};

// Keeps states that are reachable from the initial state and can reach a
// non-trivial SCC containing an accepting state. Returns false when the
// language is empty.
inline bool trim_workaut(WorkAut& a) {
    const std::uint32_t n = a.num_states;
    std::vector<std::vector<std::uint32_t>> out(n), in(n);
    for (std::uint32_t i = 0; i < a.edges.size(); ++i) {
        out[a.edges[i].from].push_back(i);
        in[a.edges[i].to].push_back(i);
    }
    std::vector<std::uint8_t> reach(n, 0);
    std::vector<std::uint32_t> stack{a.initial};
    reach[a.initial] = 1;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto ei : out[v]) {
            auto t = a.edges[ei].to;
            if (!reach[t]) {
                reach[t] = 1;
                stack.push_back(t);
            }
        }
    }

    // Iterative Tarjan restricted to reachable states.
    std::vector<std::int32_t> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::uint32_t> scc_stack;
    std::int32_t counter = 0, ncomp = 0;
    struct Frame {
        std::uint32_t v;
        std::size_t next = 0;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (!reach[root] || index[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        scc_stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& fr = frames.back();
            bool descended = false;
            while (fr.next < out[fr.v].size()) {
                auto t = a.edges[out[fr.v][fr.next++]].to;
                if (!reach[t]) continue;
                if (index[t] < 0) {
                    index[t] = low[t] = counter++;
                    scc_stack.push_back(t);
                    on_stack[t] = 1;
                    frames.push_back({t, 0});
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

    // Live components: non-trivial and containing an accepting state.
    std::vector<std::uint8_t> comp_nontrivial(ncomp, 0), comp_accepting(ncomp, 0);
    std::vector<std::uint32_t> comp_size(ncomp, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        if (reach[v] && comp[v] >= 0) {
            comp_size[comp[v]]++;
            if (a.accepting[v]) comp_accepting[comp[v]] = 1;
        }
    for (const auto& e : a.edges) {
        if (!reach[e.from] || !reach[e.to]) continue;
        if (comp[e.from] == comp[e.to] &&
            (e.from == e.to || comp_size[comp[e.from]] > 1))
            comp_nontrivial[comp[e.from]] = 1;
    }
    std::vector<std::uint8_t> keep(n, 0);
    std::vector<std::uint32_t> seeds;
    for (std::uint32_t v = 0; v < n; ++v)
        if (reach[v] && comp[v] >= 0 && comp_nontrivial[comp[v]] && comp_accepting[comp[v]]) {
            keep[v] = 1;
            seeds.push_back(v);
        }
    // Backward closure: states that can reach a live component.
    while (!seeds.empty()) {
        auto v = seeds.back();
        seeds.pop_back();
        for (auto ei : in[v]) {
            auto s = a.edges[ei].from;
            if (reach[s] && !keep[s]) {
                keep[s] = 1;
                seeds.push_back(s);
            }
        }
    }
    if (!keep[a.initial]) return false;

    std::vector<std::uint32_t> remap(n, UINT32_MAX);
    std::uint32_t next_id = 0;
    for (std::uint32_t v = 0; v < n; ++v)
        if (keep[v]) remap[v] = next_id++;
    std::vector<WorkEdge> kept_edges;
    for (auto& e : a.edges)
        if (keep[e.from] && keep[e.to])
            kept_edges.push_back({remap[e.from], remap[e.to], std::move(e.letters)});
    std::vector<std::uint8_t> acc(next_id, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        if (keep[v]) acc[remap[v]] = a.accepting[v];
    a.num_states = next_id;
    a.initial = remap[a.initial];
    a.accepting = std::move(acc);
    a.edges = std::move(kept_edges);
    return true;
}

// Merges parallel edges, then quotients by direct bisimulation. Sound for
// state-based Buchi acceptance; typically shrinks the tableau output a lot.
inline void bisim_quotient(WorkAut& a) {
    // Merge duplicate (from,to) edges first.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<LabelMask>> merged;
    for (auto& e : a.edges) {
        auto& dst = merged[{e.from, e.to}];
        dst.insert(dst.end(), e.letters.begin(), e.letters.end());
    }
    a.edges.clear();
    for (auto& [key, letters] : merged) {
        std::sort(letters.begin(), letters.end());
        letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
        a.edges.push_back({key.first, key.second, std::move(letters)});
    }

    std::map<std::vector<LabelMask>, std::uint32_t> letter_ids;
    auto letters_id = [&](const std::vector<LabelMask>& ls) {
        auto [it, fresh] = letter_ids.emplace(ls, static_cast<std::uint32_t>(letter_ids.size()));
        (void)fresh;
        return it->second;
    };

    const std::uint32_t n = a.num_states;
    std::vector<std::uint32_t> cls(n);
    for (std::uint32_t v = 0; v < n; ++v) cls[v] = a.accepting[v] ? 1 : 0;
    std::size_t num_classes = 0;
    for (;;) {
        std::map<std::pair<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>,
                 std::uint32_t>
            sig_ids;
        std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> sigs(n);
        for (const auto& e : a.edges)
            sigs[e.from].push_back({letters_id(e.letters), cls[e.to]});
        std::vector<std::uint32_t> next_cls(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            auto& s = sigs[v];
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            auto key = std::make_pair(cls[v], std::move(s));
            auto [it, fresh] = sig_ids.emplace(std::move(key),
                                               static_cast<std::uint32_t>(sig_ids.size()));
            (void)fresh;
            next_cls[v] = it->second;
        }
        // next_cls refines cls, so the partition is stable once the class
        // count stops growing.
        cls = std::move(next_cls);
        if (sig_ids.size() == num_classes) break;
        num_classes = sig_ids.size();
    }

    std::map<std::uint32_t, std::uint32_t> remap;
    for (std::uint32_t v = 0; v < n; ++v)
        remap.emplace(cls[v], static_cast<std::uint32_t>(remap.size()));
    std::uint32_t qn = static_cast<std::uint32_t>(remap.size());
    std::vector<std::uint8_t> acc(qn, 0);
    for (std::uint32_t v = 0; v < n; ++v)
        if (a.accepting[v]) acc[remap[cls[v]]] = 1;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<LabelMask>> qedges;
    for (auto& e : a.edges) {
        auto& dst = qedges[{remap[cls[e.from]], remap[cls[e.to]]}];
        dst.insert(dst.end(), e.letters.begin(), e.letters.end());
    }
    std::vector<WorkEdge> out_edges;
    for (auto& [key, letters] : qedges) {
        std::sort(letters.begin(), letters.end());
        letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
        out_edges.push_back({key.first, key.second, std::move(letters)});
    }
    a.initial = remap[cls[a.initial]];
    a.num_states = qn;
    a.accepting = std::move(acc);
    a.edges = std::move(out_edges);
}

} // namespace detail

/// Translates an LTL formula into an NBA with L(NBA) = models of f.
///
/// Classic tableau route: locally consistent assignments over the closure
/// form a generalized Buchi automaton (one acceptance set per until), which a
/// counter construction degeneralizes. States are quotiented by the successor
/// constraints they impose (pending untils plus next-argument values), and
/// the result is trimmed to live states and reduced by bisimulation. State
/// counts are therefore implementation-specific; language is the contract.
inline Nba translate_to_nba(const LtlPtr& f, const AtomSet& atoms) {
    using namespace detail;
    Compiled cf = Compiler(atoms.size()).run(f);
    std::vector<Elementary> elems = enumerate_elementary(cf);

    const std::size_t nu = cf.untils.size();
    const std::uint32_t until_mask = nu == 0 ? 0u : ((1u << nu) - 1u);

    // Realized successor profiles.
    std::vector<std::uint32_t> profiles;
    for (const auto& e : elems) profiles.push_back(e.profile);
    std::sort(profiles.begin(), profiles.end());
    profiles.erase(std::unique(profiles.begin(), profiles.end()), profiles.end());
    std::unordered_map<std::uint32_t, std::uint32_t> profile_id;
    for (std::uint32_t i = 0; i < profiles.size(); ++i) profile_id.emplace(profiles[i], i);

    const std::uint32_t iota = static_cast<std::uint32_t>(profiles.size()); // initial node

    // Tableau transitions, aggregated as (src, dst, acc) -> letter set.
    // src/dst index the profile table; letters are over the closure atoms.
    struct TupleKey {
        std::uint32_t src, dst, acc;
        bool operator<(const TupleKey& o) const {
            return std::tie(src, dst, acc) < std::tie(o.src, o.dst, o.acc);
        }
    };
    std::map<TupleKey, std::vector<LabelMask>> tuples;
    for (const auto& e : elems) {
        std::uint32_t src = profile_id.at(e.profile);
        for (std::uint32_t pi = 0; pi < profiles.size(); ++pi) {
            if ((profiles[pi] & e.req_care) != (e.req_val & e.req_care)) continue;
            tuples[{src, pi, e.acc}].push_back(e.letter);
            if (e.initial) tuples[{iota, pi, e.acc}].push_back(e.letter);
        }
    }
    for (auto& [k, v] : tuples) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    // Reachable part of the generalized automaton (letters are irrelevant).
    const std::uint32_t gn = iota + 1;
    std::vector<std::vector<const std::pair<const TupleKey, std::vector<LabelMask>>*>> gout(gn);
    for (const auto& kv : tuples) gout[kv.first.src].push_back(&kv);
    std::vector<std::uint8_t> greach(gn, 0);
    std::vector<std::uint32_t> gstack{iota};
    greach[iota] = 1;
    while (!gstack.empty()) {
        auto v = gstack.back();
        gstack.pop_back();
        for (auto* kv : gout[v])
            if (!greach[kv->first.dst]) {
                greach[kv->first.dst] = 1;
                gstack.push_back(kv->first.dst);
            }
    }

    // Drop acceptance sets satisfied by every reachable transition.
    std::uint32_t always_acc = until_mask;
    bool any_edge = false;
    for (const auto& kv : tuples)
        if (greach[kv.first.src]) {
            always_acc &= kv.first.acc;
            any_edge = true;
        }
    (void)any_edge;
    std::vector<int> acc_slot(nu, -1);
    std::uint32_t k_sets = 0;
    for (std::size_t j = 0; j < nu; ++j)
        if (!(always_acc & (1u << j))) acc_slot[j] = static_cast<int>(k_sets++);

    // Counter degeneralization over transition acceptance. Level k_sets is
    // the accepting "all sets seen" state; it restarts at 0.
    const std::uint32_t levels = k_sets + 1;
    auto advance = [&](std::uint32_t lvl, std::uint32_t acc) {
        std::uint32_t base = (lvl == k_sets) ? 0 : lvl;
        std::uint32_t remapped = 0;
        for (std::size_t j = 0; j < nu; ++j)
            if (acc_slot[j] >= 0 && (acc & (1u << j))) remapped |= 1u << acc_slot[j];
        std::uint32_t cur = base;
        while (cur < k_sets && (remapped & (1u << cur))) ++cur;
        return cur;
    };

    WorkAut wa;
    wa.num_states = gn * levels;
    auto wid = [&](std::uint32_t node, std::uint32_t lvl) { return node * levels + lvl; };
    wa.initial = wid(iota, 0);
    wa.accepting.assign(wa.num_states, 0);
    for (std::uint32_t node = 0; node < gn; ++node)
        wa.accepting[wid(node, k_sets)] = 1;
    for (const auto& [key, letters] : tuples) {
        if (!greach[key.src]) continue;
        for (std::uint32_t lvl = 0; lvl < levels; ++lvl) {
            WorkEdge e;
            e.from = wid(key.src, lvl);
            e.to = wid(key.dst, advance(lvl, key.acc));
            e.letters = letters;
            wa.edges.push_back(std::move(e));
        }
    }

    Nba out;
    out.atoms = atoms;
    if (!trim_workaut(wa)) {
        out.num_states = 1;
        out.initial = {0};
        out.finalize();
        return out;
    }
    bisim_quotient(wa);

    // Materialize letters over the full atom universe: atoms outside the
    // closure are unconstrained.
    LabelMask closure_mask = 0;
    for (auto a : cf.atoms_used) closure_mask |= LabelMask{1} << a;
    LabelMask free_mask = atoms.full_mask() & ~closure_mask;
    if (std::popcount(free_mask) > 12)
        throw std::invalid_argument("too many unconstrained atoms to materialize labels");
    std::vector<LabelMask> expansions;
    for (LabelMask sub = free_mask;; sub = (sub - 1) & free_mask) {
        expansions.push_back(sub);
        if (sub == 0) break;
    }

    out.num_states = wa.num_states;
    out.initial = {wa.initial};
    for (std::uint32_t v = 0; v < wa.num_states; ++v)
        if (wa.accepting[v]) out.accepting.push_back(v);
    for (const auto& e : wa.edges) {
        NbaEdge ne;
        ne.from = e.from;
        ne.to = e.to;
        for (auto letter : e.letters)
            for (auto ext : expansions) ne.labels.push_back(letter | ext);
        out.edges.push_back(std::move(ne));
    }
    out.finalize();
    return out;
}

inline Nba translate_to_nba(const std::string& formula, const AtomSet& atoms) {
    return translate_to_nba(parse_ltl(formula, atoms), atoms);
}

} // namespace rhcplan
