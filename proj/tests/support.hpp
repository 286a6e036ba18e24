#pragma once

// Shared fixtures, generators, and independent oracles for the test suites.
// The oracles deliberately avoid the library's optimized paths: brute-force
// enumeration here, Dijkstra / pruned DFS in the implementation.

#include <random>

#include "rhcplan/artifacts.hpp"
#include "rhcplan/bench.hpp"

namespace testsupport {

using namespace rhcplan;

inline LtlPtr random_formula(std::mt19937& rng, int depth, int natoms) {
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };
    if (depth == 0) {
        int k = pick(natoms + 2);
        if (k == natoms) return ltl_true();
        if (k == natoms + 1) return ltl_false();
        return ltl_atom(static_cast<std::uint32_t>(k));
    }
    switch (pick(8)) {
        case 0: return ltl_not(random_formula(rng, depth - 1, natoms));
        case 1:
            return ltl_and(random_formula(rng, depth - 1, natoms),
                           random_formula(rng, depth - 1, natoms));
        case 2:
            return ltl_or(random_formula(rng, depth - 1, natoms),
                          random_formula(rng, depth - 1, natoms));
        case 3: return ltl_next(random_formula(rng, depth - 1, natoms));
        case 4: return ltl_eventually(random_formula(rng, depth - 1, natoms));
        case 5: return ltl_always(random_formula(rng, depth - 1, natoms));
        case 6:
            return ltl_until(random_formula(rng, depth - 1, natoms),
                             random_formula(rng, depth - 1, natoms));
        default: return random_formula(rng, 0, natoms);
    }
}

inline LassoWord random_lasso(std::mt19937& rng, int natoms, int max_prefix, int max_cycle) {
    LassoWord w;
    int p = static_cast<int>(rng() % (max_prefix + 1));
    int c = 1 + static_cast<int>(rng() % max_cycle);
    LabelMask full = (LabelMask{1} << natoms) - 1;
    for (int i = 0; i < p; ++i) w.prefix.push_back(rng() & full);
    for (int i = 0; i < c; ++i) w.cycle.push_back(rng() & full);
    return w;
}

/// Random strongly-usable DTS: every state gets a self-loop and at least one
/// outgoing move; coordinates are scattered for Euclidean weights.
inline Dts random_dts(std::mt19937& rng, const AtomSet& atoms, std::uint32_t n,
                      double label_density = 0.3) {
    Dts d(atoms);
    for (std::uint32_t i = 0; i < n; ++i) {
        LabelMask l = 0;
        for (std::size_t a = 0; a < atoms.size(); ++a)
            if (uniform_real(rng, 0, 1) < label_density) l |= LabelMask{1} << a;
        d.add_state(uniform_real(rng, 0, 10), uniform_real(rng, 0, 10), l);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        d.add_edge(i, i, 1.0);
        std::uint32_t extra = 1 + uniform_int(rng, 2);
        for (std::uint32_t k = 0; k < extra; ++k) {
            std::uint32_t j = uniform_int(rng, n);
            if (j != i) d.add_edge(i, j, 0.5 + uniform_real(rng, 0, 2));
        }
        d.add_edge(i, (i + 1) % n, 1.0); // keep a cycle through everything
    }
    d.set_initial(uniform_int(rng, n));
    d.finalize();
    return d;
}

/// Random product built from random formulas over up to three atoms. With
/// `all_alive` the generation is retried until every state keeps a finite
/// exit, mirroring the standing assumption that the safety task stays
/// feasible everywhere.
inline RelaxedProduct random_product(std::mt19937& rng, std::uint32_t dts_states,
                                     double beta = 500.0, bool all_alive = false) {
    AtomSet atoms({"a", "b", "c"});
    for (int attempt = 0;; ++attempt) {
        Dts d = random_dts(rng, atoms, dts_states);
        Nba hard = translate_to_nba(random_formula(rng, 1 + rng() % 2, 2), atoms);
        while (hard.accepting.empty() || hard.num_states > 6)
            hard = translate_to_nba(random_formula(rng, 1 + rng() % 2, 2), atoms);
        Nba soft = translate_to_nba(random_formula(rng, 1 + rng() % 3, 3), atoms);
        while (soft.accepting.empty() || soft.num_states > 12)
            soft = translate_to_nba(random_formula(rng, 1 + rng() % 3, 3), atoms);
        RelaxedProduct p = build_relaxed_product(d, hard, soft, beta);
        if (!all_alive || attempt > 200) return p;
        bool ok = true;
        for (std::uint32_t s = 0; s < p.num_states() && ok; ++s)
            if (!p.has_finite_exit(s)) ok = false;
        if (ok) return p;
    }
}

/// Brute-force distance: literal enumeration of simple finite-weight paths
/// (positive weights make the optimum simple). Exponential; tiny fixtures only.
inline double brute_shortest_distance(const RelaxedProduct& p, std::uint32_t src,
                                      std::uint32_t dst) {
    if (src == dst) return 0.0;
    std::vector<std::uint8_t> used(p.num_states(), 0);
    double best = kInf;
    std::function<void(std::uint32_t, double)> rec = [&](std::uint32_t s, double w) {
        if (w >= best) return;
        if (s == dst) {
            best = w;
            return;
        }
        used[s] = 1;
        for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
            const auto& e = p.edge(i);
            if (e.hard_blocked || used[e.to]) continue;
            rec(e.to, w + p.edge_weight(e));
        }
        used[s] = 0;
    };
    rec(src, 0.0);
    return best;
}

/// Independent polynomial distance reference: iterate single-edge
/// relaxations num_states times (the optimum is a simple path).
inline std::vector<double> relaxation_distances(const RelaxedProduct& p, std::uint32_t src) {
    std::vector<double> d(p.num_states(), kInf);
    d[src] = 0.0;
    for (std::uint32_t round = 0; round + 1 < p.num_states(); ++round) {
        bool changed = false;
        for (std::uint32_t s = 0; s < p.num_states(); ++s) {
            if (d[s] == kInf) continue;
            for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
                const auto& e = p.edge(i);
                if (e.hard_blocked) continue;
                double nd = d[s] + p.edge_weight(e);
                if (nd < d[e.to]) {
                    d[e.to] = nd;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return d;
}

/// Reference energy: per-pair forward minimization over F*, on top of the
/// relaxation oracle.
inline double brute_energy(const RelaxedProduct& p, const FStarSet& f, std::uint32_t s) {
    if (f.contains(s)) return 0.0;
    auto d = relaxation_distances(p, s);
    double best = kInf;
    for (auto t : f.members) best = std::min(best, d[t]);
    return best;
}

/// Exhaustive reference for the receding-horizon step: enumerate every
/// length-N walk, keep the candidates, and apply the documented selection
/// order (violation, utility, terminal energy, accumulated weight, then the
/// lexicographically smallest sequence).
struct OracleChoice {
    bool found = false;
    std::vector<std::uint32_t> states;
    double violation = 0, utility = 0, terminal = 0, weight = 0;
};

inline OracleChoice oracle_plan(const RelaxedProduct& p, const EnergyTable& table,
                                const RewardWindow& rewards, double kappa, int horizon,
                                std::uint32_t current, const CaseSelection& sel) {
    OracleChoice best;
    std::vector<std::uint32_t> path;
    std::function<void(std::uint32_t, int, double, double, double, double)> rec =
        [&](std::uint32_t s, int layer, double vsum, double scale, double rew, double wsum) {
            if (layer == horizon) {
                if (!p.has_finite_exit(s)) return;
                double jterm = table.J[s];
                if (jterm == kInf) return;
                if (sel.plan_case == PlanCase::Decrease && !(jterm < sel.terminal_bound)) return;
                if (sel.plan_case == PlanCase::Anchor &&
                    table.J[path[sel.zero_layer - 1]] != 0.0)
                    return;
                double u = rew * scale;
                bool better = false;
                if (!best.found) {
                    better = true;
                } else if (vsum != best.violation) {
                    better = vsum < best.violation;
                } else if (u != best.utility) {
                    better = u > best.utility;
                } else if (jterm != best.terminal) {
                    better = jterm < best.terminal;
                } else if (wsum != best.weight) {
                    better = wsum < best.weight;
                } else {
                    better = path < best.states;
                }
                if (better) {
                    best.found = true;
                    best.states = path;
                    best.violation = vsum;
                    best.utility = u;
                    best.terminal = jterm;
                    best.weight = wsum;
                }
                return;
            }
            for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
                const auto& e = p.edge(i);
                if (e.hard_blocked) continue;
                double nscale =
                    layer == 0 ? std::min(std::exp(-kappa * p.beta() * e.violation), 1.0)
                               : scale;
                path.push_back(e.to);
                rec(e.to, layer + 1, vsum + e.violation,
                    nscale, rew + rewards.planning_reward(p.cell_of(e.to)),
                    wsum + p.edge_weight(e));
                path.pop_back();
            }
        };
    rec(current, 0, 0.0, 1.0, 0.0, 0.0);
    return best;
}

inline RewardWindow full_rewards(const RelaxedProduct&, std::mt19937& rng, double lo,
                                 double hi, std::uint32_t num_cells) {
    RewardWindow w;
    w.value.assign(num_cells, 0.0);
    w.observed.assign(num_cells, 1);
    for (auto& v : w.value) v = uniform_real(rng, lo, hi);
    return w;
}

} // namespace testsupport
