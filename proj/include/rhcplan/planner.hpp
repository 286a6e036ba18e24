#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <unordered_map>

#include "rhcplan/energy.hpp"
#include "rhcplan/environment.hpp"

namespace rhcplan {

class no_feasible_start : public std::runtime_error {
public:
    no_feasible_start()
        : std::runtime_error("no initial product state has finite energy; "
                             "there is no accepting run from the initial states") {}
};

class empty_candidates : public std::logic_error {
public:
    explicit empty_candidates(int step)
        : std::logic_error("candidate set empty at step " + std::to_string(step) +
                           "; recursive feasibility is guaranteed, this is a bug") {}
};

struct PredictedTrajectory {
    std::vector<std::uint32_t> states; // s_{1|k} .. s_{N|k}
    double utility = 0.0;
    double terminal_energy = 0.0;
    double path_violation = 0.0; // sum of v over the entry edge and all path edges
    double path_weight = 0.0;    // sum of omega_P over the same edges
};

/// Which energy constraint shapes the current step.
enum class PlanCase {
    Initial, // first step: any finite-energy initial state qualifies
    Decrease, // case 1: terminal energy strictly below the previous prediction's
    Anchor,   // case 2: must pass through zero energy at a fixed position
    Explore,  // case 3: current state has zero energy; terminal must stay finite
};

struct CaseSelection {
    PlanCase plan_case = PlanCase::Explore;
    double terminal_bound = kInf; // Decrease: J of the previous terminal
    int zero_layer = -1;          // Anchor: 1-based position that must have J == 0
};

/// Constraint-case guards, evaluated on the current energy table. The
/// i0 == 1 corner collapses into case 3 because s_{1|k-1} is the state just
/// applied.
inline CaseSelection select_case(const EnergyTable& table, std::uint32_t current,
                                 const std::vector<std::uint32_t>& previous) {
    CaseSelection sel;
    if (table.J[current] == 0.0) {
        sel.plan_case = PlanCase::Explore;
        return sel;
    }
    for (std::size_t i = 0; i < previous.size(); ++i) {
        if (table.J[previous[i]] == 0.0) {
            int i0 = static_cast<int>(i) + 1;
            if (i0 == 1) {
                sel.plan_case = PlanCase::Explore;
                return sel;
            }
            sel.plan_case = PlanCase::Anchor;
            sel.zero_layer = i0 - 1;
            return sel;
        }
    }
    sel.plan_case = PlanCase::Decrease;
    sel.terminal_bound = table.J[previous.back()];
    return sel;
}

/// Utility of a predicted trajectory from `current`: negative
/// infinity when the first transition violates the hard constraint, otherwise
/// the observed-reward sum of the projected cells scaled by exp(-kappa * V)
/// with V = beta * v of the first transition. exp underflows to exactly zero
/// for heavily violating first steps.
inline double utility(const RelaxedProduct& p, std::uint32_t current,
                      const std::vector<std::uint32_t>& traj, const RewardWindow& rewards,
                      double kappa) {
    if (traj.empty()) throw std::invalid_argument("empty predicted trajectory");
    int first = p.find_edge(current, traj[0]);
    if (first < 0) throw non_transition(current, traj[0]);
    const auto& e0 = p.edge(static_cast<std::uint32_t>(first));
    if (e0.hard_blocked) return -kInf;
    double reward_sum = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i > 0 && p.find_edge(traj[i - 1], traj[i]) < 0)
            throw non_transition(traj[i - 1], traj[i]);
        reward_sum += rewards.planning_reward(p.cell_of(traj[i]));
    }
    double scale = std::exp(-kappa * p.beta() * e0.violation);
    return reward_sum * std::min(scale, 1.0);
}

/// All length-N walks of the product starting from src (structural edges,
/// annotations ignored). Test and diagnostic helper; the planner itself
/// searches with pruning.
inline std::vector<std::vector<std::uint32_t>> enumerate_paths(const RelaxedProduct& p,
                                                               std::uint32_t src, int n) {
    if (n < 1) throw std::invalid_argument("horizon must be at least 1");
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> path;
    std::function<void(std::uint32_t, int)> rec = [&](std::uint32_t s, int depth) {
        if (depth == n) {
            out.push_back(path);
            return;
        }
        for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
            path.push_back(p.edge(i).to);
            rec(p.edge(i).to, depth + 1);
            path.pop_back();
        }
    };
    rec(src, 0);
    return out;
}

namespace detail {

// Candidate trajectories must stay executable: every edge finite, the
// terminal able to move on, and the terminal energy finite. Selecting only
// finite-cost trajectories is what keeps the hard constraint intact; the rest
// keeps the shifted fallback well-formed at the next step.
struct SearchProblem {
    const RelaxedProduct* p;
    const EnergyTable* table;
    const RewardWindow* rewards;
    double kappa;
    int horizon;
    CaseSelection sel;
};

inline bool check_candidate(const SearchProblem& sp, std::uint32_t current,
                            const std::vector<std::uint32_t>& states, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const auto& p = *sp.p;
    const auto& J = sp.table->J;
    if (static_cast<int>(states.size()) != sp.horizon) return fail("wrong horizon");
    std::uint32_t prev = current;
    for (std::size_t i = 0; i < states.size(); ++i) {
        int ei = p.find_edge(prev, states[i]);
        if (ei < 0) return fail("not a product walk");
        if (p.edge(static_cast<std::uint32_t>(ei)).hard_blocked)
            return fail("hard-blocked edge inside the prediction");
        prev = states[i];
    }
    if (!p.has_finite_exit(states.back())) return fail("terminal state cannot move on");
    if (J[states.back()] == kInf) return fail("terminal energy infinite");
    switch (sp.sel.plan_case) {
        case PlanCase::Initial:
        case PlanCase::Explore:
            break;
        case PlanCase::Decrease:
            if (!(J[states.back()] < sp.sel.terminal_bound))
                return fail("terminal energy not below the previous prediction");
            break;
        case PlanCase::Anchor:
            if (J[states[sp.sel.zero_layer - 1]] != 0.0)
                return fail("prediction misses the zero-energy anchor");
            break;
    }
    return true;
}

// Search outcome ordering. Soft-constraint violation dominates (Problem 1
// ranks minimizing violation above reward collection), then utility, then
// the documented tie-break chain: terminal energy, accumulated omega_P,
// lexicographic state sequence (implicit in DFS order).
struct Incumbent {
    bool valid = false;
    double violation = kInf;
    double utility = -kInf;
    double terminal = kInf;
    double weight = kInf;
    std::vector<std::uint32_t> states;

    bool beaten_by(double v, double u, double jterm, double w) const {
        if (!valid) return true;
        if (v != violation) return v < violation;
        if (u != utility) return u > utility;
        if (jterm != terminal) return jterm < terminal;
        return w < weight;
    }
};

// Pareto entries for dominance pruning at (layer, state). A later partial is
// dominated when an earlier one is at least as good for every completion:
// less violation, a no-smaller first-edge scale, no-smaller scaled reward,
// and no-larger accumulated weight.
struct ParetoEntry {
    double violation;
    double scale;
    double scaled_reward;
    double weight;
};

class Search {
public:
    explicit Search(const SearchProblem& sp)
        : sp_(sp), p_(*sp.p), J_(sp.table->J) {
        max_decrease_ = 0.0;
        max_reward_ = 0.0;
        for (std::size_t i = 0; i < p_.num_edges(); ++i) {
            const auto& e = p_.edge(static_cast<std::uint32_t>(i));
            if (!e.hard_blocked)
                max_decrease_ = std::max(max_decrease_, p_.edge_weight(e));
        }
        for (std::size_t q = 0; q < sp.rewards->value.size(); ++q)
            if (sp.rewards->observed[q])
                max_reward_ = std::max(max_reward_, sp.rewards->value[q]);
    }

    void run(std::uint32_t root) {
        path_.clear();
        for (auto i = p_.out_begin(root); i < p_.out_end(root); ++i) {
            const auto& e = p_.edge(i);
            if (e.hard_blocked) continue;
            double scale =
                std::min(std::exp(-sp_.kappa * p_.beta() * e.violation), 1.0);
            descend(e, 1, 0.0, scale, 0.0, 0.0);
        }
    }

    bool found() const { return best_.valid; }
    PredictedTrajectory result() const {
        PredictedTrajectory t;
        t.states = best_.states;
        t.utility = best_.utility;
        t.terminal_energy = best_.terminal;
        t.path_violation = best_.violation;
        t.path_weight = best_.weight;
        return t;
    }

private:
    void descend(const ProductEdge& e, int layer, double vsum, double scale, double rew,
                 double wsum) {
        std::uint32_t s = e.to;
        vsum += e.violation;
        wsum += p_.edge_weight(e);
        rew += sp_.rewards->planning_reward(p_.cell_of(s));
        if (prune(s, layer, vsum, scale, rew, wsum)) return;
        path_.push_back(s);
        if (layer == sp_.horizon) {
            finish(vsum, scale, rew, wsum, s);
        } else {
            for (auto i = p_.out_begin(s); i < p_.out_end(s); ++i) {
                const auto& next = p_.edge(i);
                if (next.hard_blocked) continue;
                descend(next, layer + 1, vsum, scale, rew, wsum);
            }
        }
        path_.pop_back();
    }

    bool prune(std::uint32_t s, int layer, double vsum, double scale, double rew,
               double wsum) {
        // Worse on the primary key than something already found.
        if (best_.valid && vsum > best_.violation) return true;
        // Anchor case: the fixed position must sit exactly on zero energy,
        // and earlier layers must still be able to fall to zero.
        if (sp_.sel.plan_case == PlanCase::Anchor) {
            if (layer == sp_.sel.zero_layer && J_[s] != 0.0) return true;
            if (layer < sp_.sel.zero_layer &&
                J_[s] - (sp_.sel.zero_layer - layer) * max_decrease_ > 0.0)
                return true;
        }
        // Infinite energy cannot recover over finite edges: the terminal
        // would be infinite too.
        if (J_[s] == kInf) return true;
        // Terminal-energy reachability bound (energy drops by at most the
        // largest finite edge weight per step).
        double bound = sp_.sel.plan_case == PlanCase::Decrease ? sp_.sel.terminal_bound : kInf;
        int left = sp_.horizon - layer;
        if (bound < kInf && J_[s] - left * max_decrease_ >= bound) return true;
        // Utility upper bound within the same violation class.
        if (best_.valid && vsum == best_.violation) {
            double ub = (rew + left * max_reward_) * scale;
            if (ub < best_.utility) return true;
        }
        // Dominance against previously expanded partials at (layer, state).
        auto key = (static_cast<std::uint64_t>(layer) << 32) | s;
        auto& entries = pareto_[key];
        double scaled = rew * scale;
        for (const auto& en : entries) {
            if (en.violation <= vsum && en.scale >= scale && en.scaled_reward >= scaled &&
                en.weight <= wsum)
                return true;
        }
        entries.push_back({vsum, scale, scaled, wsum});
        return false;
    }

    void finish(double vsum, double scale, double rew, double wsum, std::uint32_t terminal) {
        if (!p_.has_finite_exit(terminal)) return;
        double jterm = J_[terminal];
        if (jterm == kInf) return;
        if (sp_.sel.plan_case == PlanCase::Decrease && !(jterm < sp_.sel.terminal_bound))
            return;
        double u = rew * scale;
        if (best_.beaten_by(vsum, u, jterm, wsum)) {
            best_.valid = true;
            best_.violation = vsum;
            best_.utility = u;
            best_.terminal = jterm;
            best_.weight = wsum;
            best_.states = path_;
        }
    }

    const SearchProblem& sp_;
    const RelaxedProduct& p_;
    const std::vector<double>& J_;
    double max_decrease_ = 0.0;
    double max_reward_ = 0.0;
    std::vector<std::uint32_t> path_;
    Incumbent best_;
    std::unordered_map<std::uint64_t, std::vector<ParetoEntry>> pareto_;
};

} // namespace detail

struct PlanResult {
    std::uint32_t root = 0; // the state the prediction starts from
    PredictedTrajectory trajectory;
    PlanCase plan_case = PlanCase::Initial;
};

/// Initial optimization across all finite-energy initial states.
inline PlanResult plan_initial(const RelaxedProduct& p, const EnergyTable& table,
                               const RewardWindow& rewards, int horizon, double kappa) {
    detail::SearchProblem sp{&p, &table, &rewards, kappa, horizon, {}};
    sp.sel.plan_case = PlanCase::Initial;
    bool any_feasible = false;
    PlanResult best;
    detail::Incumbent best_key;
    for (auto s0 : p.initial()) {
        if (table.J[s0] == kInf) continue;
        any_feasible = true;
        detail::Search search(sp);
        search.run(s0);
        if (!search.found()) continue;
        auto t = search.result();
        if (best_key.beaten_by(t.path_violation, t.utility, t.terminal_energy, t.path_weight)) {
            best_key.valid = true;
            best_key.violation = t.path_violation;
            best_key.utility = t.utility;
            best_key.terminal = t.terminal_energy;
            best_key.weight = t.path_weight;
            best.root = s0;
            best.trajectory = std::move(t);
            best.plan_case = PlanCase::Initial;
        }
    }
    if (!any_feasible) throw no_feasible_start();
    if (!best_key.valid) throw empty_candidates(0);
    return best;
}

struct PlannerState {
    std::uint32_t current = 0;             // s_{k-1}^{P*}
    std::vector<std::uint32_t> previous;   // previous optimal prediction
    int horizon = 4;
    double kappa = 100.0;
    int step = 0;
};

/// One receding-horizon step under the active energy-constraint case.
inline PlanResult plan_step(const PlannerState& state, const RelaxedProduct& p,
                            const EnergyTable& table, const RewardWindow& rewards) {
    detail::SearchProblem sp{&p, &table, &rewards, state.kappa, state.horizon,
                             select_case(table, state.current, state.previous)};
    detail::Search search(sp);
    search.run(state.current);
    if (!search.found()) throw empty_candidates(state.step);
    PlanResult out;
    out.root = state.current;
    out.trajectory = search.result();
    out.plan_case = sp.sel.plan_case;
    return out;
}

/// Constructive fallback: shift the previous prediction one step and append a
/// successor of its terminal chosen for the active case (strict energy
/// descent for case 1, any finite-energy continuation otherwise).
inline PredictedTrajectory fallback_path(const PlannerState& state, const RelaxedProduct& p,
                                         const EnergyTable& table) {
    if (state.previous.empty()) throw std::logic_error("fallback needs a previous prediction");
    CaseSelection sel = select_case(table, state.current, state.previous);
    std::vector<std::uint32_t> states(state.previous.begin() + 1, state.previous.end());
    std::uint32_t tail = state.previous.back();
    double bound = sel.plan_case == PlanCase::Decrease ? table.J[tail] : kInf;
    std::optional<std::uint32_t> chosen;
    double chosen_j = kInf;
    for (auto i = p.out_begin(tail); i < p.out_end(tail); ++i) {
        const auto& e = p.edge(i);
        if (e.hard_blocked || !p.has_finite_exit(e.to)) continue;
        double j = table.J[e.to];
        if (j == kInf) continue;
        if (sel.plan_case == PlanCase::Decrease && !(j < bound)) continue;
        if (j < chosen_j) {
            chosen_j = j;
            chosen = e.to;
        }
    }
    if (!chosen)
        throw std::logic_error("fallback extension does not exist; energy table is broken");
    states.push_back(*chosen);

    PredictedTrajectory t;
    t.states = std::move(states);
    t.terminal_energy = table.J[t.states.back()];
    std::uint32_t prev = state.current;
    for (auto s : t.states) {
        int ei = p.find_edge(prev, s);
        if (ei < 0) throw non_transition(prev, s);
        const auto& e = p.edge(static_cast<std::uint32_t>(ei));
        t.path_violation += e.violation;
        t.path_weight += p.edge_weight(e);
        prev = s;
    }
    return t;
}

/// Membership test for the constrained candidate set; used for the recursive
/// feasibility checks.
inline bool is_candidate(const PlannerState& state, const RelaxedProduct& p,
                         const EnergyTable& table, const std::vector<std::uint32_t>& states,
                         std::string* why = nullptr) {
    detail::SearchProblem sp{&p, &table, nullptr, state.kappa, state.horizon,
                             select_case(table, state.current, state.previous)};
    return detail::check_candidate(sp, state.current, states, why);
}

} // namespace rhcplan
