#pragma once

#include <chrono>
#include <functional>

#include "rhcplan/planner.hpp"
#include "rhcplan/scenario.hpp"
#include "rhcplan/sensing.hpp"
#include "rhcplan/translate.hpp"

namespace rhcplan {

struct StepRecord {
    int k = 0;
    std::uint32_t cell = 0;
    std::uint32_t product_state = 0;
    double energy = 0.0;          // J of the state just entered
    double utility = 0.0;         // value of the chosen prediction
    double first_violation = 0.0; // v of the executed transition
    bool first_hard_blocked = false;
    double reward = 0.0; // reward collected on entry
    std::uint32_t relabeled = 0;
    std::uint32_t annotations_changed = 0;
    int plan_case = 0;
    long latency_us = 0; // wall clock; excluded from determinism comparisons
};

struct MissionLog {
    std::vector<StepRecord> rows;
    double total_reward = 0.0;
    double total_violation = 0.0;

    std::vector<double> energy_trace() const {
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r.energy);
        return out;
    }
    std::vector<double> cumulative_reward() const {
        std::vector<double> out;
        double total = 0.0;
        for (const auto& r : rows) {
            total += r.reward;
            out.push_back(total);
        }
        return out;
    }
    /// Steps whose executed transition carried positive soft violation.
    std::vector<int> violation_events() const {
        std::vector<int> out;
        for (const auto& r : rows)
            if (r.first_violation > 0.0) out.push_back(r.k);
        return out;
    }
    /// Steps that landed on a zero-energy (accepting-set) state.
    std::vector<int> accepting_visits() const {
        std::vector<int> out;
        for (const auto& r : rows)
            if (r.energy == 0.0) out.push_back(r.k);
        return out;
    }
    std::size_t zero_energy_visits(int from_k, int to_k) const {
        std::size_t n = 0;
        for (const auto& r : rows)
            if (r.k >= from_k && r.k <= to_k && r.energy == 0.0) ++n;
        return n;
    }
};

struct MissionHooks {
    // After the sensing update ran for this step (k >= 1).
    std::function<void(int k, const RelaxedProduct&, const Dts&, const FStarSet&,
                       const UpdateDelta&)>
        after_update;
    // After the plan was chosen, before it is applied.
    std::function<void(int k, const PlannerState&, const PlanResult&, const RelaxedProduct&,
                       const EnergyTable&)>
        after_plan;
};

/// The control loop end to end: offline construction (product, F*,
/// annotations, energy), the initial optimization, then the sense / update /
/// plan / move loop. The instance keeps the built structures alive so tests
/// can inspect them after the run.
class Mission {
public:
    explicit Mission(const Scenario& sc)
        : scenario_(sc),
          dts_(build_grid_dts(sc.width, sc.height, sc.initial_cell, sc.base_labels, sc.atoms)),
          env_(dts_, sc.base_labels, obstacle_atom(sc), sc.obstacles, sc.toggles, sc.rewards),
          product_(build_relaxed_product(dts_, resolve_nba(sc, sc.hard_nba_path, sc.hard_formula),
                                         resolve_nba(sc, sc.soft_nba_path, sc.soft_formula),
                                         sc.beta)) {
        env_.set_grid(sc.width, sc.height);
        // Obstacles stay off labeled cells so stations remain usable.
        std::vector<std::uint8_t> forbidden(dts_.num_states(), 0);
        for (std::uint32_t q = 0; q < dts_.num_states(); ++q)
            if (sc.base_labels[q] != 0) forbidden[q] = 1;
        env_.set_forbidden(std::move(forbidden));
        fstar_ = compute_f_star(product_);
        table_ = compute_energy(product_, fstar_);
    }

    MissionLog run(const MissionHooks* hooks = nullptr) {
        MissionLog log;
        const int radius = scenario_.sensing_radius();
        std::uint32_t agent = dts_.initial();

        // Boot-up sensing: the agent reads its surroundings once before the
        // initial optimization, so the offline annotations reflect what it
        // can already see.
        {
            SenseReport r = sense(env_, dts_, agent, radius);
            UpdateDelta delta = apply_update(product_, dts_, fstar_, r, table_);
            if (hooks && hooks->after_update)
                hooks->after_update(0, product_, dts_, fstar_, delta);
        }

        RewardWindow rewards = observe_rewards(env_, dts_, agent, radius);
        auto t0 = std::chrono::steady_clock::now();
        PlanResult plan =
            plan_initial(product_, table_, rewards, scenario_.horizon, scenario_.kappa);
        auto t1 = std::chrono::steady_clock::now();

        PlannerState planner;
        planner.horizon = scenario_.horizon;
        planner.kappa = scenario_.kappa;
        planner.step = 0;
        planner.current = plan.root; // the chosen initial product state
        if (hooks && hooks->after_plan)
            hooks->after_plan(0, planner, plan, product_, table_);

        executed_states_.push_back(plan.root);
        apply_move(plan, planner, UpdateDelta{}, 0,
                   std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count(), log);
        agent = product_.cell_of(planner.current);

        for (int k = 1; k < scenario_.steps; ++k) {
            step_environment(env_, k, protected_cells(planner));
            SenseReport r = sense(env_, dts_, agent, radius);
            UpdateDelta delta = apply_update(product_, dts_, fstar_, r, table_);
            if (hooks && hooks->after_update)
                hooks->after_update(k, product_, dts_, fstar_, delta);

            rewards = observe_rewards(env_, dts_, agent, radius);
            planner.step = k;
            t0 = std::chrono::steady_clock::now();
            plan = plan_step(planner, product_, table_, rewards);
            t1 = std::chrono::steady_clock::now();
            if (hooks && hooks->after_plan)
                hooks->after_plan(k, planner, plan, product_, table_);

            apply_move(plan, planner, delta, k,
                       std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count(),
                       log);
            agent = product_.cell_of(planner.current);
        }
        log.total_reward = 0.0;
        log.total_violation = 0.0;
        for (const auto& row : log.rows) {
            log.total_reward += row.reward;
            log.total_violation += row.first_violation;
        }
        return log;
    }

    const Scenario& scenario() const { return scenario_; }
    const Dts& dts() const { return dts_; }
    const RelaxedProduct& product() const { return product_; }
    const FStarSet& fstar() const { return fstar_; }
    const EnergyTable& energy() const { return table_; }
    const EnvironmentTruth& environment() const { return env_; }
    /// Executed product states, starting with the chosen initial root.
    const std::vector<std::uint32_t>& executed_states() const { return executed_states_; }
    /// Label read when leaving the i-th executed state.
    const std::vector<LabelMask>& read_labels() const { return read_labels_; }

private:
    // A scenario may point at a precompiled interchange automaton instead of
    // translating its formula; the atom universes must line up exactly.
    static Nba resolve_nba(const Scenario& sc, const std::string& path,
                           const std::string& formula) {
        if (path.empty()) return translate_to_nba(formula, sc.atoms);
        Nba b = read_nba_file(path);
        if (!(b.atoms == sc.atoms))
            throw schema_error(path, "automaton atoms differ from the scenario atoms");
        return b;
    }

    static std::uint32_t obstacle_atom(const Scenario& sc) {
        int idx = sc.atoms.index_of("Obstacle");
        return idx < 0 ? 0 : static_cast<std::uint32_t>(idx);
    }

    // Obstacles must not step onto the agent, its committed prediction, or
    // anything adjacent to those cells: the planner's fallback reuses the
    // shifted previous prediction, so the environment must not invalidate it.
    std::vector<std::uint8_t> protected_cells(const PlannerState& planner) const {
        std::vector<std::uint8_t> blocked(dts_.num_states(), 0);
        std::vector<std::uint32_t> seeds;
        seeds.push_back(product_.cell_of(planner.current));
        for (auto s : planner.previous) seeds.push_back(product_.cell_of(s));
        for (auto c : seeds)
            for (std::uint32_t q = 0; q < dts_.num_states(); ++q)
                if (chebyshev(dts_, c, q) <= 1) blocked[q] = 1;
        return blocked;
    }

    void apply_move(const PlanResult& plan, PlannerState& planner, const UpdateDelta& delta,
                    int k, long latency_us, MissionLog& log) {
        std::uint32_t from = planner.current;
        std::uint32_t to = plan.trajectory.states.front();
        int ei = product_.find_edge(from, to);
        if (ei < 0) throw non_transition(from, to);
        const auto& edge = product_.edge(static_cast<std::uint32_t>(ei));

        read_labels_.push_back(dts_.label(product_.cell_of(from)));
        executed_states_.push_back(to);
        planner.current = to;
        planner.previous = plan.trajectory.states;

        StepRecord row;
        row.k = k;
        row.cell = product_.cell_of(to);
        row.product_state = to;
        row.energy = table_.J[to];
        row.utility = plan.trajectory.utility;
        row.first_violation = edge.violation;
        row.first_hard_blocked = edge.hard_blocked;
        row.reward = env_.reward(row.cell);
        row.relabeled = static_cast<std::uint32_t>(delta.relabeled.size());
        row.annotations_changed = static_cast<std::uint32_t>(delta.annotations_changed);
        row.plan_case = static_cast<int>(plan.plan_case);
        row.latency_us = latency_us;
        log.rows.push_back(row);
    }

    Scenario scenario_;
    Dts dts_;
    EnvironmentTruth env_;
    RelaxedProduct product_;
    FStarSet fstar_;
    EnergyTable table_;
    std::vector<std::uint32_t> executed_states_;
    std::vector<LabelMask> read_labels_;
};

inline MissionLog run_mission(const Scenario& sc, const MissionHooks* hooks = nullptr) {
    Mission m(sc);
    return m.run(hooks);
}

/// Extracts an ultimately periodic word from the executed run: the word read
/// along the run, looped at a repeated product state whose loop passes a
/// zero-energy step. Requires static labels to be meaningful.
inline std::optional<LassoWord> executed_lasso(const Mission& m, const MissionLog& log) {
    const auto& states = m.executed_states();
    const auto& reads = m.read_labels();
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        for (std::size_t j = states.size() - 1; j > i; --j) {
            if (states[i] != states[j]) continue;
            bool zero_inside = false;
            for (std::size_t t = i; t < j && !zero_inside; ++t)
                if (log.rows[t].energy == 0.0) zero_inside = true;
            if (!zero_inside) continue;
            LassoWord w;
            w.prefix.assign(reads.begin(), reads.begin() + i);
            w.cycle.assign(reads.begin() + i, reads.begin() + j);
            return w;
        }
    }
    return std::nullopt;
}

} // namespace rhcplan
