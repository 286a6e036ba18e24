#pragma once

#include <vector>

#include "rhcplan/energy.hpp"
#include "rhcplan/environment.hpp"

namespace rhcplan {

/// Snapshot of true labels within sensing range, plus the cells whose truth
/// disagrees with the agent's current knowledge.
struct SenseReport {
    std::vector<std::pair<std::uint32_t, LabelMask>> sensed; // (cell, true label)
    std::vector<std::uint32_t> info;                         // cells needing an update

    bool empty() const { return info.empty(); }
};

inline SenseReport sense(const EnvironmentTruth& env, const Dts& d, std::uint32_t q,
                         int radius) {
    if (radius < 0) throw std::invalid_argument("sensing radius must be nonnegative");
    SenseReport r;
    for (std::uint32_t s = 0; s < d.num_states(); ++s) {
        if (chebyshev(d, q, s) > radius) continue;
        LabelMask truth = env.true_label(s);
        r.sensed.push_back({s, truth});
        if (truth != d.label(s)) r.info.push_back(s);
    }
    return r;
}

struct UpdateDelta {
    std::vector<std::uint32_t> relabeled;
    std::size_t annotations_changed = 0;
};

/// Automaton update: patch the label knowledge, re-derive h and v
/// on every product edge leaving a relabeled cell, then refresh the energy
/// table with one backward multi-source Dijkstra. The edge set and F* are
/// untouched; only annotations move.
inline UpdateDelta apply_update(RelaxedProduct& p, Dts& d, const FStarSet& fstar,
                                const SenseReport& report, EnergyTable& table) {
    UpdateDelta delta;
    if (report.info.empty()) return delta;
    for (const auto& [cell, truth] : report.sensed) {
        if (d.label(cell) == truth) continue;
        d.set_label(cell, truth);
        delta.relabeled.push_back(cell);
        delta.annotations_changed += p.refresh_cell(d, cell);
    }
    if (!delta.relabeled.empty()) table = compute_energy(p, fstar);
    return delta;
}

} // namespace rhcplan
