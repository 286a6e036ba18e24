#pragma once

#include <numeric>

#include "rhcplan/artifacts.hpp"

namespace rhcplan {

struct BenchConfig {
    std::vector<std::pair<std::uint32_t, int>> runs = {
        {10, 4}, {10, 6}, {30, 4}, {30, 8}, {50, 4}}; // (grid side, horizon)
    int repetitions = 3;
    int steps_per_run = 10;
    std::uint32_t seed = 17;
};

struct BenchRecord {
    std::uint32_t side = 0;
    std::uint32_t num_cells = 0;
    std::uint32_t hard_states = 0;
    std::uint32_t soft_states = 0;
    std::uint64_t product_states = 0;
    int horizon = 0;
    double min_ms = 0.0, max_ms = 0.0, mean_ms = 0.0;
};

/// Scales the 10x10 surveillance layout to an n x n workspace, mirroring how
/// the original grid was subdivided for the larger workspaces.
inline Scenario bench_scenario(std::uint32_t side, int horizon, std::uint32_t seed) {
    Scenario sc;
    sc.name = "bench" + std::to_string(side);
    sc.width = side;
    sc.height = side;
    sc.atoms = AtomSet({"Base", "Supply", "Report", "Obstacle", "Survey"});
    sc.base_labels.assign(static_cast<std::size_t>(side) * side, 0);
    double f = side / 10.0;
    auto put = [&](const char* atom, double x10, double y10) {
        auto cx = static_cast<std::uint32_t>(x10 * f);
        auto cy = static_cast<std::uint32_t>(y10 * f);
        sc.base_labels[cy * side + cx] |= LabelMask{1} << sc.atoms.require(atom);
    };
    put("Base", 1, 1);
    put("Supply", 8, 1);
    put("Report", 8, 8);
    put("Survey", 4, 4);
    put("Survey", 2, 6);
    put("Survey", 6, 2);
    sc.initial_cell = static_cast<std::uint32_t>(1 * f) * side + static_cast<std::uint32_t>(1 * f);
    sc.hard_formula = "[] !Obstacle";
    sc.soft_formula =
        "([] <> Base) && ([] (Base -> X (!Base U Survey))) && "
        "([] (Survey -> X (!Survey U Report))) && ([] (Report -> X (!Report U Supply)))";
    sc.beta = 500.0;
    sc.kappa = 100.0;
    sc.horizon = horizon;
    sc.radius = horizon;
    sc.steps = 1; // overridden by the bench loop
    sc.rewards = {10.0, 25.0, seed};
    sc.obstacles.mode = ObstacleScript::Mode::None;
    return sc;
}

/// Times the per-step planning of the scaled scenarios. Structural columns
/// are exact; timings are wall clock on this machine.
inline std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg) {
    std::vector<BenchRecord> out;
    for (auto [side, horizon] : cfg.runs) {
        BenchRecord rec;
        rec.side = side;
        rec.horizon = horizon;
        std::vector<double> samples;
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            Scenario sc = bench_scenario(side, horizon, cfg.seed + rep);
            sc.steps = cfg.steps_per_run;
            Mission mission(sc);
            rec.num_cells = mission.dts().num_states();
            rec.hard_states = mission.product().hard().num_states;
            rec.soft_states = mission.product().soft().num_states;
            rec.product_states = static_cast<std::uint64_t>(rec.num_cells) * rec.hard_states *
                                 rec.soft_states;
            MissionLog log = mission.run();
            // Per-step solve time of the receding loop; the initial
            // optimization is a different (multi-root, cold-cache) operation
            // and is not part of the per-step figure.
            for (const auto& row : log.rows)
                if (row.k > 0) samples.push_back(row.latency_us / 1000.0);
        }
        rec.min_ms = *std::min_element(samples.begin(), samples.end());
        rec.max_ms = *std::max_element(samples.begin(), samples.end());
        rec.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
        out.push_back(rec);
    }
    return out;
}

/// Previously reported timings for the same five configurations (MATLAB on
/// 2014-era hardware); shown side by side, never used as targets.
inline const char* bench_reference(std::uint32_t side, int horizon) {
    if (side == 10 && horizon == 4) return "0.88/2.91/1.70";
    if (side == 10 && horizon == 6) return "1.12/3.60/1.81";
    if (side == 30 && horizon == 4) return "1.47/5.45/3.12";
    if (side == 30 && horizon == 8) return "1.99/9.12/4.83";
    if (side == 50 && horizon == 4) return "2.01/14.90/6.11";
    return "";
}

inline void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& os) {
    os << "workspace,cells,hard_states,soft_states,product_states,horizon,"
          "min_ms,max_ms,mean_ms,reference_min_max_mean_s\n";
    for (const auto& r : records) {
        os << r.side << 'x' << r.side << ',' << r.num_cells << ',' << r.hard_states << ','
           << r.soft_states << ',' << r.product_states << ',' << r.horizon << ','
           << detail::fmt(r.min_ms) << ',' << detail::fmt(r.max_ms) << ','
           << detail::fmt(r.mean_ms) << ',' << bench_reference(r.side, r.horizon) << "\n";
    }
}

} // namespace rhcplan
