#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rhcplan/mission.hpp"

namespace rhcplan {

namespace detail {

inline std::string fmt(double v) {
    if (v == kInf) return "inf";
    std::ostringstream os;
    os.imbue(std::locale::classic()); // '.' decimal point whatever the host locale
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.imbue(std::locale::classic());
    return out;
}

} // namespace detail

/// One row per step. The trailing latency column is wall clock and is the
/// only nondeterministic field; identity comparisons drop it.
inline void write_mission_log(const MissionLog& log, const Dts& dts, std::ostream& os) {
    os << "k,cell,x,y,product_state,energy,utility,first_violation,first_hard,reward,"
          "relabeled,annotations_changed,case,latency_us\n";
    for (const auto& r : log.rows) {
        os << r.k << ',' << r.cell << ',' << dts.x(r.cell) << ',' << dts.y(r.cell) << ','
           << r.product_state << ',' << detail::fmt(r.energy) << ',' << detail::fmt(r.utility)
           << ',' << detail::fmt(r.first_violation) << ',' << (r.first_hard_blocked ? 1 : 0)
           << ',' << detail::fmt(r.reward) << ',' << r.relabeled << ','
           << r.annotations_changed << ',' << r.plan_case << ',' << r.latency_us << "\n";
    }
}

inline void write_energy_csv(const MissionLog& log, std::ostream& os) {
    os << "k,energy\n";
    for (const auto& r : log.rows) os << r.k << ',' << detail::fmt(r.energy) << "\n";
}

inline void write_reward_csv(const MissionLog& log, std::ostream& os) {
    os << "k,reward,cumulative\n";
    double total = 0.0;
    for (const auto& r : log.rows) {
        total += r.reward;
        os << r.k << ',' << detail::fmt(r.reward) << ',' << detail::fmt(total) << "\n";
    }
}

inline void write_trajectory_csv(const MissionLog& log, const Dts& dts, std::ostream& os) {
    os << "k,cell,x,y,labels\n";
    for (const auto& r : log.rows) {
        auto names = dts.atoms().names_of(dts.label(r.cell));
        std::string joined;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) joined += ';';
            joined += names[i];
        }
        os << r.k << ',' << r.cell << ',' << dts.x(r.cell) << ',' << dts.y(r.cell) << ','
           << joined << "\n";
    }
}

/// Minimal static rendering: grid, labeled cells by atom color, trajectory
/// polyline, start and end markers.
inline void write_render_svg(const MissionLog& log, const Dts& dts, const Scenario& sc,
                             std::ostream& os) {
    const int cell = 24, margin = 12;
    const int w = static_cast<int>(sc.width) * cell + 2 * margin;
    const int h = static_cast<int>(sc.height) * cell + 2 * margin;
    auto px = [&](double x) { return margin + x * cell + cell / 2.0; };
    auto py = [&](double y) { return h - (margin + y * cell + cell / 2.0); };
    static const char* palette[] = {"#4363d8", "#911eb4", "#42d4f4", "#3c3c3c",
                                    "#ffe119", "#f58231", "#2e8b57", "#e6194b"};
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
       << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    for (std::uint32_t q = 0; q < dts.num_states(); ++q) {
        double cx = px(dts.x(q)), cy = py(dts.y(q));
        os << "<rect x='" << cx - cell / 2.0 << "' y='" << cy - cell / 2.0 << "' width='"
           << cell << "' height='" << cell << "' fill='none' stroke='#ddd'/>\n";
        LabelMask l = sc.base_labels[q];
        for (std::size_t i = 0; i < sc.atoms.size(); ++i)
            if (l & (LabelMask{1} << i)) {
                os << "<circle cx='" << cx << "' cy='" << cy << "' r='" << cell / 3
                   << "' fill='" << palette[i % 8] << "' opacity='0.8'/>\n";
                os << "<text x='" << cx << "' y='" << cy - cell / 2.0 - 1
                   << "' font-size='6' text-anchor='middle'>" << sc.atoms.name(i)
                   << "</text>\n";
            }
    }
    if (!log.rows.empty()) {
        os << "<polyline fill='none' stroke='#e6194b' stroke-width='1.5' points='";
        for (const auto& r : log.rows)
            os << px(dts.x(r.cell)) << ',' << py(dts.y(r.cell)) << ' ';
        os << "'/>\n";
        os << "<circle cx='" << px(dts.x(log.rows.front().cell)) << "' cy='"
           << py(dts.y(log.rows.front().cell)) << "' r='4' fill='#2e8b57'/>\n";
        os << "<circle cx='" << px(dts.x(log.rows.back().cell)) << "' cy='"
           << py(dts.y(log.rows.back().cell)) << "' r='4' fill='#e6194b'/>\n";
    }
    os << "</svg>\n";
}

/// Writes the full artifact set: mission.log, energy.csv, reward.csv,
/// trajectory.csv, render.svg. An empty log yields header-only files.
inline void export_artifacts(const MissionLog& log, const Dts& dts, const Scenario& sc,
                             const std::string& dir) {
    namespace fs = std::filesystem;
    fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir);
    {
        auto os = detail::open_out(root / "mission.log");
        write_mission_log(log, dts, os);
    }
    {
        auto os = detail::open_out(root / "energy.csv");
        write_energy_csv(log, os);
    }
    {
        auto os = detail::open_out(root / "reward.csv");
        write_reward_csv(log, os);
    }
    {
        auto os = detail::open_out(root / "trajectory.csv");
        write_trajectory_csv(log, dts, os);
    }
    {
        auto os = detail::open_out(root / "render.svg");
        write_render_svg(log, dts, sc, os);
    }
}

/// Energy-table dump (state id -> J), for offline inspection and plots.
inline void write_energy_table(const EnergyTable& table, std::ostream& os) {
    os << "state,J\n";
    for (std::size_t s = 0; s < table.J.size(); ++s)
        os << s << ',' << detail::fmt(table.J[s]) << "\n";
}

} // namespace rhcplan
