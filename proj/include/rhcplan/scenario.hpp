#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "rhcplan/environment.hpp"
#include "rhcplan/nba_io.hpp"

namespace rhcplan {

/// Everything a mission needs: the world layout, the task formulas, and the
/// tuning parameters. Loaded from a versioned JSON document.
struct Scenario {
    std::string name;
    std::uint32_t width = 0, height = 0;
    std::uint32_t initial_cell = 0;
    AtomSet atoms;
    std::vector<LabelMask> base_labels; // per cell, without obstacles
    std::string hard_formula;
    std::string soft_formula;
    std::string hard_nba_path; // optional precompiled automata (interchange files)
    std::string soft_nba_path;
    double beta = 500.0;
    double kappa = 100.0;
    int horizon = 4;
    int radius = -1; // negative: default to the horizon
    int steps = 200;
    RewardModel rewards;
    ObstacleScript obstacles;
    std::vector<ToggleRule> toggles;

    int sensing_radius() const { return radius >= 0 ? radius : horizon; }

    /// Derives per-run seeds from a master seed, leaving the file untouched.
    Scenario with_seed(std::uint32_t master) const {
        Scenario s = *this;
        s.rewards.seed = master;
        s.obstacles.seed = master ^ 0x9e3779b9u;
        return s;
    }
};

namespace detail {

inline bool nonneg_int(const nlohmann::json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

inline std::uint32_t parse_cell(const nlohmann::json& j, std::uint32_t w, std::uint32_t h,
                                const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !nonneg_int(j[0]) || !nonneg_int(j[1]))
        throw schema_error(path, "expected a cell [x, y]");
    std::uint32_t x = j[0].get<std::uint32_t>(), y = j[1].get<std::uint32_t>();
    if (x >= w || y >= h) throw schema_error(path, "cell outside the grid");
    return y * w + x;
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
    auto need = [&](const char* field) -> const nlohmann::json& {
        if (!doc.contains(field)) throw schema_error(field, "missing field");
        return doc.at(field);
    };
    Scenario sc;
    if (doc.contains("version") && doc.at("version").get<int>() != 1)
        throw schema_error("version", "unsupported scenario version");
    sc.name = doc.contains("name") ? doc.at("name").get<std::string>() : "scenario";

    const auto& grid = need("grid");
    if (!grid.contains("width") || !grid.contains("height") || !grid.contains("initial"))
        throw schema_error("grid", "needs width, height, initial");
    sc.width = grid.at("width").get<std::uint32_t>();
    sc.height = grid.at("height").get<std::uint32_t>();
    if (sc.width < 1 || sc.height < 1) throw schema_error("grid", "degenerate grid");
    sc.initial_cell = detail::parse_cell(grid.at("initial"), sc.width, sc.height, "grid.initial");

    const auto& jatoms = need("atoms");
    std::vector<std::string> names;
    for (const auto& a : jatoms) names.push_back(a.get<std::string>());
    try {
        sc.atoms = AtomSet(names);
    } catch (const std::invalid_argument& e) {
        throw schema_error("atoms", e.what());
    }

    sc.base_labels.assign(static_cast<std::size_t>(sc.width) * sc.height, 0);
    if (doc.contains("labels")) {
        const auto& jl = doc.at("labels");
        if (!jl.is_object()) throw schema_error("labels", "expected atom -> cells map");
        for (const auto& [atom, cells] : jl.items()) {
            int idx = sc.atoms.index_of(atom);
            if (idx < 0) throw schema_error("labels." + atom, "undeclared atom");
            for (const auto& c : cells) {
                auto q = detail::parse_cell(c, sc.width, sc.height, "labels." + atom);
                sc.base_labels[q] |= LabelMask{1} << idx;
            }
        }
    }

    sc.hard_formula = need("hard").get<std::string>();
    sc.soft_formula = need("soft").get<std::string>();
    if (doc.contains("hard_nba")) sc.hard_nba_path = doc.at("hard_nba").get<std::string>();
    if (doc.contains("soft_nba")) sc.soft_nba_path = doc.at("soft_nba").get<std::string>();

    if (doc.contains("params")) {
        const auto& jp = doc.at("params");
        if (jp.contains("beta")) sc.beta = jp.at("beta").get<double>();
        if (jp.contains("kappa")) sc.kappa = jp.at("kappa").get<double>();
        if (jp.contains("horizon")) sc.horizon = jp.at("horizon").get<int>();
        if (jp.contains("radius")) sc.radius = jp.at("radius").get<int>();
        if (jp.contains("steps")) sc.steps = jp.at("steps").get<int>();
        if (sc.beta <= 0) throw schema_error("params.beta", "must be positive");
        if (sc.kappa <= 0) throw schema_error("params.kappa", "must be positive");
        if (sc.horizon < 1) throw schema_error("params.horizon", "must be at least 1");
        if (sc.steps < 1) throw schema_error("params.steps", "must be at least 1");
    }

    const auto& jr = need("rewards");
    if (!jr.contains("low") || !jr.contains("high"))
        throw schema_error("rewards", "needs low and high");
    sc.rewards.low = jr.at("low").get<double>();
    sc.rewards.high = jr.at("high").get<double>();
    if (sc.rewards.low < 0 || sc.rewards.high < sc.rewards.low)
        throw schema_error("rewards", "need 0 <= low <= high");
    if (jr.contains("seed")) sc.rewards.seed = jr.at("seed").get<std::uint32_t>();

    if (doc.contains("obstacles")) {
        const auto& jo = doc.at("obstacles");
        std::string mode = jo.contains("mode") ? jo.at("mode").get<std::string>() : "static";
        if (mode == "none") {
            sc.obstacles.mode = ObstacleScript::Mode::None;
        } else if (mode == "static") {
            sc.obstacles.mode = ObstacleScript::Mode::Static;
        } else if (mode == "walk") {
            sc.obstacles.mode = ObstacleScript::Mode::RandomWalk;
        } else if (mode == "script") {
            sc.obstacles.mode = ObstacleScript::Mode::Scripted;
        } else {
            throw schema_error("obstacles.mode", "expected none, static, walk, or script");
        }
        if (jo.contains("cells"))
            for (const auto& c : jo.at("cells"))
                sc.obstacles.cells.push_back(
                    detail::parse_cell(c, sc.width, sc.height, "obstacles.cells"));
        if (jo.contains("seed")) sc.obstacles.seed = jo.at("seed").get<std::uint32_t>();
        if (jo.contains("steps")) {
            for (const auto& st : jo.at("steps")) {
                if (!st.contains("from") || !st.contains("cells"))
                    throw schema_error("obstacles.steps", "entries need from and cells");
                std::vector<std::uint32_t> cells;
                for (const auto& c : st.at("cells"))
                    cells.push_back(detail::parse_cell(c, sc.width, sc.height, "obstacles.steps"));
                sc.obstacles.steps.push_back({st.at("from").get<int>(), std::move(cells)});
            }
        }
        if (sc.obstacles.mode == ObstacleScript::Mode::RandomWalk && sc.obstacles.cells.empty())
            throw schema_error("obstacles.cells", "random walk needs spawn cells");
        if (sc.atoms.index_of("Obstacle") < 0 && sc.obstacles.mode != ObstacleScript::Mode::None)
            throw schema_error("obstacles", "scenario uses obstacles but declares no Obstacle atom");
    }

    if (doc.contains("toggles")) {
        for (const auto& jt : doc.at("toggles")) {
            if (!jt.contains("atom") || !jt.contains("off_from") || !jt.contains("off_to"))
                throw schema_error("toggles", "entries need atom, off_from, off_to");
            int idx = sc.atoms.index_of(jt.at("atom").get<std::string>());
            if (idx < 0) throw schema_error("toggles.atom", "undeclared atom");
            sc.toggles.push_back({static_cast<std::uint32_t>(idx), jt.at("off_from").get<int>(),
                                  jt.at("off_to").get<int>()});
        }
    }

    // Formulas must parse against the declared atoms.
    try {
        parse_ltl(sc.hard_formula, sc.atoms);
    } catch (const parse_error& e) {
        throw schema_error("hard", e.what());
    }
    try {
        parse_ltl(sc.soft_formula, sc.atoms);
    } catch (const parse_error& e) {
        throw schema_error("soft", e.what());
    }

    // The agent must start on a safe cell.
    int obs = sc.atoms.index_of("Obstacle");
    if (obs >= 0) {
        if (sc.base_labels[sc.initial_cell] & (LabelMask{1} << obs))
            throw schema_error("grid.initial", "initial cell is labeled Obstacle");
        for (auto c : sc.obstacles.cells)
            if (c == sc.initial_cell)
                throw schema_error("obstacles.cells", "obstacle placed on the initial cell");
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read scenario " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(path, e.what());
    }
    Scenario sc = parse_scenario(doc);
    // Automaton files are looked up next to the scenario file.
    auto anchor = [&](std::string& p) {
        if (p.empty()) return;
        std::filesystem::path fp(p);
        if (fp.is_relative()) p = (std::filesystem::path(path).parent_path() / fp).string();
    };
    anchor(sc.hard_nba_path);
    anchor(sc.soft_nba_path);
    return sc;
}

} // namespace rhcplan
