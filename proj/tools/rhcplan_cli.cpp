// Command-line front end: translate formulas, inspect products, run missions,
// and benchmark planning across workspace sizes.
//
// Exit codes: 0 success, 2 parse/schema error, 3 no feasible start,
// 4 resource guard, 1 anything else.

#include <CLI11.hpp>

#include <iostream>

#include "rhcplan/artifacts.hpp"
#include "rhcplan/bench.hpp"

using namespace rhcplan;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitNoStart = 3;
constexpr int kExitResource = 4;

std::vector<std::string> split_atoms(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct PlanOptions {
    std::string scenario_path;
    std::string out_dir = "out";
    std::int64_t seed = -1;
    int horizon = 0;
    double beta = 0.0;
    double kappa = 0.0;
    int radius = -2;
};

Scenario load_with_overrides(const PlanOptions& o) {
    Scenario sc = load_scenario(o.scenario_path);
    if (o.seed >= 0) sc = sc.with_seed(static_cast<std::uint32_t>(o.seed));
    if (o.horizon > 0) sc.horizon = o.horizon;
    if (o.beta > 0.0) sc.beta = o.beta;
    if (o.kappa > 0.0) sc.kappa = o.kappa;
    if (o.radius >= -1) sc.radius = o.radius;
    return sc;
}

int cmd_translate(const std::string& formula, const std::string& atoms_csv,
                  const std::string& out_path) {
    AtomSet atoms(split_atoms(atoms_csv));
    Nba nba = translate_to_nba(parse_ltl(formula, atoms), atoms);
    if (!out_path.empty()) write_nba_file(nba, out_path);
    std::cout << "states " << nba.num_states << " accepting " << nba.accepting.size()
              << " edges " << nba.edges.size() << "\n";
    return 0;
}

int cmd_build(const PlanOptions& o, const std::string& dump_path,
              const std::string& energy_path) {
    Scenario sc = load_with_overrides(o);
    Mission mission(sc);
    const auto& p = mission.product();
    std::cout << "cells " << mission.dts().num_states() << "\n"
              << "hard_states " << p.hard().num_states << "\n"
              << "soft_states " << p.soft().num_states << "\n"
              << "product_states " << p.num_states() << "\n"
              << "product_edges " << p.num_edges() << "\n"
              << "f_star " << mission.fstar().size() << "\n";
    double j0 = kInf;
    for (auto s : p.initial()) j0 = std::min(j0, mission.energy().J[s]);
    std::cout << "initial_energy " << (j0 == kInf ? std::string("inf") : std::to_string(j0))
              << "\n";
    if (!dump_path.empty()) {
        std::ofstream os(dump_path);
        if (!os) throw std::runtime_error("cannot write " + dump_path);
        dump_product(p, mission.dts(), os);
    }
    if (!energy_path.empty()) {
        std::ofstream os(energy_path);
        if (!os) throw std::runtime_error("cannot write " + energy_path);
        write_energy_table(mission.energy(), os);
    }
    return 0;
}

int cmd_plan(const PlanOptions& o) {
    Scenario sc = load_with_overrides(o);
    Mission mission(sc);
    MissionLog log = mission.run();
    export_artifacts(log, mission.dts(), sc, o.out_dir);
    std::cerr << "completed " << log.rows.size() << " steps, reward " << log.total_reward
              << ", violation " << log.total_violation << "\n";
    return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out_path) {
    auto records = run_benchmark(cfg);
    if (out_path.empty()) {
        write_bench_csv(records, std::cout);
    } else {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot write " + out_path);
        write_bench_csv(records, os);
        std::cerr << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_render(const std::string& dir) {
    // Rebuild render.svg from trajectory.csv in an artifact directory.
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "trajectory.csv");
    if (!in) throw std::runtime_error("cannot read trajectory.csv in " + dir);
    std::string line;
    std::getline(in, line); // header
    struct Pt {
        double x, y;
    };
    std::vector<Pt> pts;
    double maxx = 0, maxy = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() < 4) continue;
        Pt pt{std::stod(cols[2]), std::stod(cols[3])};
        maxx = std::max(maxx, pt.x);
        maxy = std::max(maxy, pt.y);
        pts.push_back(pt);
    }
    const int cell = 24, margin = 12;
    int w = static_cast<int>((maxx + 1) * cell) + 2 * margin;
    int h = static_cast<int>((maxy + 1) * cell) + 2 * margin;
    std::ofstream os(fs::path(dir) / "render.svg");
    if (!os) throw std::runtime_error("cannot write render.svg in " + dir);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<polyline fill='none' stroke='#e6194b' stroke-width='1.5' points='";
    for (const auto& pt : pts)
        os << margin + pt.x * cell + cell / 2.0 << ','
           << h - (margin + pt.y * cell + cell / 2.0) << ' ';
    os << "'/>\n</svg>\n";
    std::cerr << "rendered " << pts.size() << " trajectory points\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online LTL motion planning with receding horizon control\n"
                 "Scenario files use schema version 1 (see scenarios/ and README.md)."};
    app.require_subcommand(1);

    std::string formula, atoms_csv, out_path;
    auto* translate = app.add_subcommand("translate", "Translate an LTL formula to an NBA file");
    translate->add_option("-f,--formula", formula, "LTL formula")->required();
    translate->add_option("-a,--atoms", atoms_csv, "comma-separated atom names")->required();
    translate->add_option("-o,--out", out_path, "output NBA interchange file");

    PlanOptions popt;
    std::string dump_path, energy_path;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-s,--scenario", popt.scenario_path, "scenario file")->required();
        cmd->add_option("--seed", popt.seed, "master seed override");
        cmd->add_option("--horizon", popt.horizon, "horizon override");
        cmd->add_option("--beta", popt.beta, "beta override");
        cmd->add_option("--kappa", popt.kappa, "kappa override");
        cmd->add_option("--radius", popt.radius, "sensing radius override");
    };
    auto* build = app.add_subcommand("build", "Build the relaxed product and report sizes");
    add_common(build);
    build->add_option("--dump", dump_path, "write a product state/edge listing");
    build->add_option("--energy", energy_path, "write the energy table");

    auto* plan = app.add_subcommand("plan", "Run a mission and export artifacts");
    add_common(plan);
    plan->add_option("-o,--out", popt.out_dir, "artifact directory");

    BenchConfig bcfg;
    std::string bench_out;
    std::string bench_runs;
    auto* bench = app.add_subcommand("bench", "Benchmark planning across workspace sizes");
    bench->add_option("--runs", bench_runs,
                      "size:horizon pairs, e.g. 10:4,10:6,30:4 (default: the shipped set)");
    bench->add_option("--reps", bcfg.repetitions, "repetitions per configuration");
    bench->add_option("--steps", bcfg.steps_per_run, "planning steps per repetition");
    bench->add_option("--seed", bcfg.seed, "seed");
    bench->add_option("-o,--out", bench_out, "output csv (stdout if omitted)");

    std::string render_dir;
    auto* render = app.add_subcommand("render", "Re-render an artifact directory's trajectory");
    render->add_option("-d,--dir", render_dir, "artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (translate->parsed()) return cmd_translate(formula, atoms_csv, out_path);
        if (build->parsed()) return cmd_build(popt, dump_path, energy_path);
        if (plan->parsed()) return cmd_plan(popt);
        if (bench->parsed()) {
            if (!bench_runs.empty()) {
                bcfg.runs.clear();
                for (const auto& part : split_atoms(bench_runs)) {
                    auto colon = part.find(':');
                    if (colon == std::string::npos)
                        throw schema_error("--runs", "expected size:horizon");
                    bcfg.runs.push_back({static_cast<std::uint32_t>(std::stoul(part.substr(0, colon))),
                                         std::stoi(part.substr(colon + 1))});
                }
            }
            return cmd_bench(bcfg, bench_out);
        }
        if (render->parsed()) return cmd_render(render_dir);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitParse;
    } catch (const unknown_atom& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const no_feasible_start& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoStart;
    } catch (const std::length_error& e) {
        std::cerr << "resource guard: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
