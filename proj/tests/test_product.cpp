#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace rhcplan;

namespace {

// Fig.-2-style fixture: three regions in a line, b's region obstructed.
//   q0 = {} (initial) -- q1 = {a} ; q0 -- q2 = {b, Obs}
struct ExampleOne {
    AtomSet atoms{std::vector<std::string>{"a", "b", "Obs"}};
    Dts dts;
    Nba hard, soft;

    ExampleOne() : dts(atoms) {
        auto q0 = dts.add_state(0, 0, 0);
        auto q1 = dts.add_state(1, 0, atoms.mask_of({"a"}));
        auto q2 = dts.add_state(0, 1, atoms.mask_of({"b", "Obs"}));
        for (auto q : {q0, q1, q2}) dts.add_edge(q, q, 1.0);
        dts.add_edge(q0, q1);
        dts.add_edge(q1, q0);
        dts.add_edge(q0, q2);
        dts.add_edge(q2, q0);
        dts.set_initial(q0);
        dts.finalize();
        hard = translate_to_nba("[] !Obs", atoms);
        soft = translate_to_nba("([] <> a) && ([] <> b)", atoms);
    }
};

} // namespace

TEST_CASE("violation cost of a soft move") {
    AtomSet atoms({"a", "b"});
    Nba soft = translate_to_nba("[] <> a", atoms);
    LabelMask a = atoms.mask_of({"a"});
    // Self-consistent move: label inside the enabling set costs nothing.
    bool found_zero = false, found_positive = false;
    for (const auto& e : soft.edges) {
        int with_a = distance_to_set(a, e.labels);
        int with_empty = distance_to_set(0, e.labels);
        if (with_a == 0) found_zero = true;
        if (with_empty > 0) found_positive = true;
        CHECK(violation_cost(soft, e.from, e.to, a) == with_a);
    }
    CHECK(found_zero);
    CHECK(found_positive);
    CHECK_THROWS_AS(violation_cost(soft, 0, 999, a), std::invalid_argument);
}

TEST_CASE("single-candidate distance is the plain rho") {
    AtomSet atoms({"a", "b"});
    // X = {{a}}, label = {b}: flip both bits.
    CHECK(distance_to_set(atoms.mask_of({"b"}), {atoms.mask_of({"a"})}) == 2);
}

TEST_CASE("product dimensions multiply") {
    AtomSet atoms({"Base", "Supply", "Report", "Obstacle", "Survey"});
    std::vector<LabelMask> labels(100, 0);
    Dts d = build_grid_dts(10, 10, 0, labels, atoms);
    Nba hard = translate_to_nba("[] !Obstacle", atoms);
    Nba soft = translate_to_nba(
        "([] <> Base) && ([] (Base -> X (!Base U Survey))) && "
        "([] (Survey -> X (!Survey U Report))) && ([] (Report -> X (!Report U Supply)))",
        atoms);
    RelaxedProduct p = build_relaxed_product(d, hard, soft, 500.0);
    CHECK(p.num_states() == 100u * hard.num_states * soft.num_states);
    CHECK(hard.num_states == 1); // plain safety reduces to a single monitor state
}

TEST_CASE("strict product edges are a subset of relaxed edges") {
    std::mt19937 rng(42);
    AtomSet atoms({"a", "b", "c"});
    Dts d = testsupport::random_dts(rng, atoms, 6);
    Nba hard = translate_to_nba("[] !c", atoms);
    Nba soft = translate_to_nba("[] <> a", atoms);
    RelaxedProduct relaxed = build_relaxed_product(d, hard, soft, 500.0);
    RelaxedProduct strict = build_strict_product(d, hard, soft);
    REQUIRE(relaxed.num_states() == strict.num_states());
    for (std::uint32_t s = 0; s < strict.num_states(); ++s) {
        for (auto i = strict.out_begin(s); i < strict.out_end(s); ++i) {
            int j = relaxed.find_edge(s, strict.edge(i).to);
            REQUIRE(j >= 0);
            // The matching relaxed edge is unrelaxed here: enabled hard move,
            // zero violation.
            CHECK(relaxed.edge(j).hard_blocked == 0);
            CHECK(relaxed.edge(j).violation == 0);
        }
    }
}

TEST_CASE("always-enabled labels collapse relaxed onto strict") {
    // Two states whose labels enable every automaton move at all times.
    AtomSet atoms({"a"});
    Dts d(atoms);
    auto q0 = d.add_state(0, 0, atoms.mask_of({"a"}));
    auto q1 = d.add_state(1, 0, atoms.mask_of({"a"}));
    d.add_edge(q0, q0, 1.0);
    d.add_edge(q1, q1, 1.0);
    d.add_edge(q0, q1);
    d.add_edge(q1, q0);
    d.set_initial(q0);
    d.finalize();
    Nba hard = universal_nba(atoms);
    Nba soft = translate_to_nba("[] a", atoms); // enabled exactly by {a}
    RelaxedProduct relaxed = build_relaxed_product(d, hard, soft, 500.0);
    RelaxedProduct strict = build_strict_product(d, hard, soft);
    REQUIRE(relaxed.num_edges() == strict.num_edges());
    for (std::uint32_t s = 0; s < relaxed.num_states(); ++s)
        for (auto i = relaxed.out_begin(s); i < relaxed.out_end(s); ++i) {
            CHECK(relaxed.edge(i).violation == 0);
            CHECK(relaxed.edge(i).hard_blocked == 0);
        }
}

TEST_CASE("trajectory weight sums h, omega, and scaled violations") {
    AtomSet atoms({"a", "g"});
    Dts d(atoms);
    auto q0 = d.add_state(0, 0, 0);
    auto q1 = d.add_state(1, 0, 0);
    auto q2 = d.add_state(2, 0, atoms.mask_of({"g"}));
    d.add_edge(q0, q1, 1.0);
    d.add_edge(q1, q2, 1.0);
    d.add_edge(q2, q2, 1.0);
    d.set_initial(q0);
    d.finalize();
    Nba hard = universal_nba(atoms);
    Nba soft = translate_to_nba("<> g", atoms);
    RelaxedProduct p = build_relaxed_product(d, hard, soft, 500.0);

    // Single state: empty sum.
    std::vector<std::uint32_t> single{p.initial().front()};
    CHECK(trajectory_weight(p, single) == 0.0);

    // Hand-picked 3-state path: unit omegas, one violating soft move.
    // From q0 (label {}) pretend that g was read: v = 1, so 1 + 1 + 500*1 + 0*... = 502.
    std::uint32_t s0 = p.initial().front();
    double expected = kInf;
    for (auto i = p.out_begin(s0); i < p.out_end(s0); ++i) {
        const auto& e1 = p.edge(i);
        if (p.cell_of(e1.to) != q1 || e1.violation != 1) continue;
        for (auto j = p.out_begin(e1.to); j < p.out_end(e1.to); ++j) {
            const auto& e2 = p.edge(j);
            if (p.cell_of(e2.to) != q2 || e2.violation != 0) continue;
            std::vector<std::uint32_t> path{s0, e1.to, e2.to};
            expected = trajectory_weight(p, path);
            CHECK(expected == 1.0 + 500.0 + 1.0);
        }
    }
    REQUIRE(expected != kInf);

    std::vector<std::uint32_t> bad{s0, p.initial().front()};
    CHECK_THROWS_AS(trajectory_weight(p, bad), non_transition);
}

TEST_CASE("hard-blocked edges poison the trajectory weight") {
    ExampleOne ex;
    RelaxedProduct p = build_relaxed_product(ex.dts, ex.hard, ex.soft, 500.0);
    // Moves out of q2 read {b, Obs}; the hard automaton refuses them.
    bool found_blocked = false;
    for (std::uint32_t s = 0; s < p.num_states(); ++s) {
        if (p.cell_of(s) != 2) continue;
        for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
            found_blocked = true;
            CHECK(p.edge(i).hard_blocked == 1);
            std::vector<std::uint32_t> path{s, p.edge(i).to};
            CHECK(trajectory_weight(p, path) == kInf);
        }
    }
    CHECK(found_blocked);
    CHECK_FALSE(p.has_finite_exit(p.id(2, 0, 0)));
}

TEST_CASE("finite-weight walks never use disabled hard moves") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        RelaxedProduct p = testsupport::random_product(rng, 5);
        // Random walks over finite edges; verify the hard move is enabled by
        // the known label of the source.
        std::uint32_t s = p.initial().front();
        for (int step = 0; step < 40; ++step) {
            std::vector<std::uint32_t> finite;
            for (auto i = p.out_begin(s); i < p.out_end(s); ++i)
                if (!p.edge(i).hard_blocked) finite.push_back(i);
            if (finite.empty()) break;
            auto pick = finite[uniform_int(rng, static_cast<std::uint32_t>(finite.size()))];
            CHECK_FALSE(p.edge(pick).hard_blocked);
            s = p.edge(pick).to;
        }
    }
}

TEST_CASE("relaxed product of the example has reachable accepting states with violations") {
    ExampleOne ex;
    RelaxedProduct p = build_relaxed_product(ex.dts, ex.hard, ex.soft, 500.0);
    bool has_violating_edge = false;
    for (std::uint32_t s = 0; s < p.num_states(); ++s)
        for (auto i = p.out_begin(s); i < p.out_end(s); ++i)
            if (p.edge(i).violation > 0) has_violating_edge = true;
    CHECK(has_violating_edge);
    FStarSet f = compute_f_star(p);
    CHECK(f.size() > 0);
}

TEST_CASE("product dump lists annotated edges") {
    ExampleOne ex;
    RelaxedProduct p = build_relaxed_product(ex.dts, ex.hard, ex.soft, 500.0);
    std::ostringstream os;
    dump_product(p, ex.dts, os);
    auto text = os.str();
    CHECK(text.find("h=inf") != std::string::npos);
    CHECK(text.find("v=1") != std::string::npos);
}

TEST_CASE("edge annotations match their defining label distances") {
    std::mt19937 rng(909);
    AtomSet atoms({"a", "b", "c"});
    for (int trial = 0; trial < 6; ++trial) {
        Dts d = testsupport::random_dts(rng, atoms, 5);
        Nba hard = translate_to_nba("[] !c", atoms);
        Nba soft = translate_to_nba("([] <> a) || (b U a)", atoms);
        RelaxedProduct p = build_relaxed_product(d, hard, soft, 500.0);
        for (std::uint32_t s = 0; s < p.num_states(); ++s) {
            LabelMask l = d.label(p.cell_of(s));
            for (auto i = p.out_begin(s); i < p.out_end(s); ++i) {
                const auto& e = p.edge(i);
                // v = Dist(L(q), X(ss, ss')), zero iff the label enables the move
                int dist = distance_to_set(l, soft.edges[e.soft_edge].labels);
                REQUIRE(e.violation == dist);
                REQUIRE((e.violation == 0) == soft.edges[e.soft_edge].enabled_by(l));
                // h = 0 iff the hard move is enabled by the current label
                REQUIRE((e.hard_blocked == 0) == hard.edges[e.hard_edge].enabled_by(l));
                // finite omega_P dominates the positive DTS weight
                if (!e.hard_blocked) {
                    REQUIRE(p.edge_weight(e) >= e.omega);
                    REQUIRE(e.omega > 0.0f);
                }
            }
        }
    }
}
