#include <doctest.h>

#include <bisample/io.hpp>
#include <bisample/oracle.hpp>

#include "brute.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace bisample;

namespace {

std::string data(const std::string &name) { return std::string(BISAMPLE_TEST_DATA) + "/" + name; }

std::set<std::pair<int, int>> edge_set(const StateGraph &sg) {
    std::set<std::pair<int, int>> out;
    for (std::size_t a = 0; a < sg.size(); ++a)
        for (const auto &e : sg.adj[a]) out.insert({static_cast<int>(a), e.to});
    return out;
}

Instance derangements() {
    FixedSet f(3, 3);
    for (int i = 0; i < 3; ++i) f.set(i, i, CellFix::NonEdge);
    return Instance(DegreeSequence{{1, 1, 1}, {1, 1, 1}}, f);
}

}  // namespace

TEST_CASE("enumeration counts") {
    CHECK(enumerate_keys(read_instance(data("free_2x2.inst"))).size() == 2);
    CHECK(enumerate_keys(read_instance(data("permutations_3x3.inst"))).size() == 6);
    CHECK(enumerate_keys(Instance(DegreeSequence{{2, 2, 2}, {2, 2, 2}})).size() == 6);
    CHECK(enumerate_keys(Instance(DegreeSequence{{2, 2, 2, 2}, {2, 2, 2, 2}})).size() == 90);
    CHECK(enumerate_keys(derangements()).size() == 2);
    CHECK(enumerate_keys(read_instance(data("infeasible.inst"))).empty());
    CHECK_THROWS_AS(enumerate_keys(read_instance(data("too_large.inst"))), TooLarge);
}

TEST_CASE("enumeration agrees with brute force on random masked instances") {
    std::mt19937_64 rng(31);
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution fix(0.25);
    for (int t = 0; t < 150; ++t) {
        const int n = 2 + t % 3;
        const int m = 2 + (t / 3) % 3;
        Realization g(n, m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c) g.set(r, c, coin(rng));
        FixedSet f(n, m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c)
                if (fix(rng)) f.set(r, c, g.at(r, c) ? CellFix::Edge : CellFix::NonEdge);
        const Instance inst(DegreeSequence{g.row_sums(), g.col_sums()}, f);
        const auto keys = enumerate_keys(inst);
        CHECK(keys == brute::realizations(inst));
        const auto states = enumerate_realizations(inst);
        REQUIRE(states.size() == keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i) CHECK(states[i].bits() == keys[i]);
    }
}

TEST_CASE("difference shapes") {
    const auto key = [](std::vector<std::vector<int>> m) { return Realization::from_matrix(m).bits(); };
    const DiffShape four = diff_shape(key({{1, 0}, {0, 1}}), key({{0, 1}, {1, 0}}), 2, 2);
    CHECK(four.cells == 4);
    CHECK(four.rows_touched == 2);
    CHECK(four.single_cycle);
    CHECK_FALSE(four.circle_rotation);

    const std::uint64_t a = key({{0, 1, 0, 1, 0, 0}, {0, 0, 1, 0, 1, 0}, {1, 0, 0, 0, 0, 1}});
    const std::uint64_t b = key({{0, 0, 1, 0, 1, 0}, {1, 0, 0, 0, 0, 1}, {0, 1, 0, 1, 0, 0}});
    const DiffShape rot = diff_shape(a, b, 3, 6);
    CHECK(rot.cells == 12);
    CHECK(rot.rows_touched == 3);
    CHECK_FALSE(rot.single_cycle);
    CHECK(rot.circle_rotation);

    // Two disjoint 4-cycles are not one swap.
    const DiffShape two = diff_shape(key({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}),
                                     key({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}), 4, 4);
    CHECK(two.cells == 8);
    CHECK_FALSE(two.single_cycle);
    CHECK_FALSE(two.circle_rotation);
}

TEST_CASE("state graphs are undirected and nested") {
    for (const char *name : {"forest.inst", "eight_cycle.inst", "permutations_3x3.inst", "split_components.inst"}) {
        const Instance inst = read_instance(data(name));
        const auto keys = enumerate_keys(inst);
        const int n = inst.rows();
        const int m = inst.cols();
        const auto s4 = edge_set(build_state_graph(keys, n, m, MoveSet::swaps4()));
        const auto s46 = edge_set(build_state_graph(keys, n, m, MoveSet::swaps46()));
        const auto s8 = edge_set(build_state_graph(keys, n, m, MoveSet::swaps_up_to(8)));
        const auto tr = edge_set(build_state_graph(keys, n, m, MoveSet::trades()));
        const auto tc = edge_set(build_state_graph(keys, n, m, MoveSet::trades_plus_circle()));
        for (const auto *es : {&s4, &s46, &s8, &tr, &tc})
            for (const auto &[a, b] : *es) {
                CHECK(a != b);
                CHECK(es->count({b, a}) == 1);
            }
        CHECK(std::includes(s46.begin(), s46.end(), s4.begin(), s4.end()));
        CHECK(std::includes(s8.begin(), s8.end(), s46.begin(), s46.end()));
        CHECK(std::includes(tr.begin(), tr.end(), s4.begin(), s4.end()));
        CHECK(std::includes(tc.begin(), tc.end(), tr.begin(), tr.end()));
    }
}

TEST_CASE("state graph from realizations matches the key overload") {
    const Instance inst = read_instance(data("eight_cycle.inst"));
    const auto sg1 = build_state_graph(enumerate_realizations(inst), MoveSet::swaps46());
    const auto sg2 = build_state_graph(enumerate_keys(inst), inst.rows(), inst.cols(), MoveSet::swaps46());
    CHECK(sg1.states == sg2.states);
    CHECK(edge_set(sg1) == edge_set(sg2));
    CHECK(sg1.edge_count() == sg2.edge_count());
    CHECK(sg1.index_of(sg1.states.back()) == static_cast<int>(sg1.size()) - 1);
    CHECK(sg1.index_of(0) == -1);
}

TEST_CASE("connectivity and distance on permutation matrices") {
    const Instance inst = read_instance(data("permutations_3x3.inst"));
    const StateGraph sg = build_state_graph(enumerate_keys(inst), 3, 3, MoveSet::swaps4());
    CHECK(sg.edge_count() == 9);
    CHECK(check_connectivity(sg).connected());
    const DistanceCheck d = distance_bound(sg);
    CHECK(d.connected);
    // A 3-cycle of columns differs in 6 cells and needs 2 transpositions.
    CHECK(d.holds);
    CHECK(check_distance_bound(sg));
}

TEST_CASE("derangements need 6-swaps") {
    const Instance inst = derangements();
    const auto keys = enumerate_keys(inst);
    const StateGraph s4 = build_state_graph(keys, 3, 3, MoveSet::swaps4());
    const Components c = check_connectivity(s4);
    CHECK(c.count == 2);
    CHECK(c.members() == std::vector<std::vector<int>>{{0}, {1}});
    CHECK(components_isomorphic(s4));
    const DistanceCheck d = distance_bound(s4);
    CHECK_FALSE(d.connected);
    CHECK_FALSE(d.holds);
    CHECK(check_connectivity(build_state_graph(keys, 3, 3, MoveSet::swaps46())).connected());
    CHECK(check_connectivity(build_state_graph(keys, 3, 3, MoveSet::trades_plus_circle())).connected());
}

TEST_CASE("split instance: two non-isomorphic swap components") {
    const Instance inst = read_instance(data("split_components.inst"));
    const auto keys = enumerate_keys(inst);
    const StateGraph s4 = build_state_graph(keys, 4, 3, MoveSet::swaps4());
    CHECK(check_connectivity(s4).count == 2);
    CHECK_FALSE(components_isomorphic(s4));
    CHECK(check_connectivity(build_state_graph(keys, 4, 3, MoveSet::trades())).count == 2);
    CHECK(check_connectivity(build_state_graph(keys, 4, 3, MoveSet::trades_plus_circle())).connected());
}

TEST_CASE("split search finds the frozen witness") {
    const auto found = search_split_instances();
    REQUIRE_FALSE(found.empty());
    const Instance frozen = read_instance(data("split_components.inst"));
    bool present = false;
    for (const auto &w : found) {
        CHECK(w.swap4_components == 2);
        CHECK_FALSE(w.isomorphic);
        CHECK(w.circle_connected);
        CHECK(w.inst.degrees.rows == std::vector<int>{1, 1, 1, 1});
        CHECK(w.inst.degrees.cols == std::vector<int>{2, 1, 1});
        present = present || (w.inst.fixed == frozen.fixed);
    }
    CHECK(present);
    CHECK(found.front().inst.fixed == frozen.fixed);
}

TEST_CASE("static set ground truth") {
    const Instance inst = read_instance(data("static_only.inst"));
    const auto all = enumerate_keys(Instance(inst.degrees));
    CHECK(check_static_set(inst.degrees, all));
    const StaticSet st = static_set_from(inst.degrees, all);
    CHECK(st.size() == 4);
    CHECK(st.forced_edges() == std::vector<Pos>{{0, 0}, {0, 1}, {1, 0}});
    const DegreeSequence perm{{1, 1, 1}, {1, 1, 1}};
    CHECK(static_set_from(perm, enumerate_keys(Instance(perm))).size() == 0);
}

TEST_CASE("uniformity report on a free instance") {
    const Instance inst = read_instance(data("permutations_3x3.inst"));
    ChainConfig cfg;
    cfg.steps = 60000;
    cfg.sample_gap = 3;
    cfg.seed = 4;
    const UniformityReport rep = uniformity_report(inst, cfg);
    CHECK(rep.states == 6);
    CHECK(rep.samples == 20000);
    CHECK(rep.tv_distance < 0.03);
    CHECK(rep.chi_square_p > 0.001);
}

TEST_CASE("uniformity report flags a chain stuck in one component") {
    const Instance inst = read_instance(data("split_components.inst"));
    ChainConfig cfg;
    cfg.move_set = MoveSet::swaps4();
    cfg.steps = 3000;
    cfg.seed = 1;
    const UniformityReport rep = uniformity_report(inst, cfg);
    CHECK(rep.tv_distance > 0.3);
    CHECK(rep.chi_square_p < 1e-6);
}

TEST_CASE("exact kernels") {
    for (const char *name : {"forest.inst", "permutations_3x3.inst", "split_components.inst", "eight_cycle.inst"}) {
        const Instance inst = read_instance(data(name));
        const auto keys = enumerate_keys(inst);
        const ReversibilityResult t = trades_reversibility(inst, keys);
        CHECK(t.pairs_checked > 0);
        CHECK(t.violations == 0);
        CHECK(t.rows_sum_to_one);
        const ReversibilityResult c = circle_reversibility(inst, keys, true);
        CHECK(c.violations == 0);
        CHECK(c.rows_sum_to_one);
        CHECK(circle_reversibility(inst, keys, false).rows_sum_to_one);
    }
}

TEST_CASE("uncorrected circle trades can break detailed balance") {
    // Unequal candidate sets make forward and reverse selection odds differ.
    std::size_t broken = 0;
    PoolOptions opts;
    opts.exhaustive_rows = 0;
    opts.random_rows = 4;
    opts.random_cols = 4;
    opts.random_count = 40;
    opts.seed = 3;
    for_each_pool_instance(opts, [&](const Instance &inst, PoolClass, const std::vector<std::uint64_t> &keys) {
        if (keys.size() > 60) return;
        CHECK(circle_reversibility(inst, keys, true).violations == 0);
        if (circle_reversibility(inst, keys, false).violations > 0) ++broken;
    });
    CHECK(broken > 0);
}

TEST_CASE("pool covers the exhaustive range and caps random instances") {
    PoolOptions opts;
    opts.exhaustive_rows = 2;
    opts.exhaustive_cols = 2;
    opts.max_fixed = 4;
    opts.random_count = 10;
    opts.random_rows = 4;
    opts.random_cols = 4;
    opts.random_state_cap = 50;
    std::size_t exhaustive = 0;
    std::size_t no_matching = 0;
    std::size_t general = 0;
    for_each_pool_instance(opts, [&](const Instance &inst, PoolClass cls, const std::vector<std::uint64_t> &keys) {
        CHECK_FALSE(keys.empty());
        CHECK(keys == enumerate_keys(inst));
        switch (cls) {
        case PoolClass::Exhaustive:
            ++exhaustive;
            CHECK(inst.rows() <= 2);
            CHECK(inst.fixed.size() <= 4);
            break;
        case PoolClass::RandomNoMatching:
            ++no_matching;
            CHECK(keys.size() <= 50);
            break;
        case PoolClass::RandomGeneral:
            ++general;
            CHECK(keys.size() <= 50);
            break;
        }
    });
    CHECK(exhaustive > 10);
    CHECK(no_matching == 10);
    CHECK(general == 10);
}

TEST_CASE("verify passes on a small pool") {
    VerifyOptions opts;
    opts.pool.exhaustive_rows = 2;
    opts.pool.exhaustive_cols = 3;
    opts.pool.random_rows = 4;
    opts.pool.random_cols = 4;
    opts.pool.random_count = 15;
    const VerifyReport rep = verify(opts);
    CHECK(rep.instances > 0);
    CHECK(rep.passed());
    REQUIRE(rep.find("static_set") != nullptr);
    CHECK(rep.find("static_set")->applied > 0);
    CHECK(rep.find("nope") == nullptr);
    CHECK_FALSE(rep.first_witness());
    const std::string text = format_report(rep);
    CHECK(text.find("check static_set applied=") != std::string::npos);
    CHECK(text.find("check circle_mh_reversible") != std::string::npos);
    CHECK(text.substr(text.size() - 5) == "PASS\n");
}

TEST_CASE("verify catches a chain without 6-swaps") {
    VerifyOptions opts;
    opts.pool.exhaustive_rows = 3;
    opts.pool.exhaustive_cols = 3;
    opts.pool.max_fixed = 3;
    opts.pool.random_count = 0;
    opts.checks = check_six;
    CHECK(verify(opts).passed());
    opts.drop_six_swaps = true;
    const VerifyReport rep = verify(opts);
    CHECK_FALSE(rep.passed());
    const CheckTally *t = rep.find("swaps46_connected_no_8_cycle");
    REQUIRE(t != nullptr);
    CHECK(t->failed > 0);
    REQUIRE(rep.first_witness());
    const Instance w = *rep.first_witness();
    const auto keys = enumerate_keys(w);
    CHECK_FALSE(check_connectivity(build_state_graph(keys, w.rows(), w.cols(), MoveSet::swaps4())).connected());
    CHECK(format_report(rep).find("FAIL witness=" + instance_digest(w)) != std::string::npos);
}
