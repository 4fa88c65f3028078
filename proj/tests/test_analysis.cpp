#include <doctest.h>

#include <bisample/analysis.hpp>

#include "brute.hpp"

#include <numeric>
#include <random>
#include <set>

using namespace bisample;

namespace {

FGraph graph_of(int rows, int cols, const std::vector<Pos> &cells) {
    return FGraph::from_cells(rows, cols, cells);
}

const std::vector<Pos> eight_cycle{{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {3, 0}};

std::vector<Pos> random_cells(std::mt19937_64 &rng, int rows, int cols, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<Pos> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (coin(rng)) out.push_back({r, c});
    return out;
}

// Matching number by trying every subset of cells.
int brute_matching(const std::vector<Pos> &cells) {
    int best = 0;
    const std::size_t k = cells.size();
    for (std::uint64_t sub = 0; sub < (1ULL << k); ++sub) {
        std::set<int> rows;
        std::set<int> cols;
        bool ok = true;
        int size = 0;
        for (std::size_t t = 0; t < k && ok; ++t) {
            if (!((sub >> t) & 1U)) continue;
            ok = rows.insert(cells[t].row).second && cols.insert(cells[t].col).second;
            ++size;
        }
        if (ok) best = std::max(best, size);
    }
    return best;
}

}  // namespace

TEST_CASE("fgraph counts each cell once") {
    FGraph f(2, 3);
    f.add({0, 1});
    f.add({0, 1});
    f.add({1, 2});
    CHECK(f.edge_count() == 2);
    CHECK(f.neighbors(0) == std::vector<int>{3});
    CHECK(f.neighbors(4) == std::vector<int>{1});
    FixedSet fixed(2, 2);
    fixed.set(0, 0, CellFix::Edge);
    fixed.set(1, 1, CellFix::NonEdge);
    CHECK(FGraph(fixed).edge_count() == fixed.size());
}

TEST_CASE("matching examples") {
    CHECK_FALSE(max_matching_at_least(FGraph(3, 3), 3));
    CHECK(max_matching_at_least(graph_of(3, 3, {{0, 0}, {1, 1}, {2, 2}}), 3));
    CHECK_FALSE(max_matching_at_least(graph_of(1, 5, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}}), 2));
    CHECK_THROWS_AS(max_matching_at_least(FGraph(2, 2), 0), std::invalid_argument);
}

TEST_CASE("matching agrees with subset search") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 300; ++t) {
        const auto cells = random_cells(rng, 4, 4, 0.3);
        if (cells.size() > 12) continue;
        const int nu = brute_matching(cells);
        const FGraph f = graph_of(4, 4, cells);
        for (int k = 1; k <= 4; ++k) CHECK(max_matching_at_least(f, k) == (nu >= k));
    }
}

TEST_CASE("cycle examples") {
    const std::vector<Pos> tree{{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}};
    for (int len = 4; len <= 8; len += 2) CHECK_FALSE(has_cycle_of_length(graph_of(3, 3, tree), len));
    const FGraph eight = graph_of(4, 4, eight_cycle);
    CHECK(has_cycle_of_length(eight, 8));
    CHECK_FALSE(has_cycle_of_length(eight, 4));
    CHECK_FALSE(has_cycle_of_length(eight, 6));
    CHECK_THROWS_AS(has_cycle_of_length(eight, 5), std::invalid_argument);
}

TEST_CASE("cycle search agrees with exhaustive search") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 120; ++t) {
        const int rows = 3 + t % 3;
        const int cols = 3 + (t / 3) % 3;
        const auto cells = random_cells(rng, rows, cols, 0.45);
        const FGraph f = graph_of(rows, cols, cells);
        for (int len = 4; len <= 2 * std::min(rows, cols); len += 2)
            CHECK(has_cycle_of_length(f, len) == brute::has_cycle(cells, rows, cols, len));
    }
}

TEST_CASE("cycle search on a few 6x6 grids") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 4; ++t) {
        const auto cells = random_cells(rng, 6, 6, 0.3);
        const FGraph f = graph_of(6, 6, cells);
        for (int len = 4; len <= 10; len += 2)
            CHECK(has_cycle_of_length(f, len) == brute::has_cycle(cells, 6, 6, len));
    }
}

TEST_CASE("forest detection") {
    CHECK(is_forest(FGraph(3, 3)));
    CHECK_FALSE(is_forest(graph_of(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}})));
    std::mt19937_64 rng(4);
    for (int t = 0; t < 300; ++t) {
        const auto cells = random_cells(rng, 4, 5, 0.2);
        const FGraph f = graph_of(4, 5, cells);
        // Acyclic iff edges == touched vertices - components.
        std::vector<int> parent(9);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
            return v;
        };
        std::set<int> touched;
        for (const Pos p : cells) {
            touched.insert(p.row);
            touched.insert(4 + p.col);
            parent[static_cast<std::size_t>(find(p.row))] = find(4 + p.col);
        }
        std::set<int> roots;
        for (int v : touched) roots.insert(find(v));
        const bool expect = cells.size() == touched.size() - roots.size();
        CHECK(is_forest(f) == expect);
    }
}

TEST_CASE("coprime multiplier") {
    CHECK(find_coprime_odd_t(8) == 3);
    CHECK(find_coprime_odd_t(10) == 3);
    CHECK(find_coprime_odd_t(12) == 5);
    CHECK(find_coprime_odd_t(14) == 3);
    CHECK(find_coprime_odd_t(30) == 7);
    CHECK_THROWS_AS(find_coprime_odd_t(6), std::invalid_argument);
    CHECK_THROWS_AS(find_coprime_odd_t(11), std::invalid_argument);
}

TEST_CASE("odd chord predicate") {
    CHECK(is_odd_chord(0, 3, 8));
    CHECK(is_odd_chord(0, 5, 8));
    CHECK_FALSE(is_odd_chord(0, 1, 8));
    CHECK_FALSE(is_odd_chord(0, 4, 8));
    CHECK_FALSE(is_odd_chord(0, 7, 8));
}

TEST_CASE("chord cycle of length 8") {
    CHECK(chord_cycle(8, 8) == std::vector<int>{0, 3, 6, 1, 4, 7, 2, 5});
    std::vector<int> twelve(12);
    for (int i = 0; i < 12; ++i) twelve[static_cast<std::size_t>(i)] = 5 * i % 12;
    CHECK(chord_cycle(12, 12) == twelve);
}

TEST_CASE("chord cycles are simple with odd chords for every base up to 24") {
    for (int base = 8; base <= 24; base += 2) {
        for (int target = 8; target <= base; target += 2) {
            const auto cyc = chord_cycle(base, target);
            REQUIRE(static_cast<int>(cyc.size()) == target);
            CHECK(std::set<int>(cyc.begin(), cyc.end()).size() == cyc.size());
            for (std::size_t i = 0; i < cyc.size(); ++i) {
                CHECK(cyc[i] >= 0);
                CHECK(cyc[i] < base);
                CHECK(is_odd_chord(cyc[i], cyc[(i + 1) % cyc.size()], base));
            }
        }
    }
    CHECK_THROWS_AS(chord_cycle(10, 12), std::invalid_argument);
}

TEST_CASE("analysis cascade") {
    CHECK(analyze(FixedSet(3, 3)).recommended == MoveSet::trades());

    FixedSet matching(4, 3);
    for (int i = 0; i < 3; ++i) matching.set(i, i, CellFix::NonEdge);
    const AnalysisReport m = analyze(matching);
    CHECK(m.has_3_matching);
    CHECK_FALSE(m.has_8_cycle);
    CHECK(m.is_forest);
    CHECK(m.recommended == MoveSet::trades_plus_circle());

    FixedSet eight(5, 5);
    for (const Pos p : eight_cycle) eight.set(p, CellFix::NonEdge);
    const AnalysisReport e = analyze(eight);
    CHECK(e.has_8_cycle);
    CHECK_FALSE(e.is_forest);
    REQUIRE(e.min_excluded_ell);
    CHECK(*e.min_excluded_ell == 5);
    CHECK(e.recommended == MoveSet::swaps_up_to(8));
}

TEST_CASE("analysis without a usable bound") {
    // Complete 4x4: cycles of length 4, 6 and 8 all occur and the cap is 4.
    FixedSet full(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) full.set(r, c, CellFix::Edge);
    CHECK_THROWS_AS(analyze(full), NoUsableBound);
}

TEST_CASE("analysis invariants on random masks") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        FixedSet f(5, 5);
        const auto cells = random_cells(rng, 5, 5, 0.1 + 0.02 * (t % 20));
        for (const Pos p : cells) f.set(p, CellFix::NonEdge);
        const FGraph g(f);
        const bool has3 = max_matching_at_least(g, 3);
        const bool has8 = has_cycle_of_length(g, 8);
        if (is_forest(g)) CHECK_FALSE(has8);
        try {
            const AnalysisReport rep = analyze(f);
            if (!has3)
                CHECK(rep.recommended == MoveSet::trades());
            else if (!has8)
                CHECK(rep.recommended == MoveSet::trades_plus_circle());
            else
                CHECK(rep.recommended == MoveSet::swaps_up_to(2 * *rep.min_excluded_ell - 2));
        } catch (const NoUsableBound &) {
            CHECK(has3);
            CHECK(has8);
        }
        // Adding a cell never removes a 3-matching or an 8-cycle.
        FixedSet more = f;
        more.set(t % 5, (t / 5) % 5, CellFix::Edge);
        const FGraph g2(more);
        if (has3) CHECK(max_matching_at_least(g2, 3));
        if (has8) CHECK(has_cycle_of_length(g2, 8));
    }
}
