#pragma once

#include <bisample/core.hpp>

#include <optional>
#include <span>
#include <vector>

namespace bisample {

/// The fixed cells viewed as a bipartite graph; polarity is ignored.
/// Vertices are rows 0..n-1 followed by columns n..n+n'-1.
class FGraph {
public:
    FGraph(int rows, int cols);
    explicit FGraph(const FixedSet &fixed);
    static FGraph from_cells(int rows, int cols, std::span<const Pos> cells);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int vertex_count() const { return rows_ + cols_; }
    std::size_t edge_count() const { return edges_; }

    void add(Pos cell);
    bool has(Pos cell) const;
    /// Neighbours of a vertex in the combined numbering, ascending.
    const std::vector<int> &neighbors(int vertex) const { return adj_[static_cast<std::size_t>(vertex)]; }

private:
    int rows_;
    int cols_;
    std::size_t edges_ = 0;
    std::vector<std::vector<int>> adj_;
};

/// Augmenting paths with an early exit once k edges are matched.
bool max_matching_at_least(const FGraph &f, int k);

/// Exact-length simple cycle search; len counts vertices (= edges).
bool has_cycle_of_length(const FGraph &f, int len);

bool is_forest(const FGraph &f);

/// Smallest odd t in [3, cycle_len - 3] coprime to cycle_len.
int find_coprime_odd_t(int cycle_len);

/// True if positions a and b on a cycle of length cycle_len are an odd
/// number of steps apart, at least three, measured the short way round.
bool is_odd_chord(int a, int b, int cycle_len);

/// A simple cycle of target_len vertices of the base cycle v_0..v_{cycle_len-1}
/// in which every consecutive pair is an odd chord. For target_len equal to
/// cycle_len the cycle is v_{t*i mod cycle_len}; shorter targets drop the
/// last two base vertices and recurse.
std::vector<int> chord_cycle(int cycle_len, int target_len);

struct AnalysisReport {
    bool has_3_matching = false;
    bool has_8_cycle = false;
    bool is_forest = true;
    /// Smallest l >= 4 with no 2l-cycle in F, searched up to min(n, n').
    std::optional<int> min_excluded_ell;
    MoveSet recommended = MoveSet::trades();
};

/// Picks the cheapest chain known to be ergodic for F: trades when F has
/// no 3-matching, trades with circle trades when F has no 8-cycle, else
/// cycle swaps up to 2l-2. Throws NoUsableBound when no l is found.
AnalysisReport analyze(const FixedSet &fixed);

}  // namespace bisample
