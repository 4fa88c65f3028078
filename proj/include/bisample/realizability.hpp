#pragma once

#include <bisample/core.hpp>

#include <vector>

namespace bisample {

/// Gale-Ryser: with row degrees sorted descending, sum_{i<=k} a_i <=
/// sum_j min(b_j, k) for every k, the totals agree, and no degree exceeds
/// the opposite side's size. Negative entries are never realizable.
bool gale_ryser_realizable(const DegreeSequence &s);
bool gale_ryser_realizable(const std::vector<int> &rows, const std::vector<int> &cols);

/// One F-fixed realization, built by max-flow over the free cells after
/// pre-placing forced edges. Deterministic. Throws Infeasible.
Realization initial_realization(const Instance &inst);

/// Cells whose value is the same in every realization of a degree sequence.
class StaticSet {
public:
    StaticSet() = default;
    explicit StaticSet(FixedSet mask) : mask_(std::move(mask)) {}

    const FixedSet &mask() const { return mask_; }
    CellFix at(int row, int col) const { return mask_.at(row, col); }
    std::vector<Pos> forced_edges() const;
    std::vector<Pos> forced_non_edges() const;
    std::size_t size() const { return mask_.size(); }

    friend bool operator==(const StaticSet &, const StaticSet &) = default;

private:
    FixedSet mask_;
};

/// Per-cell Gale-Ryser sweep: (i,j) is a forced non-edge iff decrementing
/// a_i and b_j leaves an unrealizable sequence, and a forced edge iff the
/// same test fails on the complement sequence (n'-a_i), (n-b_j).
/// Throws NotRealizable.
StaticSet static_set(const DegreeSequence &s);

/// Same result as static_set, skipping every cell that sits on a 4-swap of g.
StaticSet static_set_pruned(const DegreeSequence &s, const Realization &g);

/// Cells lying on at least one alternating 4-cycle of g, row-major.
std::vector<Pos> swappable_cells(const Realization &g);

struct FixedPartition {
    FixedSet reduced;            // F = H \ F'
    std::vector<Pos> redundant;  // F* = H ∩ F', row-major
};

/// Splits the instance's fixed set H into the part not implied by the
/// static set and the redundant remainder. Throws PolarityConflict when H
/// forces a cell against the static set.
FixedPartition partition_fixed_set(const Instance &inst, const StaticSet &static_cells);

}  // namespace bisample
