#pragma once

// Shared domain types: degree sequences, fixed-cell masks, realizations,
// symmetric differences and cycle swaps.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bisample {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InstanceMismatch : public Error { public: using Error::Error; };
class FixedCellViolation : public Error { public: using Error::Error; };
class InvalidMove : public Error { public: using Error::Error; };
class Infeasible : public Error { public: using Error::Error; };
class NotRealizable : public Error { public: using Error::Error; };
class PolarityConflict : public Error { public: using Error::Error; };
class NoUsableBound : public Error { public: using Error::Error; };
class TooLarge : public Error { public: using Error::Error; };

struct Pos {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const Pos &, const Pos &) = default;
};

enum class CellFix : std::uint8_t { Free, Edge, NonEdge };

struct DegreeSequence {
    std::vector<int> rows;
    std::vector<int> cols;

    int num_rows() const { return static_cast<int>(rows.size()); }
    int num_cols() const { return static_cast<int>(cols.size()); }
    long row_total() const;
    long col_total() const;

    /// Throws std::invalid_argument on negative entries.
    void validate() const;

    friend bool operator==(const DegreeSequence &, const DegreeSequence &) = default;
};

/// n x n' grid of fixed cells. F_E are the Edge cells, F_N the NonEdge cells.
class FixedSet {
public:
    FixedSet() = default;
    FixedSet(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    CellFix at(int row, int col) const { return cells_[index(row, col)]; }
    CellFix at(Pos p) const { return at(p.row, p.col); }
    bool is_free(int row, int col) const { return at(row, col) == CellFix::Free; }
    void set(int row, int col, CellFix value);
    void set(Pos p, CellFix value) { set(p.row, p.col, value); }

    /// F_i: every column fixed in row i, edge or non-edge, ascending.
    std::vector<int> row_fixed(int row) const;
    /// Fixed cells in row-major order.
    std::vector<Pos> cells() const;
    std::size_t size() const;
    std::size_t count(CellFix value) const;
    bool empty() const { return size() == 0; }

    friend bool operator==(const FixedSet &, const FixedSet &) = default;

private:
    std::size_t index(int row, int col) const;

    int rows_ = 0;
    int cols_ = 0;
    std::vector<CellFix> cells_;
};

struct Instance {
    DegreeSequence degrees;
    FixedSet fixed;

    Instance() = default;
    Instance(DegreeSequence degrees, FixedSet fixed);
    /// Instance with an all-free mask.
    explicit Instance(DegreeSequence degrees);

    int rows() const { return degrees.num_rows(); }
    int cols() const { return degrees.num_cols(); }

    friend bool operator==(const Instance &, const Instance &) = default;
};

/// Short hex digest identifying an instance in reports.
std::string instance_digest(const Instance &inst);

/// A 0/1 biadjacency matrix. The matrix is authoritative; the sorted row
/// adjacency lists A_i are kept in sync on every mutation.
class Realization {
public:
    Realization() = default;
    Realization(int rows, int cols);
    /// Builds from a row-major list of 0/1 rows.
    static Realization from_matrix(const std::vector<std::vector<int>> &matrix);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool at(int row, int col) const { return cells_[index(row, col)] != 0; }
    bool at(Pos p) const { return at(p.row, p.col); }
    void set(int row, int col, bool value);
    void set(Pos p, bool value) { set(p.row, p.col, value); }
    void flip(Pos p) { set(p, !at(p)); }

    std::span<const int> row(int r) const { return adjacency_[static_cast<std::size_t>(r)]; }
    /// Replaces A_r; `cols` must be sorted and duplicate-free.
    void assign_row(int r, std::vector<int> cols);

    std::vector<int> row_sums() const;
    std::vector<int> col_sums() const;
    std::size_t edge_count() const;

    /// Degrees and every fixed cell honoured.
    bool satisfies(const Instance &inst) const;
    bool rows_in_sync() const;

    std::string bit_string() const;
    /// Row-major bits with cell (0,0) most significant; needs rows*cols <= 64.
    std::uint64_t bits() const;
    static Realization from_bits(int rows, int cols, std::uint64_t bits);

    friend bool operator==(const Realization &a, const Realization &b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
    }
    friend std::strong_ordering operator<=>(const Realization &a, const Realization &b);

private:
    std::size_t index(int row, int col) const;

    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> cells_;
    std::vector<std::vector<int>> adjacency_;
};

// Symmetric difference ---------------------------------------------------

enum class Owner : std::uint8_t { First, Second };

struct DiffEdge {
    Pos cell;
    Owner owner;  // First: edge of g only, Second: edge of h only

    friend bool operator==(const DiffEdge &, const DiffEdge &) = default;
};

/// Cells of a closed alternating walk in walk order. Consecutive cells
/// (cyclically) share a row or a column, alternating between the two.
using CellCycle = std::vector<Pos>;

struct ClosedWalk {
    CellCycle cells;
    std::vector<CellCycle> cycles;  // vertex-disjoint split of `cells`
};

struct SymDiff {
    std::vector<DiffEdge> edges;  // row-major
    std::vector<ClosedWalk> walks;

    bool empty() const { return edges.empty(); }
    std::size_t size() const { return edges.size(); }
    std::vector<CellCycle> cycles() const;
};

/// Edge-disjoint decomposition of g△h into closed alternating walks, each
/// further split into vertex-disjoint alternating cycles. Walks start at the
/// smallest unused cell and always continue along the smallest-indexed
/// unused edge of the other owner.
SymDiff symmetric_difference(const Realization &g, const Realization &h);

/// Vertex sequence of a cell cycle; rows are encoded as r, columns as
/// rows + c. Throws InvalidMove if the cells do not form a simple even
/// cycle of length >= 4.
std::vector<int> cycle_vertices(std::span<const Pos> cycle, int rows);

/// True if `cycle` is a vertex-disjoint cycle whose cells alternate between
/// edges and non-edges of g. Fixed cells are not considered.
bool is_alternating_cycle(const Realization &g, std::span<const Pos> cycle);

/// Swaps edges and non-edges along `cycle`.
Realization apply_cycle_swap(const Realization &g, const FixedSet &fixed, std::span<const Pos> cycle);
void apply_cycle_swap_in_place(Realization &g, const FixedSet &fixed, std::span<const Pos> cycle);

// Move sets -------------------------------------------------------------

class MoveSet {
public:
    enum class Kind { Swaps4, Swaps46, SwapsUpTo, Trades, TradesPlusCircle };

    static MoveSet swaps4() { return MoveSet(Kind::Swaps4, 4); }
    static MoveSet swaps46() { return MoveSet(Kind::Swaps46, 6); }
    /// j-swaps with 4 <= j <= max_len; max_len must be even and >= 4.
    static MoveSet swaps_up_to(int max_len);
    static MoveSet trades() { return MoveSet(Kind::Trades, 0); }
    static MoveSet trades_plus_circle() { return MoveSet(Kind::TradesPlusCircle, 0); }

    /// Accepts the names produced by name().
    static MoveSet parse(const std::string &name);

    Kind kind() const { return kind_; }
    bool is_swap_kind() const;
    /// Longest allowed cycle for the swap kinds, 0 for trade kinds.
    int max_cycle_length() const { return max_len_; }
    /// "swaps4", "swaps46", "cycle:L", "trades" or "trades+circle".
    std::string name() const;

    friend bool operator==(const MoveSet &, const MoveSet &) = default;

private:
    MoveSet(Kind kind, int max_len) : kind_(kind), max_len_(max_len) {}

    Kind kind_;
    int max_len_;
};

}  // namespace bisample
