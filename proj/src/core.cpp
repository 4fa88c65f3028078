#include <bisample/core.hpp>

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <numeric>

namespace bisample {

long DegreeSequence::row_total() const { return std::accumulate(rows.begin(), rows.end(), 0L); }
long DegreeSequence::col_total() const { return std::accumulate(cols.begin(), cols.end(), 0L); }

void DegreeSequence::validate() const {
    for (int a : rows)
        if (a < 0) throw std::invalid_argument("negative row degree");
    for (int b : cols)
        if (b < 0) throw std::invalid_argument("negative column degree");
}

// FixedSet ---------------------------------------------------------------

FixedSet::FixedSet(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative mask dimension");
    cells_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), CellFix::Free);
}

std::size_t FixedSet::index(int row, int col) const {
    assert(row >= 0 && row < rows_ && col >= 0 && col < cols_);
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(col);
}

void FixedSet::set(int row, int col, CellFix value) { cells_[index(row, col)] = value; }

std::vector<int> FixedSet::row_fixed(int row) const {
    std::vector<int> out;
    for (int c = 0; c < cols_; ++c)
        if (at(row, c) != CellFix::Free) out.push_back(c);
    return out;
}

std::vector<Pos> FixedSet::cells() const {
    std::vector<Pos> out;
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            if (at(r, c) != CellFix::Free) out.push_back({r, c});
    return out;
}

std::size_t FixedSet::size() const {
    return cells_.size() - count(CellFix::Free);
}

std::size_t FixedSet::count(CellFix value) const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), value));
}

// Instance ---------------------------------------------------------------

Instance::Instance(DegreeSequence degrees_, FixedSet fixed_)
    : degrees(std::move(degrees_)), fixed(std::move(fixed_)) {
    degrees.validate();
    if (fixed.rows() != degrees.num_rows() || fixed.cols() != degrees.num_cols())
        throw InstanceMismatch("mask dimensions differ from the degree sequence");
}

Instance::Instance(DegreeSequence degrees_)
    : Instance(degrees_, FixedSet(degrees_.num_rows(), degrees_.num_cols())) {}

std::string instance_digest(const Instance &inst) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(inst.rows()));
    mix(static_cast<std::uint64_t>(inst.cols()));
    for (int a : inst.degrees.rows) mix(static_cast<std::uint64_t>(a) + 17);
    mix(0xff);
    for (int b : inst.degrees.cols) mix(static_cast<std::uint64_t>(b) + 17);
    for (int r = 0; r < inst.rows(); ++r)
        for (int c = 0; c < inst.cols(); ++c) mix(static_cast<std::uint64_t>(inst.fixed.at(r, c)) + 3);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Realization ------------------------------------------------------------

Realization::Realization(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative realization dimension");
    cells_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
    adjacency_.assign(static_cast<std::size_t>(rows), {});
}

Realization Realization::from_matrix(const std::vector<std::vector<int>> &matrix) {
    const int rows = static_cast<int>(matrix.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(matrix.front().size());
    Realization g(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(matrix[static_cast<std::size_t>(r)].size()) != cols)
            throw std::invalid_argument("ragged matrix");
        for (int c = 0; c < cols; ++c) {
            const int v = matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (v != 0 && v != 1) throw std::invalid_argument("matrix entries must be 0 or 1");
            if (v) g.set(r, c, true);
        }
    }
    return g;
}

std::size_t Realization::index(int row, int col) const {
    assert(row >= 0 && row < rows_ && col >= 0 && col < cols_);
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(col);
}

void Realization::set(int row, int col, bool value) {
    auto &cell = cells_[index(row, col)];
    if ((cell != 0) == value) return;
    cell = value ? 1 : 0;
    auto &adj = adjacency_[static_cast<std::size_t>(row)];
    auto it = std::lower_bound(adj.begin(), adj.end(), col);
    if (value)
        adj.insert(it, col);
    else
        adj.erase(it);
}

void Realization::assign_row(int r, std::vector<int> cols) {
    assert(std::is_sorted(cols.begin(), cols.end()));
    auto &adj = adjacency_[static_cast<std::size_t>(r)];
    for (int c : adj) cells_[index(r, c)] = 0;
    for (int c : cols) cells_[index(r, c)] = 1;
    adj = std::move(cols);
}

std::vector<int> Realization::row_sums() const {
    std::vector<int> out(static_cast<std::size_t>(rows_));
    for (int r = 0; r < rows_; ++r) out[static_cast<std::size_t>(r)] = static_cast<int>(row(r).size());
    return out;
}

std::vector<int> Realization::col_sums() const {
    std::vector<int> out(static_cast<std::size_t>(cols_), 0);
    for (int r = 0; r < rows_; ++r)
        for (int c : row(r)) ++out[static_cast<std::size_t>(c)];
    return out;
}

std::size_t Realization::edge_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

bool Realization::satisfies(const Instance &inst) const {
    if (inst.rows() != rows_ || inst.cols() != cols_) return false;
    if (row_sums() != inst.degrees.rows || col_sums() != inst.degrees.cols) return false;
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            const CellFix f = inst.fixed.at(r, c);
            if (f == CellFix::Edge && !at(r, c)) return false;
            if (f == CellFix::NonEdge && at(r, c)) return false;
        }
    }
    return true;
}

bool Realization::rows_in_sync() const {
    for (int r = 0; r < rows_; ++r) {
        std::vector<int> expect;
        for (int c = 0; c < cols_; ++c)
            if (at(r, c)) expect.push_back(c);
        const auto got = row(r);
        if (!std::equal(expect.begin(), expect.end(), got.begin(), got.end())) return false;
    }
    return true;
}

std::string Realization::bit_string() const {
    std::string out;
    out.reserve(cells_.size());
    for (auto v : cells_) out.push_back(v ? '1' : '0');
    return out;
}

std::uint64_t Realization::bits() const {
    if (cells_.size() > 64) throw TooLarge("realization has more than 64 cells");
    std::uint64_t out = 0;
    for (auto v : cells_) out = (out << 1) | v;
    return out;
}

Realization Realization::from_bits(int rows, int cols, std::uint64_t bits) {
    Realization g(rows, cols);
    const int total = rows * cols;
    if (total > 64) throw TooLarge("realization has more than 64 cells");
    for (int r = 0; r < rows; ++r) {
        auto &adj = g.adjacency_[static_cast<std::size_t>(r)];
        for (int c = 0; c < cols; ++c) {
            const int shift = total - 1 - (r * cols + c);
            if ((bits >> shift) & 1U) {
                g.cells_[g.index(r, c)] = 1;
                adj.push_back(c);
            }
        }
    }
    return g;
}

std::strong_ordering operator<=>(const Realization &a, const Realization &b) {
    if (auto cmp = a.rows_ <=> b.rows_; cmp != 0) return cmp;
    if (auto cmp = a.cols_ <=> b.cols_; cmp != 0) return cmp;
    return std::lexicographical_compare_three_way(a.cells_.begin(), a.cells_.end(), b.cells_.begin(),
                                                  b.cells_.end());
}

// Symmetric difference ---------------------------------------------------

std::vector<CellCycle> SymDiff::cycles() const {
    std::vector<CellCycle> out;
    for (const auto &w : walks) out.insert(out.end(), w.cycles.begin(), w.cycles.end());
    return out;
}

SymDiff symmetric_difference(const Realization &g, const Realization &h) {
    if (g.rows() != h.rows() || g.cols() != h.cols())
        throw InstanceMismatch("realizations have different dimensions");
    const int n = g.rows();
    const int m = g.cols();

    SymDiff diff;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c)
            if (g.at(r, c) != h.at(r, c)) diff.edges.push_back({{r, c}, g.at(r, c) ? Owner::First : Owner::Second});
    if (diff.edges.empty()) return diff;

    // Incident edges per vertex, ordered by the other endpoint. Row-major
    // edge order already sorts a row's edges by column; columns need rows.
    std::vector<std::vector<int>> incident(static_cast<std::size_t>(n + m));
    for (int e = 0; e < static_cast<int>(diff.edges.size()); ++e) {
        const Pos p = diff.edges[static_cast<std::size_t>(e)].cell;
        incident[static_cast<std::size_t>(p.row)].push_back(e);
        incident[static_cast<std::size_t>(n + p.col)].push_back(e);
    }
    auto other_end = [&](int e, int v) {
        const Pos p = diff.edges[static_cast<std::size_t>(e)].cell;
        return v == p.row ? n + p.col : p.row;
    };

    std::vector<char> used(diff.edges.size(), 0);
    for (int first = 0; first < static_cast<int>(diff.edges.size()); ++first) {
        if (used[static_cast<std::size_t>(first)]) continue;
        const Owner start_owner = diff.edges[static_cast<std::size_t>(first)].owner;
        const int start = diff.edges[static_cast<std::size_t>(first)].cell.row;

        std::vector<int> walk_edges{first};
        std::vector<int> walk_vertices{start};
        used[static_cast<std::size_t>(first)] = 1;
        int current = other_end(first, start);
        Owner last = start_owner;
        while (!(current == start && last != start_owner)) {
            int next = -1;
            for (int e : incident[static_cast<std::size_t>(current)]) {
                if (!used[static_cast<std::size_t>(e)] && diff.edges[static_cast<std::size_t>(e)].owner != last) {
                    next = e;
                    break;
                }
            }
            // Equal owner counts at every vertex guarantee a continuation.
            assert(next >= 0);
            used[static_cast<std::size_t>(next)] = 1;
            walk_vertices.push_back(current);
            walk_edges.push_back(next);
            last = diff.edges[static_cast<std::size_t>(next)].owner;
            current = other_end(next, current);
        }

        ClosedWalk walk;
        for (int e : walk_edges) walk.cells.push_back(diff.edges[static_cast<std::size_t>(e)].cell);

        // Split at repeated vertices; the stack never holds a vertex twice.
        std::vector<int> stack_vertices{walk_vertices.front()};
        std::vector<int> stack_edges;
        std::vector<int> position(static_cast<std::size_t>(n + m), -1);
        position[static_cast<std::size_t>(walk_vertices.front())] = 0;
        const std::size_t len = walk_edges.size();
        for (std::size_t k = 1; k <= len; ++k) {
            const int e = walk_edges[k - 1];
            const int v = k == len ? walk_vertices.front() : walk_vertices[k];
            const int p = position[static_cast<std::size_t>(v)];
            if (p >= 0) {
                CellCycle cycle;
                for (std::size_t i = static_cast<std::size_t>(p); i < stack_edges.size(); ++i)
                    cycle.push_back(diff.edges[static_cast<std::size_t>(stack_edges[i])].cell);
                cycle.push_back(diff.edges[static_cast<std::size_t>(e)].cell);
                walk.cycles.push_back(std::move(cycle));
                for (std::size_t i = static_cast<std::size_t>(p) + 1; i < stack_vertices.size(); ++i)
                    position[static_cast<std::size_t>(stack_vertices[i])] = -1;
                stack_vertices.resize(static_cast<std::size_t>(p) + 1);
                stack_edges.resize(static_cast<std::size_t>(p));
            } else {
                position[static_cast<std::size_t>(v)] = static_cast<int>(stack_vertices.size());
                stack_vertices.push_back(v);
                stack_edges.push_back(e);
            }
        }
        diff.walks.push_back(std::move(walk));
    }
    return diff;
}

std::vector<int> cycle_vertices(std::span<const Pos> cycle, int rows) {
    const std::size_t len = cycle.size();
    if (len < 4 || len % 2 != 0) throw InvalidMove("cycle length must be even and at least 4");

    std::vector<int> vertices(len);
    std::vector<bool> via_row(len);
    for (std::size_t k = 0; k < len; ++k) {
        const Pos a = cycle[k];
        const Pos b = cycle[(k + 1) % len];
        if (a == b) throw InvalidMove("repeated cell in cycle");
        if (a.row == b.row) {
            vertices[k] = a.row;
            via_row[k] = true;
        } else if (a.col == b.col) {
            vertices[k] = rows + a.col;
            via_row[k] = false;
        } else {
            throw InvalidMove("consecutive cycle cells share neither row nor column");
        }
    }
    for (std::size_t k = 0; k < len; ++k)
        if (via_row[k] == via_row[(k + 1) % len]) throw InvalidMove("cycle does not alternate rows and columns");

    std::vector<int> sorted = vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidMove("cycle is not vertex-disjoint");
    return vertices;
}

bool is_alternating_cycle(const Realization &g, std::span<const Pos> cycle) {
    try {
        cycle_vertices(cycle, g.rows());
    } catch (const InvalidMove &) {
        return false;
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const Pos p = cycle[k];
        if (p.row < 0 || p.row >= g.rows() || p.col < 0 || p.col >= g.cols()) return false;
        if (g.at(p) == g.at(cycle[(k + 1) % cycle.size()])) return false;
    }
    return true;
}

void apply_cycle_swap_in_place(Realization &g, const FixedSet &fixed, std::span<const Pos> cycle) {
    if (fixed.rows() != g.rows() || fixed.cols() != g.cols())
        throw InstanceMismatch("mask dimensions differ from the realization");
    cycle_vertices(cycle, g.rows());
    for (const Pos p : cycle) {
        if (p.row < 0 || p.row >= g.rows() || p.col < 0 || p.col >= g.cols())
            throw InvalidMove("cycle cell out of range");
        if (!fixed.is_free(p.row, p.col)) throw FixedCellViolation("cycle touches a fixed cell");
    }
    if (!is_alternating_cycle(g, cycle)) throw InvalidMove("cycle does not alternate edges and non-edges");
    for (const Pos p : cycle) g.flip(p);
}

Realization apply_cycle_swap(const Realization &g, const FixedSet &fixed, std::span<const Pos> cycle) {
    Realization out = g;
    apply_cycle_swap_in_place(out, fixed, cycle);
    return out;
}

// MoveSet ----------------------------------------------------------------

MoveSet MoveSet::swaps_up_to(int max_len) {
    if (max_len < 4 || max_len % 2 != 0)
        throw std::invalid_argument("cycle bound must be even and at least 4");
    return MoveSet(Kind::SwapsUpTo, max_len);
}

bool MoveSet::is_swap_kind() const {
    return kind_ == Kind::Swaps4 || kind_ == Kind::Swaps46 || kind_ == Kind::SwapsUpTo;
}

std::string MoveSet::name() const {
    switch (kind_) {
    case Kind::Swaps4: return "swaps4";
    case Kind::Swaps46: return "swaps46";
    case Kind::SwapsUpTo: return "cycle:" + std::to_string(max_len_);
    case Kind::Trades: return "trades";
    case Kind::TradesPlusCircle: return "trades+circle";
    }
    return "?";
}

MoveSet MoveSet::parse(const std::string &name) {
    if (name == "swaps4") return swaps4();
    if (name == "swaps46") return swaps46();
    if (name == "trades") return trades();
    if (name == "trades+circle") return trades_plus_circle();
    if (name.rfind("cycle:", 0) == 0) {
        const std::string digits = name.substr(6);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad cycle bound in '" + name + "'");
        return swaps_up_to(std::stoi(digits));
    }
    throw std::invalid_argument("unknown move set '" + name + "'");
}

}  // namespace bisample
