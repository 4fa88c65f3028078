#include <bisample/realizability.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace bisample {

bool gale_ryser_realizable(const std::vector<int> &rows, const std::vector<int> &cols) {
    const int n = static_cast<int>(rows.size());
    const int m = static_cast<int>(cols.size());
    long row_total = 0;
    long col_total = 0;
    for (int a : rows) {
        if (a < 0 || a > m) return false;
        row_total += a;
    }
    for (int b : cols) {
        if (b < 0 || b > n) return false;
        col_total += b;
    }
    if (row_total != col_total) return false;

    // at_least[t] = #{j : b_j >= t}; sum_j min(b_j, k) = sum_{t<=k} at_least[t].
    std::vector<long> at_least(static_cast<std::size_t>(n) + 2, 0);
    for (int b : cols) ++at_least[static_cast<std::size_t>(b)];
    for (int t = n - 1; t >= 0; --t) at_least[static_cast<std::size_t>(t)] += at_least[static_cast<std::size_t>(t) + 1];

    std::vector<int> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), std::greater<int>());
    long lhs = 0;
    long rhs = 0;
    for (int k = 1; k <= n; ++k) {
        lhs += sorted[static_cast<std::size_t>(k) - 1];
        rhs += at_least[static_cast<std::size_t>(k)];
        if (lhs > rhs) return false;
    }
    return true;
}

bool gale_ryser_realizable(const DegreeSequence &s) { return gale_ryser_realizable(s.rows, s.cols); }

namespace {

// Dinic on a small unit/integer-capacity network.
class FlowNetwork {
public:
    explicit FlowNetwork(int nodes) : graph_(static_cast<std::size_t>(nodes)) {}

    int add_edge(int from, int to, int capacity) {
        graph_[static_cast<std::size_t>(from)].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({to, capacity});
        graph_[static_cast<std::size_t>(to)].push_back(static_cast<int>(edges_.size()));
        edges_.push_back({from, 0});
        return static_cast<int>(edges_.size()) - 2;
    }

    long max_flow(int source, int sink) {
        long total = 0;
        while (build_levels(source, sink)) {
            next_.assign(graph_.size(), 0);
            while (long pushed = push(source, sink, std::numeric_limits<int>::max())) total += pushed;
        }
        return total;
    }

    int flow_on(int edge) const { return edges_[static_cast<std::size_t>(edge) ^ 1U].capacity; }

private:
    struct Edge {
        int to;
        int capacity;
    };

    bool build_levels(int source, int sink) {
        level_.assign(graph_.size(), -1);
        std::queue<int> queue;
        level_[static_cast<std::size_t>(source)] = 0;
        queue.push(source);
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop();
            for (int e : graph_[static_cast<std::size_t>(v)]) {
                const Edge &edge = edges_[static_cast<std::size_t>(e)];
                if (edge.capacity > 0 && level_[static_cast<std::size_t>(edge.to)] < 0) {
                    level_[static_cast<std::size_t>(edge.to)] = level_[static_cast<std::size_t>(v)] + 1;
                    queue.push(edge.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(sink)] >= 0;
    }

    long push(int v, int sink, int limit) {
        if (v == sink) return limit;
        auto &adj = graph_[static_cast<std::size_t>(v)];
        for (int &i = next_[static_cast<std::size_t>(v)]; i < static_cast<int>(adj.size()); ++i) {
            const int e = adj[static_cast<std::size_t>(i)];
            Edge &edge = edges_[static_cast<std::size_t>(e)];
            if (edge.capacity <= 0 || level_[static_cast<std::size_t>(edge.to)] != level_[static_cast<std::size_t>(v)] + 1)
                continue;
            if (long pushed = push(edge.to, sink, std::min(limit, edge.capacity))) {
                edge.capacity -= static_cast<int>(pushed);
                edges_[static_cast<std::size_t>(e) ^ 1U].capacity += static_cast<int>(pushed);
                return pushed;
            }
        }
        return 0;
    }

    std::vector<std::vector<int>> graph_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<int> next_;
};

}  // namespace

Realization initial_realization(const Instance &inst) {
    const int n = inst.rows();
    const int m = inst.cols();
    std::vector<int> row_need = inst.degrees.rows;
    std::vector<int> col_need = inst.degrees.cols;
    if (inst.degrees.row_total() != inst.degrees.col_total())
        throw Infeasible("row and column degree totals differ");

    Realization g(n, m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) {
            if (inst.fixed.at(r, c) != CellFix::Edge) continue;
            g.set(r, c, true);
            --row_need[static_cast<std::size_t>(r)];
            --col_need[static_cast<std::size_t>(c)];
        }
    }
    for (int v : row_need)
        if (v < 0) throw Infeasible("forced edges exceed a row degree");
    for (int v : col_need)
        if (v < 0) throw Infeasible("forced edges exceed a column degree");

    const int source = n + m;
    const int sink = n + m + 1;
    FlowNetwork net(n + m + 2);
    long required = 0;
    for (int r = 0; r < n; ++r) {
        net.add_edge(source, r, row_need[static_cast<std::size_t>(r)]);
        required += row_need[static_cast<std::size_t>(r)];
    }
    std::vector<std::pair<Pos, int>> cell_edges;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c)
            if (inst.fixed.is_free(r, c)) cell_edges.push_back({{r, c}, net.add_edge(r, n + c, 1)});
    for (int c = 0; c < m; ++c) net.add_edge(n + c, sink, col_need[static_cast<std::size_t>(c)]);

    if (net.max_flow(source, sink) != required) throw Infeasible("no F-fixed realization exists");
    for (const auto &[cell, edge] : cell_edges)
        if (net.flow_on(edge) > 0) g.set(cell, true);
    return g;
}

// Static set -------------------------------------------------------------

std::vector<Pos> StaticSet::forced_edges() const {
    std::vector<Pos> out;
    for (const Pos p : mask_.cells())
        if (mask_.at(p) == CellFix::Edge) out.push_back(p);
    return out;
}

std::vector<Pos> StaticSet::forced_non_edges() const {
    std::vector<Pos> out;
    for (const Pos p : mask_.cells())
        if (mask_.at(p) == CellFix::NonEdge) out.push_back(p);
    return out;
}

namespace {

// Tests the reduced sequence with a_i - 1, b_j - 1; a zero degree fails.
bool decremented_realizable(std::vector<int> &rows, std::vector<int> &cols, int i, int j) {
    auto &a = rows[static_cast<std::size_t>(i)];
    auto &b = cols[static_cast<std::size_t>(j)];
    if (a == 0 || b == 0) return false;
    --a;
    --b;
    const bool ok = gale_ryser_realizable(rows, cols);
    ++a;
    ++b;
    return ok;
}

StaticSet sweep(const DegreeSequence &s, const std::vector<char> &skip) {
    if (!gale_ryser_realizable(s)) throw NotRealizable("degree sequence has no realization");
    const int n = s.num_rows();
    const int m = s.num_cols();
    std::vector<int> rows = s.rows;
    std::vector<int> cols = s.cols;
    std::vector<int> opposite_rows(rows.size());
    std::vector<int> opposite_cols(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) opposite_rows[i] = m - rows[i];
    for (std::size_t j = 0; j < cols.size(); ++j) opposite_cols[j] = n - cols[j];

    FixedSet mask(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (!skip.empty() && skip[static_cast<std::size_t>(i * m + j)]) continue;
            if (!decremented_realizable(rows, cols, i, j))
                mask.set(i, j, CellFix::NonEdge);
            else if (!decremented_realizable(opposite_rows, opposite_cols, i, j))
                mask.set(i, j, CellFix::Edge);
        }
    }
    return StaticSet(std::move(mask));
}

}  // namespace

StaticSet static_set(const DegreeSequence &s) { return sweep(s, {}); }

std::vector<Pos> swappable_cells(const Realization &g) {
    const int n = g.rows();
    const int m = g.cols();
    std::vector<char> mark(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0);
    for (int r1 = 0; r1 < n; ++r1) {
        for (int r2 = r1 + 1; r2 < n; ++r2) {
            for (int c1 = 0; c1 < m; ++c1) {
                for (int c2 = c1 + 1; c2 < m; ++c2) {
                    const bool a = g.at(r1, c1);
                    if (a == g.at(r2, c2) && a != g.at(r1, c2) && a != g.at(r2, c1)) {
                        mark[static_cast<std::size_t>(r1 * m + c1)] = 1;
                        mark[static_cast<std::size_t>(r1 * m + c2)] = 1;
                        mark[static_cast<std::size_t>(r2 * m + c1)] = 1;
                        mark[static_cast<std::size_t>(r2 * m + c2)] = 1;
                    }
                }
            }
        }
    }
    std::vector<Pos> out;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c)
            if (mark[static_cast<std::size_t>(r * m + c)]) out.push_back({r, c});
    return out;
}

StaticSet static_set_pruned(const DegreeSequence &s, const Realization &g) {
    if (g.rows() != s.num_rows() || g.cols() != s.num_cols())
        throw InstanceMismatch("realization dimensions differ from the degree sequence");
    if (!gale_ryser_realizable(s)) throw NotRealizable("degree sequence has no realization");
    if (g.row_sums() != s.rows || g.col_sums() != s.cols)
        throw InvalidMove("realization does not match the degree sequence");
    std::vector<char> skip(static_cast<std::size_t>(s.num_rows()) * static_cast<std::size_t>(s.num_cols()), 0);
    for (const Pos p : swappable_cells(g)) skip[static_cast<std::size_t>(p.row * s.num_cols() + p.col)] = 1;
    return sweep(s, skip);
}

FixedPartition partition_fixed_set(const Instance &inst, const StaticSet &static_cells) {
    const FixedSet &h = inst.fixed;
    if (static_cells.mask().rows() != h.rows() || static_cells.mask().cols() != h.cols())
        throw InstanceMismatch("static set dimensions differ from the instance");
    FixedPartition out{h, {}};
    for (const Pos p : h.cells()) {
        const CellFix forced = h.at(p);
        const CellFix known = static_cells.at(p.row, p.col);
        if (known == CellFix::Free) continue;
        if (known != forced)
            throw PolarityConflict("cell (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                                   ") is fixed against every realization of the degree sequence");
        out.reduced.set(p, CellFix::Free);
        out.redundant.push_back(p);
    }
    return out;
}

}  // namespace bisample
