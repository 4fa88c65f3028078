#include <bisample/analysis.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bisample {

FGraph::FGraph(int rows, int cols) : rows_(rows), cols_(cols), adj_(static_cast<std::size_t>(rows + cols)) {}

FGraph::FGraph(const FixedSet &fixed) : FGraph(fixed.rows(), fixed.cols()) {
    for (const Pos p : fixed.cells()) add(p);
}

FGraph FGraph::from_cells(int rows, int cols, std::span<const Pos> cells) {
    FGraph f(rows, cols);
    for (const Pos p : cells) f.add(p);
    return f;
}

void FGraph::add(Pos cell) {
    if (cell.row < 0 || cell.row >= rows_ || cell.col < 0 || cell.col >= cols_)
        throw std::out_of_range("cell outside the grid");
    if (has(cell)) return;
    auto &row_adj = adj_[static_cast<std::size_t>(cell.row)];
    auto &col_adj = adj_[static_cast<std::size_t>(rows_ + cell.col)];
    row_adj.insert(std::lower_bound(row_adj.begin(), row_adj.end(), rows_ + cell.col), rows_ + cell.col);
    col_adj.insert(std::lower_bound(col_adj.begin(), col_adj.end(), cell.row), cell.row);
    ++edges_;
}

bool FGraph::has(Pos cell) const {
    const auto &row_adj = adj_[static_cast<std::size_t>(cell.row)];
    return std::binary_search(row_adj.begin(), row_adj.end(), rows_ + cell.col);
}

bool max_matching_at_least(const FGraph &f, int k) {
    if (k < 1) throw std::invalid_argument("matching size must be positive");
    const int n = f.rows();
    std::vector<int> match_col(static_cast<std::size_t>(f.cols()), -1);
    std::vector<char> seen;

    auto augment = [&](auto &&self, int r) -> bool {
        for (int v : f.neighbors(r)) {
            const auto c = static_cast<std::size_t>(v - n);
            if (seen[c]) continue;
            seen[c] = 1;
            if (match_col[c] < 0 || self(self, match_col[c])) {
                match_col[c] = r;
                return true;
            }
        }
        return false;
    };

    int matched = 0;
    for (int r = 0; r < n; ++r) {
        seen.assign(static_cast<std::size_t>(f.cols()), 0);
        if (augment(augment, r) && ++matched >= k) return true;
    }
    return false;
}

bool has_cycle_of_length(const FGraph &f, int len) {
    if (len < 4 || len % 2 != 0) throw std::invalid_argument("cycle length must be even and at least 4");
    const int vertices = f.vertex_count();
    if (len / 2 > std::min(f.rows(), f.cols())) return false;

    // Every cycle is found from its smallest vertex, visiting larger ones only.
    std::vector<char> on_path(static_cast<std::size_t>(vertices), 0);
    auto extend = [&](auto &&self, int start, int v, int depth) -> bool {
        if (depth == len) {
            const auto &adj = f.neighbors(v);
            return std::binary_search(adj.begin(), adj.end(), start);
        }
        for (int w : f.neighbors(v)) {
            if (w <= start || on_path[static_cast<std::size_t>(w)]) continue;
            on_path[static_cast<std::size_t>(w)] = 1;
            const bool found = self(self, start, w, depth + 1);
            on_path[static_cast<std::size_t>(w)] = 0;
            if (found) return true;
        }
        return false;
    };

    for (int s = 0; s < vertices; ++s) {
        if (f.neighbors(s).size() < 2) continue;
        on_path[static_cast<std::size_t>(s)] = 1;
        const bool found = extend(extend, s, s, 1);
        on_path[static_cast<std::size_t>(s)] = 0;
        if (found) return true;
    }
    return false;
}

bool is_forest(const FGraph &f) {
    std::vector<int> parent(static_cast<std::size_t>(f.vertex_count()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (int r = 0; r < f.rows(); ++r) {
        for (int c : f.neighbors(r)) {
            const int a = find(r);
            const int b = find(c);
            if (a == b) return false;
            parent[static_cast<std::size_t>(a)] = b;
        }
    }
    return true;
}

int find_coprime_odd_t(int cycle_len) {
    if (cycle_len < 8 || cycle_len % 2 != 0)
        throw std::invalid_argument("base cycle length must be even and at least 8");
    for (int t = 3; t <= cycle_len - 3; t += 2)
        if (std::gcd(t, cycle_len) == 1) return t;
    throw std::logic_error("no odd multiplier coprime to the cycle length");
}

bool is_odd_chord(int a, int b, int cycle_len) {
    int d = std::abs(a - b) % cycle_len;
    d = std::min(d, cycle_len - d);
    return d % 2 == 1 && d >= 3;
}

std::vector<int> chord_cycle(int cycle_len, int target_len) {
    if (cycle_len < 8 || cycle_len % 2 != 0) throw std::invalid_argument("base cycle length must be even and >= 8");
    if (target_len < 8 || target_len % 2 != 0 || target_len > cycle_len)
        throw std::invalid_argument("target length must be even with 8 <= target <= base");
    // Chords of the base shortened by two vertices stay odd chords of the
    // longer base, so the shorter construction can be reused verbatim.
    while (cycle_len > target_len) cycle_len -= 2;
    const int t = find_coprime_odd_t(cycle_len);
    std::vector<int> cycle(static_cast<std::size_t>(cycle_len));
    for (int i = 0; i < cycle_len; ++i) cycle[static_cast<std::size_t>(i)] = (t * i) % cycle_len;
    return cycle;
}

AnalysisReport analyze(const FixedSet &fixed) {
    const FGraph f(fixed);
    AnalysisReport report;
    report.has_3_matching = max_matching_at_least(f, 3);
    report.has_8_cycle = has_cycle_of_length(f, 8);
    report.is_forest = is_forest(f);
    const int cap = std::min(fixed.rows(), fixed.cols());
    for (int ell = 4; ell <= std::max(cap, 4); ++ell) {
        if (!has_cycle_of_length(f, 2 * ell)) {
            report.min_excluded_ell = ell;
            break;
        }
    }

    if (!report.has_3_matching) {
        report.recommended = MoveSet::trades();
    } else if (!report.has_8_cycle) {
        report.recommended = MoveSet::trades_plus_circle();
    } else {
        if (!report.min_excluded_ell)
            throw NoUsableBound("every even cycle length from 8 to " + std::to_string(2 * cap) + " occurs in F");
        report.recommended = MoveSet::swaps_up_to(2 * *report.min_excluded_ell - 2);
    }
    return report;
}

}  // namespace bisample
