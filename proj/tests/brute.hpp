#pragma once

// Slow reference implementations used to derive expected values.

#include <bisample/core.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace brute {

inline std::uint64_t cell_bit(int rows, int cols, int r, int c) {
    return 1ULL << (rows * cols - 1 - (r * cols + c));
}

/// Every 0/1 matrix of the instance's shape checked against margins and mask.
inline std::vector<std::uint64_t> realizations(const bisample::Instance &inst) {
    const int n = inst.rows();
    const int m = inst.cols();
    std::vector<std::uint64_t> out;
    for (std::uint64_t key = 0; key < (1ULL << (n * m)); ++key) {
        bool ok = true;
        for (int r = 0; r < n && ok; ++r) {
            int sum = 0;
            for (int c = 0; c < m; ++c) sum += (key & cell_bit(n, m, r, c)) != 0;
            ok = sum == inst.degrees.rows[static_cast<std::size_t>(r)];
        }
        for (int c = 0; c < m && ok; ++c) {
            int sum = 0;
            for (int r = 0; r < n; ++r) sum += (key & cell_bit(n, m, r, c)) != 0;
            ok = sum == inst.degrees.cols[static_cast<std::size_t>(c)];
        }
        for (int r = 0; r < n && ok; ++r) {
            for (int c = 0; c < m && ok; ++c) {
                const bool one = (key & cell_bit(n, m, r, c)) != 0;
                const auto v = inst.fixed.at(r, c);
                if (v == bisample::CellFix::Edge && !one) ok = false;
                if (v == bisample::CellFix::NonEdge && one) ok = false;
            }
        }
        if (ok) out.push_back(key);
    }
    return out;
}

/// Simple cycle with exactly len vertices in the bipartite graph whose
/// edges are `cells`: every choice of len/2 rows and columns, every
/// alternating order.
inline bool has_cycle(const std::vector<bisample::Pos> &cells, int rows, int cols, int len) {
    const int half = len / 2;
    if (half > rows || half > cols) return false;
    auto edge = [&](int r, int c) {
        return std::find(cells.begin(), cells.end(), bisample::Pos{r, c}) != cells.end();
    };
    std::vector<int> row_pick(static_cast<std::size_t>(rows), 0);
    std::fill(row_pick.end() - half, row_pick.end(), 1);
    do {
        std::vector<int> rs;
        for (int r = 0; r < rows; ++r)
            if (row_pick[static_cast<std::size_t>(r)]) rs.push_back(r);
        std::vector<int> col_pick(static_cast<std::size_t>(cols), 0);
        std::fill(col_pick.end() - half, col_pick.end(), 1);
        do {
            std::vector<int> cs;
            for (int c = 0; c < cols; ++c)
                if (col_pick[static_cast<std::size_t>(c)]) cs.push_back(c);
            std::vector<int> order = rs;
            do {
                if (order[0] != rs[0]) break;
                std::vector<int> co = cs;
                do {
                    bool ok = true;
                    for (int t = 0; t < half && ok; ++t) {
                        const int r = order[static_cast<std::size_t>(t)];
                        const int c = co[static_cast<std::size_t>(t)];
                        const int r_next = order[static_cast<std::size_t>((t + 1) % half)];
                        ok = edge(r, c) && edge(r_next, c);
                    }
                    if (ok) return true;
                } while (std::next_permutation(co.begin(), co.end()));
            } while (std::next_permutation(order.begin(), order.end()));
        } while (std::next_permutation(col_pick.begin(), col_pick.end()));
    } while (std::next_permutation(row_pick.begin(), row_pick.end()));
    return false;
}

}  // namespace brute
