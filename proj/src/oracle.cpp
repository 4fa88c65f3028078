#include <bisample/oracle.hpp>

#include <bisample/analysis.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/rational.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace bisample {

namespace {

using Ratio = boost::rational<std::int64_t>;

std::size_t at(int i) { return static_cast<std::size_t>(i); }

// Row r occupies bits [total - (r+1)*cols, total - r*cols), column 0 highest.
struct KeyLayout {
    int rows;
    int cols;

    int total() const { return rows * cols; }
    int shift(int r) const { return total() - (r + 1) * cols; }
    std::uint64_t row_mask() const { return cols >= 64 ? ~0ULL : (1ULL << cols) - 1; }
    std::uint64_t row(std::uint64_t key, int r) const { return (key >> shift(r)) & row_mask(); }
    std::uint64_t place(std::uint64_t row_bits, int r) const { return row_bits << shift(r); }
    // Column c of a row mask.
    std::uint64_t col_bit(int c) const { return 1ULL << (cols - 1 - c); }
};

std::vector<std::uint64_t> free_rows(const FixedSet &fixed) {
    const KeyLayout lay{fixed.rows(), fixed.cols()};
    std::vector<std::uint64_t> out(at(fixed.rows()), 0);
    for (int r = 0; r < fixed.rows(); ++r)
        for (int c = 0; c < fixed.cols(); ++c)
            if (fixed.is_free(r, c)) out[at(r)] |= lay.col_bit(c);
    return out;
}

std::vector<std::uint64_t> split_rows(std::uint64_t key, const KeyLayout &lay) {
    std::vector<std::uint64_t> out(at(lay.rows));
    for (int r = 0; r < lay.rows; ++r) out[at(r)] = lay.row(key, r);
    return out;
}

std::uint64_t join_rows(const std::vector<std::uint64_t> &rows, const KeyLayout &lay) {
    std::uint64_t key = 0;
    for (int r = 0; r < lay.rows; ++r) key |= lay.place(rows[at(r)], r);
    return key;
}

std::int64_t choose(int n, int k) { return static_cast<std::int64_t>(binomial(n, k)); }

// Calls f(sub) for every k-element submask of `set`.
template <typename F>
void for_each_k_subset(std::uint64_t set, int k, F &&f) {
    std::vector<std::uint64_t> elems;
    for (std::uint64_t rest = set; rest; rest &= rest - 1) elems.push_back(rest & (~rest + 1));
    const int n = static_cast<int>(elems.size());
    if (k < 0 || k > n) return;
    std::vector<int> pick(at(k));
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        std::uint64_t sub = 0;
        for (int p : pick) sub |= elems[at(p)];
        f(sub);
        int t = k;
        while (t > 0 && pick[at(t - 1)] == n - k + t - 1) --t;
        if (t == 0) return;
        ++pick[at(t - 1)];
        for (int s = t; s < k; ++s) pick[at(s)] = pick[at(s - 1)] + 1;
    }
}

// Enumeration ---------------------------------------------------------------

void check_enumerable(const Instance &inst) {
    if (inst.rows() * inst.cols() > max_enumeration_cells)
        throw TooLarge("instance has " + std::to_string(inst.rows() * inst.cols()) + " cells; enumeration limit is " +
                       std::to_string(max_enumeration_cells));
}

}  // namespace

std::vector<std::uint64_t> enumerate_keys(const Instance &inst) {
    check_enumerable(inst);
    const int n = inst.rows();
    const int m = inst.cols();
    const KeyLayout lay{n, m};
    std::vector<std::uint64_t> out;
    for (int a : inst.degrees.rows)
        if (a < 0 || a > m) return out;
    for (int b : inst.degrees.cols)
        if (b < 0 || b > n) return out;
    if (inst.degrees.row_total() != inst.degrees.col_total()) return out;

    std::vector<std::uint64_t> forced(at(n), 0);
    std::vector<std::uint64_t> allowed(at(n), 0);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) {
            const CellFix v = inst.fixed.at(r, c);
            if (v != CellFix::NonEdge) allowed[at(r)] |= lay.col_bit(c);
            if (v == CellFix::Edge) forced[at(r)] |= lay.col_bit(c);
        }
    }

    std::vector<int> col_left = inst.degrees.cols;
    std::vector<std::uint64_t> chosen(at(n), 0);
    auto descend = [&](auto &&self, int r) -> void {
        if (r == n) {
            out.push_back(join_rows(chosen, lay));
            return;
        }
        const int rows_after = n - r - 1;
        // Columns whose remaining demand needs this row, and columns already full.
        std::uint64_t must = forced[at(r)];
        std::uint64_t can = allowed[at(r)];
        for (int c = 0; c < m; ++c) {
            const int left = col_left[at(c)];
            if (left == 0) can &= ~lay.col_bit(c);
            if (left > rows_after) must |= lay.col_bit(c);
        }
        if ((must & ~can) != 0) return;
        const int need = inst.degrees.rows[at(r)] - std::popcount(must);
        const std::uint64_t optional_cols = can & ~must;
        if (need < 0 || need > std::popcount(optional_cols)) return;
        for_each_k_subset(optional_cols, need, [&](std::uint64_t extra) {
            const std::uint64_t row_bits = must | extra;
            for (int c = 0; c < m; ++c)
                if (row_bits & lay.col_bit(c)) --col_left[at(c)];
            chosen[at(r)] = row_bits;
            self(self, r + 1);
            for (int c = 0; c < m; ++c)
                if (row_bits & lay.col_bit(c)) ++col_left[at(c)];
        });
    };
    descend(descend, 0);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Realization> enumerate_realizations(const Instance &inst) {
    std::vector<Realization> out;
    for (std::uint64_t key : enumerate_keys(inst)) out.push_back(Realization::from_bits(inst.rows(), inst.cols(), key));
    return out;
}

// State graphs -----------------------------------------------------------------

std::size_t StateGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto &a : adj) total += a.size();
    return total / 2;
}

int StateGraph::index_of(std::uint64_t key) const {
    const auto it = std::lower_bound(states.begin(), states.end(), key);
    if (it == states.end() || *it != key) return -1;
    return static_cast<int>(it - states.begin());
}

DiffShape diff_shape(std::uint64_t a, std::uint64_t b, int rows, int cols) {
    const KeyLayout lay{rows, cols};
    const std::uint64_t d = a ^ b;
    DiffShape shape;
    shape.cells = std::popcount(d);
    if (d == 0) return shape;

    std::vector<int> touched;
    bool rows_pair = true;
    for (int r = 0; r < rows; ++r) {
        const std::uint64_t rd = lay.row(d, r);
        if (rd == 0) continue;
        touched.push_back(r);
        if (std::popcount(rd) != 2) rows_pair = false;
    }
    shape.rows_touched = static_cast<int>(touched.size());

    // Per-column incidence: which touched rows change in each column.
    std::vector<int> col_count(at(cols), 0);
    for (int r : touched)
        for (int c = 0; c < cols; ++c)
            if (lay.row(d, r) & lay.col_bit(c)) ++col_count[at(c)];
    bool cols_pair = true;
    for (int c = 0; c < cols; ++c)
        if (col_count[at(c)] != 0 && col_count[at(c)] != 2) cols_pair = false;

    if (rows_pair && cols_pair) {
        // 2-regular difference graph; one cycle iff connected.
        std::vector<int> parent(at(rows + cols));
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&parent](int v) {
            while (parent[at(v)] != v) v = parent[at(v)] = parent[at(parent[at(v)])];
            return v;
        };
        int merges = 0;
        for (int r : touched) {
            for (int c = 0; c < cols; ++c) {
                if (!(lay.row(d, r) & lay.col_bit(c))) continue;
                const int x = find(r);
                const int y = find(rows + c);
                if (x != y) {
                    parent[at(x)] = y;
                    ++merges;
                }
            }
        }
        const int vertices = shape.cells;  // 2-regular: vertices == edges
        shape.single_cycle = merges == vertices - 1;
    }

    if (shape.rows_touched == 3 && cols_pair) {
        // Each changed column moves one entry from a losing row to a gaining row.
        const int r0 = touched[0];
        const int r1 = touched[1];
        auto slot = [&](int r) { return r == r0 ? 0 : (r == r1 ? 1 : 2); };
        bool forward = true;   // r0 -> r2 -> r1 -> r0
        bool backward = true;  // r0 -> r1 -> r2 -> r0
        for (int c = 0; c < cols; ++c) {
            if (col_count[at(c)] == 0) continue;
            int loser = -1;
            int gainer = -1;
            for (int r : touched) {
                if (!(lay.row(d, r) & lay.col_bit(c))) continue;
                if (lay.row(a, r) & lay.col_bit(c))
                    loser = slot(r);
                else
                    gainer = slot(r);
            }
            if (loser < 0 || gainer < 0) {
                forward = backward = false;
                break;
            }
            if (gainer != (loser + 2) % 3) forward = false;
            if (gainer != (loser + 1) % 3) backward = false;
        }
        shape.circle_rotation = forward || backward;
    }
    return shape;
}

StateGraph build_state_graph(const std::vector<std::uint64_t> &states, int rows, int cols, const MoveSet &moves) {
    StateGraph sg;
    sg.rows = rows;
    sg.cols = cols;
    sg.states = states;
    std::sort(sg.states.begin(), sg.states.end());
    sg.states.erase(std::unique(sg.states.begin(), sg.states.end()), sg.states.end());
    sg.adj.assign(sg.states.size(), {});

    const bool swaps = moves.is_swap_kind();
    const int max_len = moves.max_cycle_length();
    const bool circles = moves.kind() == MoveSet::Kind::TradesPlusCircle;
    for (std::size_t x = 0; x < sg.states.size(); ++x) {
        for (std::size_t y = x + 1; y < sg.states.size(); ++y) {
            const std::uint64_t d = sg.states[x] ^ sg.states[y];
            const int len = std::popcount(d);
            if (swaps && len > max_len) continue;
            const DiffShape shape = diff_shape(sg.states[x], sg.states[y], rows, cols);
            std::optional<MoveLabel> label;
            if (swaps) {
                if (shape.single_cycle && shape.cells <= max_len) label = MoveLabel::Swap;
            } else if (shape.rows_touched == 2) {
                label = MoveLabel::Trade;
            } else if (circles && shape.circle_rotation) {
                label = MoveLabel::CircleTrade;
            }
            if (!label) continue;
            sg.adj[x].push_back({static_cast<int>(y), *label, len});
            sg.adj[y].push_back({static_cast<int>(x), *label, len});
        }
    }
    return sg;
}

StateGraph build_state_graph(const std::vector<Realization> &states, const MoveSet &moves) {
    if (states.empty()) return StateGraph{};
    std::vector<std::uint64_t> keys;
    keys.reserve(states.size());
    for (const auto &g : states) keys.push_back(g.bits());
    return build_state_graph(keys, states.front().rows(), states.front().cols(), moves);
}

std::vector<std::vector<int>> Components::members() const {
    std::vector<std::vector<int>> out(at(count));
    for (std::size_t v = 0; v < of.size(); ++v) out[at(of[v])].push_back(static_cast<int>(v));
    return out;
}

Components check_connectivity(const StateGraph &sg) {
    Components comp;
    comp.of.assign(sg.size(), -1);
    for (std::size_t s = 0; s < sg.size(); ++s) {
        if (comp.of[s] >= 0) continue;
        const int id = comp.count++;
        std::deque<int> queue{static_cast<int>(s)};
        comp.of[s] = id;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (const StateEdge &e : sg.adj[at(v)]) {
                if (comp.of[at(e.to)] >= 0) continue;
                comp.of[at(e.to)] = id;
                queue.push_back(e.to);
            }
        }
    }
    return comp;
}

DistanceCheck distance_bound(const StateGraph &sg) {
    DistanceCheck out;
    std::vector<int> dist(sg.size());
    int worst_excess = 0;
    for (std::size_t s = 0; s < sg.size(); ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        std::deque<int> queue{static_cast<int>(s)};
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (const StateEdge &e : sg.adj[at(v)]) {
                if (dist[at(e.to)] >= 0) continue;
                dist[at(e.to)] = dist[at(v)] + 1;
                queue.push_back(e.to);
            }
        }
        for (std::size_t t = s + 1; t < sg.size(); ++t) {
            const int half = std::popcount(sg.states[s] ^ sg.states[t]) / 2;
            const int excess = dist[t] < 0 ? static_cast<int>(sg.size()) : dist[t] - (half - 1);
            if (dist[t] < 0) out.connected = false;
            if (excess > 0) out.holds = false;
            if (excess > 1) out.holds_lenient = false;
            if (excess > worst_excess) {
                worst_excess = excess;
                out.worst_from = static_cast<int>(s);
                out.worst_to = static_cast<int>(t);
            }
        }
    }
    return out;
}

bool check_distance_bound(const StateGraph &sg) {
    const DistanceCheck d = distance_bound(sg);
    return d.connected && d.holds;
}

StaticSet static_set_from(const DegreeSequence &s, const std::vector<std::uint64_t> &all_realizations) {
    if (all_realizations.empty()) throw NotRealizable("degree sequence has no realization");
    const int n = s.num_rows();
    const int m = s.num_cols();
    const std::uint64_t cells = n * m == 64 ? ~0ULL : (1ULL << (n * m)) - 1;
    std::uint64_t ones = cells;
    std::uint64_t zeros = cells;
    for (std::uint64_t key : all_realizations) {
        ones &= key;
        zeros &= ~key;
    }
    FixedSet mask(n, m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) {
            const std::uint64_t bit = 1ULL << (n * m - 1 - (r * m + c));
            if (ones & bit) mask.set(r, c, CellFix::Edge);
            if (zeros & bit) mask.set(r, c, CellFix::NonEdge);
        }
    }
    return StaticSet(std::move(mask));
}

bool check_static_set(const DegreeSequence &s, const std::vector<std::uint64_t> &all_realizations) {
    return static_set(s) == static_set_from(s, all_realizations);
}

// Isomorphism ------------------------------------------------------------------

namespace {

struct SmallGraph {
    int n = 0;
    std::vector<std::vector<char>> adj;
    std::vector<int> degree;
    std::vector<std::uint64_t> color;  // degree and sorted neighbour degrees, hashed
};

SmallGraph induced(const StateGraph &sg, const std::vector<int> &verts) {
    SmallGraph g;
    g.n = static_cast<int>(verts.size());
    g.adj.assign(at(g.n), std::vector<char>(at(g.n), 0));
    std::map<int, int> local;
    for (int i = 0; i < g.n; ++i) local[verts[at(i)]] = i;
    for (int i = 0; i < g.n; ++i)
        for (const StateEdge &e : sg.adj[at(verts[at(i)])])
            if (auto it = local.find(e.to); it != local.end()) g.adj[at(i)][at(it->second)] = 1;
    g.degree.assign(at(g.n), 0);
    for (int i = 0; i < g.n; ++i) g.degree[at(i)] = static_cast<int>(std::count(g.adj[at(i)].begin(), g.adj[at(i)].end(), 1));
    g.color.assign(at(g.n), 0);
    for (int i = 0; i < g.n; ++i) {
        std::vector<int> nd;
        for (int j = 0; j < g.n; ++j)
            if (g.adj[at(i)][at(j)]) nd.push_back(g.degree[at(j)]);
        std::sort(nd.begin(), nd.end());
        std::uint64_t h = static_cast<std::uint64_t>(g.degree[at(i)]) * 1000003ULL;
        for (int v : nd) h = h * 31 + static_cast<std::uint64_t>(v);
        g.color[at(i)] = h;
    }
    return g;
}

bool isomorphic(const SmallGraph &a, const SmallGraph &b) {
    if (a.n != b.n) return false;
    std::vector<std::uint64_t> ca = a.color;
    std::vector<std::uint64_t> cb = b.color;
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    if (ca != cb) return false;

    std::vector<int> map_to(at(a.n), -1);
    std::vector<char> used(at(b.n), 0);
    auto extend = [&](auto &&self, int i) -> bool {
        if (i == a.n) return true;
        for (int j = 0; j < b.n; ++j) {
            if (used[at(j)] || a.color[at(i)] != b.color[at(j)]) continue;
            bool ok = true;
            for (int p = 0; p < i && ok; ++p)
                if (a.adj[at(i)][at(p)] != b.adj[at(j)][at(map_to[at(p)])]) ok = false;
            if (!ok) continue;
            map_to[at(i)] = j;
            used[at(j)] = 1;
            if (self(self, i + 1)) return true;
            used[at(j)] = 0;
        }
        map_to[at(i)] = -1;
        return false;
    };
    return extend(extend, 0);
}

}  // namespace

bool components_isomorphic(const StateGraph &sg) {
    const Components comp = check_connectivity(sg);
    if (comp.count > 16) throw TooLarge("more than 16 components");
    if (comp.count <= 1) return true;
    const auto groups = comp.members();
    const SmallGraph first = induced(sg, groups[0]);
    for (std::size_t k = 1; k < groups.size(); ++k)
        if (!isomorphic(first, induced(sg, groups[k]))) return false;
    return true;
}

// Uniformity ---------------------------------------------------------------------

UniformityReport uniformity_report(const Instance &inst, const ChainConfig &cfg) {
    const std::vector<std::uint64_t> keys = enumerate_keys(inst);
    if (keys.empty()) throw Infeasible("no F-fixed realization exists");
    std::vector<std::uint64_t> counts(keys.size(), 0);
    UniformityReport report;
    report.states = keys.size();
    run(inst, cfg, [&](const Realization &g) {
        const auto it = std::lower_bound(keys.begin(), keys.end(), g.bits());
        if (it == keys.end() || *it != g.bits()) throw std::logic_error("chain left the realization set");
        ++counts[static_cast<std::size_t>(it - keys.begin())];
        ++report.samples;
    });
    const double n = static_cast<double>(report.samples);
    const double expected = n / static_cast<double>(keys.size());
    double l1 = 0.0;
    for (std::uint64_t c : counts) {
        const double dev = static_cast<double>(c) - expected;
        l1 += std::abs(dev) / n;
        report.chi_square += dev * dev / expected;
    }
    report.tv_distance = 0.5 * l1;
    if (keys.size() > 1) {
        const boost::math::chi_squared_distribution<double> dist(static_cast<double>(keys.size() - 1));
        report.chi_square_p = boost::math::cdf(boost::math::complement(dist, report.chi_square));
    }
    return report;
}

// Exact kernels --------------------------------------------------------------------

namespace {

using Kernel = std::vector<std::map<int, Ratio>>;

struct KernelBuilder {
    const Instance &inst;
    const std::vector<std::uint64_t> &states;
    KeyLayout lay;
    std::vector<std::uint64_t> free;
    Kernel kernel;

    KernelBuilder(const Instance &i, const std::vector<std::uint64_t> &s)
        : inst(i), states(s), lay{i.rows(), i.cols()}, free(free_rows(i.fixed)), kernel(s.size()) {}

    int index(std::uint64_t key) const {
        const auto it = std::lower_bound(states.begin(), states.end(), key);
        if (it == states.end() || *it != key) throw std::logic_error("move left the realization set");
        return static_cast<int>(it - states.begin());
    }

    void add(int from, const std::vector<std::uint64_t> &rows, Ratio p) {
        kernel[at(from)][index(join_rows(rows, lay))] += p;
    }

    // Trades, each pair drawn with probability `pair_weight`.
    void add_trades(Ratio pair_weight) {
        const int n = lay.rows;
        for (std::size_t s = 0; s < states.size(); ++s) {
            const auto a = split_rows(states[s], lay);
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    const std::uint64_t ex = free[at(i)] & free[at(j)];
                    const std::uint64_t a_ij = a[at(i)] & ~a[at(j)] & ex;
                    const std::uint64_t a_ji = a[at(j)] & ~a[at(i)] & ex;
                    const std::uint64_t u = a_ij | a_ji;
                    const int k = std::popcount(a_ij);
                    const Ratio each = pair_weight / Ratio(choose(std::popcount(u), k));
                    for_each_k_subset(u, k, [&](std::uint64_t b) {
                        auto next = a;
                        next[at(i)] = (a[at(i)] & ~a_ij) | b;
                        next[at(j)] = (a[at(j)] & ~a_ji) | (u & ~b);
                        add(static_cast<int>(s), next, each);
                    });
                }
            }
        }
    }

    // Probability of choosing the moved subsets once the order is drawn.
    static Ratio selection(int s0, int s1, int s2, int x) {
        const int sizes[3] = {s0, s1, s2};
        const int pivot = static_cast<int>(std::min_element(sizes, sizes + 3) - sizes);
        Ratio p(1, std::int64_t{1} << sizes[pivot]);
        for (int t = 0; t < 3; ++t)
            if (t != pivot) p /= Ratio(choose(sizes[t], x));
        return p;
    }

    // Circle trades, each ordered triple drawn with probability `triple_weight`.
    void add_circle_trades(Ratio triple_weight, bool mh, std::size_t *irreversible_moves = nullptr) {
        const int n = lay.rows;
        for (std::size_t s = 0; s < states.size(); ++s) {
            const auto a = split_rows(states[s], lay);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k) {
                        if (i == j || j == k || i == k) continue;
                        const std::uint64_t l0 = a[at(i)] & ~a[at(k)] & free[at(i)] & free[at(k)];
                        const std::uint64_t l1 = a[at(j)] & ~a[at(i)] & free[at(j)] & free[at(i)];
                        const std::uint64_t l2 = a[at(k)] & ~a[at(j)] & free[at(k)] & free[at(j)];
                        const std::uint64_t sets[3] = {l0, l1, l2};
                        const int sizes[3] = {std::popcount(l0), std::popcount(l1), std::popcount(l2)};
                        const int pivot = static_cast<int>(std::min_element(sizes, sizes + 3) - sizes);
                        const Ratio pivot_each(1, std::int64_t{1} << sizes[pivot]);
                        // Every subset of the pivot set, the empty one included.
                        for (std::uint64_t sub = sets[pivot];; sub = (sub - 1) & sets[pivot]) {
                            const int x = std::popcount(sub);
                            if (x == 0) {
                                kernel[s][static_cast<int>(s)] += triple_weight * pivot_each;
                                break;
                            }
                            const int o1 = (pivot + 1) % 3;
                            const int o2 = (pivot + 2) % 3;
                            const Ratio forward = selection(sizes[0], sizes[1], sizes[2], x);
                            for_each_k_subset(sets[o1], x, [&](std::uint64_t m1) {
                                for_each_k_subset(sets[o2], x, [&](std::uint64_t m2) {
                                    std::uint64_t moved[3];
                                    moved[pivot] = sub;
                                    moved[o1] = m1;
                                    moved[o2] = m2;
                                    auto next = a;
                                    next[at(i)] = (a[at(i)] & ~moved[0]) | moved[1];
                                    next[at(j)] = (a[at(j)] & ~moved[1]) | moved[2];
                                    next[at(k)] = (a[at(k)] & ~moved[2]) | moved[0];
                                    Ratio accept(1);
                                    // Reverse order (i, k, j) on the new state.
                                    const auto &b = next;
                                    const int r0 = std::popcount(b[at(i)] & ~b[at(j)] & free[at(i)] & free[at(j)]);
                                    const int r1 = std::popcount(b[at(k)] & ~b[at(i)] & free[at(k)] & free[at(i)]);
                                    const int r2 = std::popcount(b[at(j)] & ~b[at(k)] & free[at(j)] & free[at(k)]);
                                    const Ratio reverse = selection(r0, r1, r2, x);
                                    if (irreversible_moves && reverse != forward) ++*irreversible_moves;
                                    if (mh && reverse < forward) accept = reverse / forward;
                                    const Ratio p = triple_weight * forward;
                                    add(static_cast<int>(s), next, p * accept);
                                    if (accept < Ratio(1)) kernel[s][static_cast<int>(s)] += p * (Ratio(1) - accept);
                                });
                            });
                            if (sub == 0) break;
                        }
                    }
                }
            }
        }
    }

    void add_stay(Ratio weight) {
        for (std::size_t s = 0; s < states.size(); ++s) kernel[s][static_cast<int>(s)] += weight;
    }

    ReversibilityResult check() const {
        ReversibilityResult out;
        for (std::size_t s = 0; s < kernel.size(); ++s) {
            Ratio total(0);
            for (const auto &[t, p] : kernel[s]) {
                total += p;
                if (t == static_cast<int>(s)) continue;
                ++out.pairs_checked;
                const auto back = kernel[at(t)].find(static_cast<int>(s));
                const Ratio q = back == kernel[at(t)].end() ? Ratio(0) : back->second;
                if (q != p) {
                    if (out.violations++ == 0) {
                        out.witness_from = static_cast<int>(s);
                        out.witness_to = t;
                    }
                }
            }
            if (total != Ratio(1)) out.rows_sum_to_one = false;
        }
        return out;
    }
};

}  // namespace

ReversibilityResult trades_reversibility(const Instance &inst, const std::vector<std::uint64_t> &states) {
    KernelBuilder kb(inst, states);
    const int n = inst.rows();
    if (n < 2)
        kb.add_stay(Ratio(1));
    else
        kb.add_trades(Ratio(2, static_cast<std::int64_t>(n) * (n - 1)));
    return kb.check();
}

ReversibilityResult circle_reversibility(const Instance &inst, const std::vector<std::uint64_t> &states,
                                         bool mh_correction) {
    KernelBuilder kb(inst, states);
    const int n = inst.rows();
    const Ratio half(1, 2);
    if (n < 2)
        kb.add_stay(half);
    else
        kb.add_trades(half * Ratio(2, static_cast<std::int64_t>(n) * (n - 1)));
    if (n < 3)
        kb.add_stay(half);
    else
        kb.add_circle_trades(half * Ratio(1, static_cast<std::int64_t>(n) * (n - 1) * (n - 2)), mh_correction);
    return kb.check();
}

// Pool ---------------------------------------------------------------------------------

namespace {

// Nonincreasing sequences of length len with entries in [0, hi].
void sorted_sequences(int len, int hi, std::vector<std::vector<int>> &out) {
    std::vector<int> cur(at(len));
    auto rec = [&](auto &&self, int pos, int cap) -> void {
        if (pos == len) {
            out.push_back(cur);
            return;
        }
        for (int v = cap; v >= 0; --v) {
            cur[at(pos)] = v;
            self(self, pos + 1, v);
        }
    };
    rec(rec, 0, hi);
}

std::uint64_t mask_bits(const FixedSet &fixed, CellFix value) {
    const int total = fixed.rows() * fixed.cols();
    std::uint64_t out = 0;
    for (int r = 0; r < fixed.rows(); ++r)
        for (int c = 0; c < fixed.cols(); ++c)
            if (fixed.at(r, c) == value) out |= 1ULL << (total - 1 - (r * fixed.cols() + c));
    return out;
}

std::vector<std::uint64_t> filter_states(const std::vector<std::uint64_t> &all, const FixedSet &fixed) {
    const std::uint64_t ones = mask_bits(fixed, CellFix::Edge);
    const std::uint64_t zeros = mask_bits(fixed, CellFix::NonEdge);
    std::vector<std::uint64_t> out;
    for (std::uint64_t key : all)
        if ((key & ones) == ones && (key & zeros) == 0) out.push_back(key);
    return out;
}

void exhaustive_pool(const PoolOptions &opts,
                     const std::function<void(const Instance &, PoolClass, const std::vector<std::uint64_t> &)> &visit) {
    for (int n = 1; n <= opts.exhaustive_rows; ++n) {
        for (int m = 1; m <= opts.exhaustive_cols; ++m) {
            std::vector<std::vector<int>> row_seqs;
            std::vector<std::vector<int>> col_seqs;
            sorted_sequences(n, m, row_seqs);
            sorted_sequences(m, n, col_seqs);
            const int cells = n * m;
            for (const auto &rs : row_seqs) {
                for (const auto &cs : col_seqs) {
                    if (std::accumulate(rs.begin(), rs.end(), 0) != std::accumulate(cs.begin(), cs.end(), 0)) continue;
                    const DegreeSequence s{rs, cs};
                    if (!gale_ryser_realizable(s)) continue;
                    const std::vector<std::uint64_t> all = enumerate_keys(Instance(s));
                    for (int k = 0; k <= std::min(opts.max_fixed, cells); ++k) {
                        std::vector<int> pick(at(k));
                        std::iota(pick.begin(), pick.end(), 0);
                        while (true) {
                            for (std::uint64_t pol = 0; pol < (1ULL << k); ++pol) {
                                FixedSet mask(n, m);
                                for (int t = 0; t < k; ++t)
                                    mask.set(pick[at(t)] / m, pick[at(t)] % m,
                                             (pol >> t) & 1U ? CellFix::Edge : CellFix::NonEdge);
                                const auto states = filter_states(all, mask);
                                if (!states.empty()) visit(Instance(s, std::move(mask)), PoolClass::Exhaustive, states);
                            }
                            int t = k;
                            while (t > 0 && pick[at(t - 1)] == cells - k + t - 1) --t;
                            if (t == 0) break;
                            ++pick[at(t - 1)];
                            for (int u = t; u < k; ++u) pick[at(u)] = pick[at(u - 1)] + 1;
                        }
                    }
                }
            }
        }
    }
}

Instance random_instance(Rng &rng, int max_rows, int max_cols, bool small_cover) {
    auto uni = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int n = uni(max_rows > 2 ? max_rows - 1 : max_rows, max_rows);
    const int m = uni(max_cols > 2 ? max_cols - 1 : max_cols, max_cols);
    const double density = std::uniform_real_distribution<double>(0.3, 0.7)(rng);
    std::bernoulli_distribution coin(density);
    Realization g(n, m);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) g.set(r, c, coin(rng));

    std::vector<Pos> candidates;
    int count = 0;
    if (small_cover) {
        // Cells incident to two vertices: matching number at most two.
        const int lines = n + m;
        const int v1 = uni(0, lines - 1);
        const int v2 = uni(0, lines - 1);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c)
                for (int v : {v1, v2})
                    if (v == r || v == n + c) {
                        candidates.push_back({r, c});
                        break;
                    }
        count = uni(0, std::min<int>(8, static_cast<int>(candidates.size())));
    } else {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c) candidates.push_back({r, c});
        count = uni(1, std::min(10, n * m));
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    FixedSet mask(n, m);
    for (int t = 0; t < count; ++t)
        mask.set(candidates[at(t)], g.at(candidates[at(t)]) ? CellFix::Edge : CellFix::NonEdge);
    return Instance(DegreeSequence{g.row_sums(), g.col_sums()}, std::move(mask));
}

}  // namespace

void for_each_pool_instance(
    const PoolOptions &opts,
    const std::function<void(const Instance &, PoolClass, const std::vector<std::uint64_t> &)> &visit) {
    exhaustive_pool(opts, visit);
    if (opts.random_count <= 0 || opts.random_rows < 1 || opts.random_cols < 1) return;
    Rng rng(opts.seed);
    for (PoolClass cls : {PoolClass::RandomNoMatching, PoolClass::RandomGeneral}) {
        for (int made = 0; made < opts.random_count;) {
            const Instance inst =
                random_instance(rng, opts.random_rows, opts.random_cols, cls == PoolClass::RandomNoMatching);
            auto states = enumerate_keys(inst);
            if (states.empty() || states.size() > opts.random_state_cap) continue;
            visit(inst, cls, states);
            ++made;
        }
    }
}

// Verification -------------------------------------------------------------------------

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckTally &c) { return c.failed == 0; });
}

const CheckTally *VerifyReport::find(const std::string &name) const {
    for (const auto &c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::optional<Instance> VerifyReport::first_witness() const {
    for (const auto &c : checks)
        if (c.witness) return c.witness;
    return std::nullopt;
}

namespace {

struct SequenceFacts {
    std::vector<std::uint64_t> all;
    StaticSet truth;
    StaticSet computed;
    bool pruned_equal = false;
};

}  // namespace

VerifyReport verify(const VerifyOptions &opts) {
    VerifyReport report;
    std::map<std::string, std::size_t> slot;
    auto tally = [&](const std::string &name) -> CheckTally & {
        auto [it, fresh] = slot.try_emplace(name, report.checks.size());
        if (fresh) report.checks.push_back(CheckTally{name, 0, 0, std::nullopt});
        return report.checks[it->second];
    };
    auto record = [&](const std::string &name, bool ok, const Instance &inst) {
        CheckTally &t = tally(name);
        ++t.applied;
        if (!ok && t.failed++ == 0) t.witness = inst;
    };
    // Fix the report order up front.
    const std::pair<unsigned, std::vector<std::string>> order[] = {
        {check_static, {"static_set", "static_set_pruned"}},
        {check_lifting, {"lifting"}},
        {check_swap4, {"swap4_connected_no_3_matching", "swap4_distance_bound"}},
        {check_trade_swap, {"trade_components_match_swap4"}},
        {check_six, {"swaps46_connected_no_8_cycle", "swaps46_connected_forest"}},
        {check_bounded, {"bounded_swaps_connected"}},
        {check_circle, {"circle_connected_no_8_cycle"}},
        {check_reversible, {"trades_reversible", "circle_mh_reversible"}},
    };
    for (const auto &[bit, names] : order)
        if (opts.checks & bit)
            for (const auto &name : names) tally(name);

    std::map<std::pair<std::vector<int>, std::vector<int>>, SequenceFacts> facts;
    auto facts_for = [&](const DegreeSequence &s) -> const SequenceFacts & {
        auto key = std::make_pair(s.rows, s.cols);
        auto it = facts.find(key);
        if (it != facts.end()) return it->second;
        SequenceFacts f;
        f.all = enumerate_keys(Instance(s));
        f.truth = static_set_from(s, f.all);
        f.computed = static_set(s);
        f.pruned_equal = static_set_pruned(s, initial_realization(Instance(s))) == f.computed;
        return facts.emplace(std::move(key), std::move(f)).first->second;
    };

    const MoveSet six = opts.drop_six_swaps ? MoveSet::swaps4() : MoveSet::swaps46();

    for_each_pool_instance(opts.pool, [&](const Instance &inst, PoolClass, const std::vector<std::uint64_t> &states) {
        ++report.instances;
        const int n = inst.rows();
        const int m = inst.cols();
        const SequenceFacts &sf = facts_for(inst.degrees);
        if (opts.checks & check_static) {
            record("static_set", sf.truth == sf.computed, inst);
            record("static_set_pruned", sf.pruned_equal, inst);
        }
        const FixedPartition part = partition_fixed_set(inst, sf.computed);
        if (opts.checks & check_lifting) record("lifting", filter_states(sf.all, part.reduced) == states, inst);

        const FGraph f(part.reduced);
        const bool has3 = max_matching_at_least(f, 3);
        const bool has8 = has_cycle_of_length(f, 8);
        const bool forest = is_forest(f);
        auto graph = [&](const MoveSet &ms) { return build_state_graph(states, n, m, ms); };

        if (!has3 && (opts.checks & (check_swap4 | check_trade_swap))) {
            const StateGraph g4 = graph(MoveSet::swaps4());
            const Components c4 = check_connectivity(g4);
            if (opts.checks & check_swap4) {
                record("swap4_connected_no_3_matching", c4.connected(), inst);
                const DistanceCheck d = distance_bound(g4);
                record("swap4_distance_bound", d.connected && d.holds, inst);
                if (d.connected && !d.holds && d.holds_lenient) ++report.distance_lenient_only;
            }
            if (opts.checks & check_trade_swap)
                record("trade_components_match_swap4", check_connectivity(graph(MoveSet::trades())).of == c4.of, inst);
        }
        if ((opts.checks & check_six) && (!has8 || forest)) {
            const bool ok = check_connectivity(graph(six)).connected();
            if (!has8) record("swaps46_connected_no_8_cycle", ok, inst);
            if (forest) record("swaps46_connected_forest", ok, inst);
        }
        if (opts.checks & check_bounded) {
            for (int ell = 4; ell <= std::min(n, m) + 1; ++ell) {
                if (has_cycle_of_length(f, 2 * ell)) continue;
                const MoveSet ms = ell == 4 ? six : MoveSet::swaps_up_to(2 * ell - 2);
                record("bounded_swaps_connected", check_connectivity(graph(ms)).connected(), inst);
                break;
            }
        }
        if ((opts.checks & check_circle) && !has8)
            record("circle_connected_no_8_cycle",
                   check_connectivity(graph(MoveSet::trades_plus_circle())).connected(), inst);
        if ((opts.checks & check_reversible) && states.size() <= opts.reversibility_limit) {
            const ReversibilityResult t = trades_reversibility(inst, states);
            record("trades_reversible", t.violations == 0 && t.rows_sum_to_one, inst);
            const ReversibilityResult c = circle_reversibility(inst, states, true);
            record("circle_mh_reversible", c.violations == 0 && c.rows_sum_to_one, inst);
            const ReversibilityResult raw = circle_reversibility(inst, states, false);
            ++report.raw_circle_checked;
            if (raw.violations != 0) ++report.raw_circle_irreversible;
        }
    });
    return report;
}

std::string format_report(const VerifyReport &report) {
    std::ostringstream out;
    out << "instances " << report.instances << '\n';
    for (const auto &c : report.checks) {
        out << "check " << c.name << " applied=" << c.applied << " failed=" << c.failed << ' '
            << (c.failed == 0 ? "PASS" : "FAIL");
        if (c.witness) out << " witness=" << instance_digest(*c.witness);
        out << '\n';
    }
    if (report.raw_circle_checked > 0)
        out << "info circle_without_correction irreversible=" << report.raw_circle_irreversible << '/'
            << report.raw_circle_checked << '\n';
    if (report.distance_lenient_only > 0)
        out << "info distance_bound_met_only_counting_endpoints=" << report.distance_lenient_only << '\n';
    out << (report.passed() ? "PASS" : "FAIL") << '\n';
    return out.str();
}

// Counter-example search ----------------------------------------------------------------

std::vector<SwapSplitWitness> search_split_instances() {
    const DegreeSequence s{{1, 1, 1, 1}, {2, 1, 1}};
    const int n = 4;
    const int m = 3;
    const std::vector<std::uint64_t> all = enumerate_keys(Instance(s));
    std::vector<SwapSplitWitness> out;
    std::vector<std::uint64_t> seen;

    std::vector<int> cols{0, 1, 2};
    for (int skipped = n - 1; skipped >= 0; --skipped) {
        std::vector<int> rows;
        for (int r = 0; r < n; ++r)
            if (r != skipped) rows.push_back(r);
        std::sort(cols.begin(), cols.end());
        do {
            for (int extra = 0; extra < n * m; ++extra) {
                FixedSet mask(n, m);
                for (int t = 0; t < 3; ++t) mask.set(rows[at(t)], cols[at(t)], CellFix::NonEdge);
                if (!mask.is_free(extra / m, extra % m)) continue;
                mask.set(extra / m, extra % m, CellFix::NonEdge);
                const std::uint64_t key = mask_bits(mask, CellFix::NonEdge);
                if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                seen.push_back(key);

                const auto states = filter_states(all, mask);
                if (states.empty()) continue;
                const StateGraph g4 = build_state_graph(states, n, m, MoveSet::swaps4());
                const Components c4 = check_connectivity(g4);
                if (c4.connected()) continue;
                SwapSplitWitness w{Instance(s, mask), c4.count, components_isomorphic(g4), false};
                w.circle_connected =
                    check_connectivity(build_state_graph(states, n, m, MoveSet::trades_plus_circle())).connected();
                out.push_back(std::move(w));
            }
        } while (std::next_permutation(cols.begin(), cols.end()));
    }
    std::sort(out.begin(), out.end(), [](const SwapSplitWitness &a, const SwapSplitWitness &b) {
        return mask_bits(a.inst.fixed, CellFix::NonEdge) < mask_bits(b.inst.fixed, CellFix::NonEdge);
    });
    return out;
}

}  // namespace bisample
