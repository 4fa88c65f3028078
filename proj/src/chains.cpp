#include <bisample/chains.hpp>

#include <bisample/realizability.hpp>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace bisample {

namespace {

std::size_t uniform_index(Rng &rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<int> set_minus(std::span<const int> a, std::span<const int> b) {
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<int> set_union(std::span<const int> a, std::span<const int> b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Columns of `from` that may move into `to`: not in A_to and free in both rows.
std::vector<int> movable(const Realization &g, const FixedSet &fixed, int from, int to) {
    std::vector<int> out;
    for (int c : g.row(from))
        if (!g.at(to, c) && fixed.is_free(from, c) && fixed.is_free(to, c)) out.push_back(c);
    return out;
}

/// Uniform k-subset of `pool` by a partial Fisher-Yates pass; sorted.
std::vector<int> draw_subset(std::vector<int> pool, std::size_t k, Rng &rng) {
    for (std::size_t t = 0; t < k; ++t) std::swap(pool[t], pool[t + uniform_index(rng, pool.size() - t)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::pair<int, int> draw_pair(int n, Rng &rng) {
    const int i = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
    int j = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n - 1)));
    if (j >= i) ++j;
    return {i, j};
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t out = 1;
    for (int t = 1; t <= k; ++t) {
        const auto num = static_cast<std::uint64_t>(n - k + t);
        if (out > std::numeric_limits<std::uint64_t>::max() / num) throw std::overflow_error("binomial overflow");
        out = out * num / static_cast<std::uint64_t>(t);
    }
    return out;
}

void ChainConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (sample_gap < 1) throw std::invalid_argument("sample gap must be at least 1");
}

// Trades -----------------------------------------------------------------

ExchangeSets exchangeable(const Realization &g, const FixedSet &fixed, int i, int j) {
    return {movable(g, fixed, i, j), movable(g, fixed, j, i)};
}

std::vector<TradeProposal> enumerate_trades(const Realization &g, const FixedSet &fixed, int i, int j) {
    auto [a_ij, a_ji] = exchangeable(g, fixed, i, j);
    const std::vector<int> pool = set_union(a_ij, a_ji);
    const std::size_t u = pool.size();
    const std::size_t k = a_ij.size();

    std::vector<TradeProposal> out;
    // Selection masks in lexicographic order of the chosen index sequence.
    std::vector<std::size_t> pick(k);
    for (std::size_t t = 0; t < k; ++t) pick[t] = t;
    while (true) {
        TradeProposal trade{i, j, a_ij, a_ji, {}, {}};
        std::vector<char> chosen(u, 0);
        for (std::size_t t : pick) chosen[t] = 1;
        for (std::size_t t = 0; t < u; ++t) (chosen[t] ? trade.b_ij : trade.b_ji).push_back(pool[t]);
        out.push_back(std::move(trade));

        std::size_t t = k;
        while (t > 0 && pick[t - 1] == u - k + t - 1) --t;
        if (t == 0) break;
        ++pick[t - 1];
        for (std::size_t s = t; s < k; ++s) pick[s] = pick[s - 1] + 1;
    }
    return out;
}

std::optional<TradeProposal> propose_trade(const Realization &g, const FixedSet &fixed, Rng &rng) {
    if (g.rows() < 2) return std::nullopt;
    const auto [i, j] = draw_pair(g.rows(), rng);
    auto [a_ij, a_ji] = exchangeable(g, fixed, i, j);
    if (a_ij.empty() || a_ji.empty()) return std::nullopt;

    std::vector<int> pool = set_union(a_ij, a_ji);
    std::vector<int> b_ij = draw_subset(pool, a_ij.size(), rng);
    if (b_ij == a_ij) return std::nullopt;
    std::vector<int> b_ji = set_minus(pool, b_ij);
    return TradeProposal{i, j, std::move(a_ij), std::move(a_ji), std::move(b_ij), std::move(b_ji)};
}

std::optional<TradeProposal> propose_swap(const Realization &g, const FixedSet &fixed, Rng &rng) {
    if (g.rows() < 2) return std::nullopt;
    const auto [i, j] = draw_pair(g.rows(), rng);
    auto [a_ij, a_ji] = exchangeable(g, fixed, i, j);
    const std::size_t options = a_ij.size() * a_ji.size();
    const std::size_t pick = uniform_index(rng, options + 1);
    if (pick == options) return std::nullopt;

    const int out_of_i = a_ij[pick / a_ji.size()];
    const int out_of_j = a_ji[pick % a_ji.size()];
    std::vector<int> b_ij = a_ij;
    std::vector<int> b_ji = a_ji;
    std::replace(b_ij.begin(), b_ij.end(), out_of_i, out_of_j);
    std::replace(b_ji.begin(), b_ji.end(), out_of_j, out_of_i);
    std::sort(b_ij.begin(), b_ij.end());
    std::sort(b_ji.begin(), b_ji.end());
    return TradeProposal{i, j, std::move(a_ij), std::move(a_ji), std::move(b_ij), std::move(b_ji)};
}

void apply_trade(Realization &g, const TradeProposal &trade) {
    g.assign_row(trade.i, set_union(set_minus(g.row(trade.i), trade.a_ij), trade.b_ij));
    g.assign_row(trade.j, set_union(set_minus(g.row(trade.j), trade.a_ji), trade.b_ji));
}

// Circle trades ----------------------------------------------------------

namespace {

int smallest_set(const std::array<std::vector<int>, 3> &sets) {
    int pivot = 0;
    for (int t = 1; t < 3; ++t)
        if (sets[static_cast<std::size_t>(t)].size() < sets[static_cast<std::size_t>(pivot)].size()) pivot = t;
    return pivot;
}

std::size_t slot(int t) { return static_cast<std::size_t>(t); }

}  // namespace

CircleTradeProposal circle_trade_sets(const Realization &g, const FixedSet &fixed, int i, int j, int k) {
    if (i == j || j == k || i == k) throw InvalidMove("circle trade needs three distinct rows");
    CircleTradeProposal trade;
    trade.rows = {i, j, k};
    for (int t = 0; t < 3; ++t) {
        const int from = trade.rows[slot(t)];
        const int to = trade.rows[slot((t + 2) % 3)];
        trade.leaving[slot(t)] = movable(g, fixed, from, to);
    }
    trade.pivot = smallest_set(trade.leaving);
    return trade;
}

CircleTradeProposal make_circle_trade(const Realization &g, const FixedSet &fixed, std::array<int, 3> rows,
                                      std::vector<int> moved_i, std::vector<int> moved_j, std::vector<int> moved_k) {
    CircleTradeProposal trade = circle_trade_sets(g, fixed, rows[0], rows[1], rows[2]);
    trade.moved = {std::move(moved_i), std::move(moved_j), std::move(moved_k)};
    for (int t = 0; t < 3; ++t) {
        auto &moved = trade.moved[slot(t)];
        std::sort(moved.begin(), moved.end());
        if (std::adjacent_find(moved.begin(), moved.end()) != moved.end())
            throw InvalidMove("duplicate column in circle trade");
        const auto &allowed = trade.leaving[slot(t)];
        if (!std::includes(allowed.begin(), allowed.end(), moved.begin(), moved.end()))
            throw InvalidMove("circle trade moves a column outside its candidate set");
        if (moved.size() != trade.moved[0].size()) throw InvalidMove("circle trade subsets differ in size");
    }
    return trade;
}

std::optional<CircleTradeProposal> propose_circle_trade(const Realization &g, const FixedSet &fixed, Rng &rng) {
    const int n = g.rows();
    if (n < 3) return std::nullopt;
    const auto [i, j] = draw_pair(n, rng);
    int k = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n - 2)));
    for (int skip : {std::min(i, j), std::max(i, j)})
        if (k >= skip) ++k;

    CircleTradeProposal trade = circle_trade_sets(g, fixed, i, j, k);
    const auto &pivot_set = trade.leaving[slot(trade.pivot)];
    if (pivot_set.empty()) return std::nullopt;

    // Uniform subset of the pivot set: one random bit per element, drawn as
    // integers of up to 63 bits, lowest bit for the smallest element.
    auto &chosen = trade.moved[slot(trade.pivot)];
    for (std::size_t base = 0; base < pivot_set.size(); base += 63) {
        const std::size_t width = std::min<std::size_t>(63, pivot_set.size() - base);
        const std::uint64_t bits =
            std::uniform_int_distribution<std::uint64_t>(0, (std::uint64_t{1} << width) - 1)(rng);
        for (std::size_t b = 0; b < width; ++b)
            if ((bits >> b) & 1U) chosen.push_back(pivot_set[base + b]);
    }
    if (chosen.empty()) return std::nullopt;

    for (int t = 0; t < 3; ++t)
        if (t != trade.pivot) trade.moved[slot(t)] = draw_subset(trade.leaving[slot(t)], chosen.size(), rng);
    return trade;
}

void apply_circle_trade(Realization &g, const CircleTradeProposal &trade) {
    std::array<std::vector<int>, 3> next;
    for (int t = 0; t < 3; ++t) {
        const int row = trade.rows[slot(t)];
        next[slot(t)] = set_union(set_minus(g.row(row), trade.moved[slot(t)]), trade.moved[slot((t + 1) % 3)]);
    }
    for (int t = 0; t < 3; ++t) g.assign_row(trade.rows[slot(t)], std::move(next[slot(t)]));
}

CircleTradeProposal reverse_circle_trade(const Realization &after, const FixedSet &fixed,
                                         const CircleTradeProposal &forward) {
    const auto &[i, j, k] = forward.rows;
    return make_circle_trade(after, fixed, {i, k, j}, forward.moved[1], forward.moved[0], forward.moved[2]);
}

SelectionOdds selection_odds(const CircleTradeProposal &trade) {
    SelectionOdds odds;
    const int x = static_cast<int>(trade.size());
    odds.pivot_bits = static_cast<int>(trade.leaving[slot(trade.pivot)].size());
    for (int t = 0; t < 3; ++t) {
        if (t == trade.pivot) continue;
        const std::uint64_t c = binomial(static_cast<int>(trade.leaving[slot(t)].size()), x);
        if (c != 0 && odds.binomials > std::numeric_limits<std::uint64_t>::max() / c)
            throw std::overflow_error("selection odds overflow");
        odds.binomials *= c;
    }
    return odds;
}

double circle_acceptance(const CircleTradeProposal &forward, const CircleTradeProposal &reverse) {
    auto log_probability = [](const CircleTradeProposal &trade) {
        const int x = static_cast<int>(trade.size());
        double out = -static_cast<double>(trade.leaving[slot(trade.pivot)].size()) * std::log(2.0);
        for (int t = 0; t < 3; ++t)
            if (t != trade.pivot) out -= log_binomial(static_cast<int>(trade.leaving[slot(t)].size()), x);
        return out;
    };
    const double log_ratio = log_probability(reverse) - log_probability(forward);
    // Rounding noise must not turn an exact 1 into a rejection.
    if (log_ratio >= -1e-12) return 1.0;
    return std::exp(log_ratio);
}

// Cycle swaps ------------------------------------------------------------

std::optional<CellCycle> propose_bounded_cycle_swap(const Realization &g, const FixedSet &fixed, int max_len,
                                                    Rng &rng) {
    if (max_len < 4 || max_len % 2 != 0) throw std::invalid_argument("cycle bound must be even and at least 4");
    const std::size_t lengths = static_cast<std::size_t>(max_len / 2 - 1);
    const int half = 2 + static_cast<int>(uniform_index(rng, lengths));
    if (half > g.rows() || half > g.cols()) return std::nullopt;

    auto draw_distinct = [&rng](int universe, int count) {
        std::vector<int> pool(static_cast<std::size_t>(universe));
        for (int v = 0; v < universe; ++v) pool[static_cast<std::size_t>(v)] = v;
        for (int t = 0; t < count; ++t)
            std::swap(pool[slot(t)], pool[slot(t) + uniform_index(rng, pool.size() - slot(t))]);
        pool.resize(static_cast<std::size_t>(count));
        return pool;
    };
    const std::vector<int> rows = draw_distinct(g.rows(), half);
    const std::vector<int> cols = draw_distinct(g.cols(), half);

    CellCycle cycle;
    cycle.reserve(static_cast<std::size_t>(2 * half));
    for (int t = 0; t < half; ++t) {
        cycle.push_back({rows[slot(t)], cols[slot(t)]});
        cycle.push_back({rows[slot((t + 1) % half)], cols[slot(t)]});
    }
    for (std::size_t t = 0; t < cycle.size(); ++t) {
        if (!fixed.is_free(cycle[t].row, cycle[t].col)) return std::nullopt;
        if (g.at(cycle[t]) == g.at(cycle[(t + 1) % cycle.size()])) return std::nullopt;
    }
    return cycle;
}

// Running ----------------------------------------------------------------

namespace {

bool circle_step(Realization &g, const FixedSet &fixed, bool mh_correction, Rng &rng) {
    auto trade = propose_circle_trade(g, fixed, rng);
    if (!trade) return false;
    apply_circle_trade(g, *trade);
    if (!mh_correction) return true;
    const CircleTradeProposal reverse = reverse_circle_trade(g, fixed, *trade);
    const double accept = circle_acceptance(*trade, reverse);
    if (accept >= 1.0 || std::uniform_real_distribution<double>(0.0, 1.0)(rng) < accept) return true;
    apply_circle_trade(g, reverse);
    return false;
}

}  // namespace

bool step(Realization &g, const FixedSet &fixed, const MoveSet &moves, bool mh_correction, Rng &rng) {
    switch (moves.kind()) {
    case MoveSet::Kind::Trades:
        if (auto trade = propose_trade(g, fixed, rng)) {
            apply_trade(g, *trade);
            return true;
        }
        return false;
    case MoveSet::Kind::Swaps4:
        if (auto swap = propose_swap(g, fixed, rng)) {
            apply_trade(g, *swap);
            return true;
        }
        return false;
    case MoveSet::Kind::Swaps46:
    case MoveSet::Kind::SwapsUpTo:
        if (auto cycle = propose_bounded_cycle_swap(g, fixed, moves.max_cycle_length(), rng)) {
            for (const Pos p : *cycle) g.flip(p);
            return true;
        }
        return false;
    case MoveSet::Kind::TradesPlusCircle:
        if (uniform_index(rng, 2) == 0) {
            if (auto trade = propose_trade(g, fixed, rng)) {
                apply_trade(g, *trade);
                return true;
            }
            return false;
        }
        return circle_step(g, fixed, mh_correction, rng);
    }
    return false;
}

void run_from(Realization start, const FixedSet &fixed, const ChainConfig &cfg,
              const std::function<void(const Realization &)> &sink) {
    cfg.validate();
    Rng rng(cfg.seed);
    for (std::uint64_t s = 1; s <= cfg.steps; ++s) {
        step(start, fixed, cfg.move_set, cfg.mh_correction, rng);
        if (s % cfg.sample_gap == 0) sink(start);
    }
}

void run(const Instance &inst, const ChainConfig &cfg, const std::function<void(const Realization &)> &sink) {
    cfg.validate();
    run_from(initial_realization(inst), inst.fixed, cfg, sink);
}

std::vector<Realization> run(const Instance &inst, const ChainConfig &cfg) {
    std::vector<Realization> samples;
    run(inst, cfg, [&samples](const Realization &g) { samples.push_back(g); });
    return samples;
}

}  // namespace bisample
