#pragma once

// Markov chains over F-fixed realizations: the F-ignoring swap and Curveball
// chains, Curveball with circle trades, and bounded cycle swaps.
//
// Every random choice is taken from one std::mt19937_64 per run, in a fixed
// order: row pair or triple first, then subset draws in ascending element
// order. Runs are reproducible for a given seed on one standard library.

#include <bisample/core.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace bisample {

using Rng = std::mt19937_64;

struct ChainConfig {
    MoveSet move_set = MoveSet::trades();
    std::uint64_t steps = 1;
    std::uint64_t seed = 0;
    std::uint64_t sample_gap = 1;
    /// Metropolis-Hastings acceptance for circle trades.
    bool mh_correction = true;

    /// Throws std::invalid_argument unless steps >= 1 and sample_gap >= 1.
    void validate() const;
};

// Trades -----------------------------------------------------------------

/// A_{i-j} = A_i \ (F_i ∪ A_j ∪ F_j) and its mirror image.
struct ExchangeSets {
    std::vector<int> a_ij;
    std::vector<int> a_ji;
};

ExchangeSets exchangeable(const Realization &g, const FixedSet &fixed, int i, int j);

struct TradeProposal {
    int i = 0;
    int j = 0;
    std::vector<int> a_ij;
    std::vector<int> a_ji;
    std::vector<int> b_ij;  // replaces a_ij in row i
    std::vector<int> b_ji;  // replaces a_ji in row j

    bool is_stay() const { return b_ij == a_ij; }
};

/// Every trade for the row pair, b_ij in lexicographic order. The identity
/// trade (a stay) is included.
std::vector<TradeProposal> enumerate_trades(const Realization &g, const FixedSet &fixed, int i, int j);

/// Uniform row pair, then a uniform |A_{i-j}|-subset of A_{i-j} ∪ A_{j-i}.
/// nullopt when the drawn trade leaves g unchanged.
std::optional<TradeProposal> propose_trade(const Realization &g, const FixedSet &fixed, Rng &rng);

/// Uniform row pair, then uniform among the |A_{i-j}|*|A_{j-i}| single
/// exchanges and one stay.
std::optional<TradeProposal> propose_swap(const Realization &g, const FixedSet &fixed, Rng &rng);

void apply_trade(Realization &g, const TradeProposal &trade);

// Circle trades ----------------------------------------------------------

/// Three-row rotation. Row rows[t] hands moved[t] to row rows[(t + 2) % 3]
/// and receives moved[(t + 1) % 3]. For rows = (i, j, k) the candidate sets
/// are leaving = (A_{i-k}, A_{j-i}, A_{k-j}) with
/// A_{p-q} = A_p \ (A_q ∪ F_p ∪ F_q).
struct CircleTradeProposal {
    std::array<int, 3> rows{};
    std::array<std::vector<int>, 3> leaving;
    int pivot = 0;  // smallest leaving set, first on ties
    std::array<std::vector<int>, 3> moved;

    std::size_t size() const { return moved[0].size(); }
};

/// Candidate sets for an ordered row triple; nothing moved yet.
CircleTradeProposal circle_trade_sets(const Realization &g, const FixedSet &fixed, int i, int j, int k);

/// Explicit circle trade; throws InvalidMove unless each subset lies in its
/// candidate set and all three have equal size.
CircleTradeProposal make_circle_trade(const Realization &g, const FixedSet &fixed, std::array<int, 3> rows,
                                      std::vector<int> moved_i, std::vector<int> moved_j, std::vector<int> moved_k);

/// Uniform ordered triple, uniform subset of the smallest candidate set
/// (one random bit per element), then uniform subsets of the same size from
/// the other two sets. nullopt for an empty trade or fewer than 3 rows.
std::optional<CircleTradeProposal> propose_circle_trade(const Realization &g, const FixedSet &fixed, Rng &rng);

void apply_circle_trade(Realization &g, const CircleTradeProposal &trade);

/// The trade undoing `forward`, with candidate sets taken from `after`.
CircleTradeProposal reverse_circle_trade(const Realization &after, const FixedSet &fixed,
                                         const CircleTradeProposal &forward);

/// Probability of drawing trade.moved once its rows are fixed:
/// 2^-pivot_bits / binomials.
struct SelectionOdds {
    int pivot_bits = 0;
    std::uint64_t binomials = 1;
};

SelectionOdds selection_odds(const CircleTradeProposal &trade);

/// min(1, P(reverse) / P(forward)) from the selection probabilities.
double circle_acceptance(const CircleTradeProposal &forward, const CircleTradeProposal &reverse);

// Cycle swaps ------------------------------------------------------------

/// Uniform even length in [4, max_len], then uniform ordered distinct rows
/// and columns laid out alternately. Returns the cycle only if it alternates
/// in g and avoids fixed cells.
std::optional<CellCycle> propose_bounded_cycle_swap(const Realization &g, const FixedSet &fixed, int max_len,
                                                    Rng &rng);

// Running ----------------------------------------------------------------

/// One step of the chain selected by `moves`; returns true if g changed.
bool step(Realization &g, const FixedSet &fixed, const MoveSet &moves, bool mh_correction, Rng &rng);

/// Starts from initial_realization(inst), performs cfg.steps steps and
/// hands every cfg.sample_gap-th state to `sink`.
void run(const Instance &inst, const ChainConfig &cfg, const std::function<void(const Realization &)> &sink);
std::vector<Realization> run(const Instance &inst, const ChainConfig &cfg);

void run_from(Realization start, const FixedSet &fixed, const ChainConfig &cfg,
              const std::function<void(const Realization &)> &sink);

std::uint64_t binomial(int n, int k);

}  // namespace bisample
