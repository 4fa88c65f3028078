#pragma once

// Brute-force ground truth for small instances: exhaustive enumeration,
// state graphs under each move set, and the connectivity, distance,
// static-set and reversibility checks run over an instance pool.

#include <bisample/chains.hpp>
#include <bisample/core.hpp>
#include <bisample/realizability.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bisample {

/// Largest grid the enumerator accepts, in cells.
inline constexpr int max_enumeration_cells = 36;

/// Every F-fixed realization in ascending bit-string order. Throws TooLarge
/// above max_enumeration_cells.
std::vector<Realization> enumerate_realizations(const Instance &inst);

/// Same as enumerate_realizations but returns the row-major bit keys only.
/// Needs rows*cols <= 64 as well.
std::vector<std::uint64_t> enumerate_keys(const Instance &inst);

enum class MoveLabel : std::uint8_t { Swap, Trade, CircleTrade };

struct StateEdge {
    int to = 0;
    MoveLabel label = MoveLabel::Swap;
    int length = 0;  // cells in the symmetric difference
};

struct StateGraph {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint64_t> states;  // ascending bit keys
    std::vector<std::vector<StateEdge>> adj;

    std::size_t size() const { return states.size(); }
    std::size_t edge_count() const;
    /// Index of a state key, or -1.
    int index_of(std::uint64_t key) const;
    Realization state(int index) const { return Realization::from_bits(rows, cols, states[static_cast<std::size_t>(index)]); }
};

/// Shape of the symmetric difference of two realizations given as keys.
struct DiffShape {
    int cells = 0;
    int rows_touched = 0;
    bool single_cycle = false;     // one vertex-disjoint alternating cycle
    bool circle_rotation = false;  // three rows, all columns moving one way round
};

DiffShape diff_shape(std::uint64_t a, std::uint64_t b, int rows, int cols);

/// Edges between states one move apart. Swap kinds: the difference is one
/// vertex-disjoint cycle of allowed length. Trades: exactly two rows differ.
/// Trades plus circle: additionally three rows differ by a rotation.
/// States are assumed to realize one instance, so fixed cells never differ.
StateGraph build_state_graph(const std::vector<std::uint64_t> &states, int rows, int cols, const MoveSet &moves);
StateGraph build_state_graph(const std::vector<Realization> &states, const MoveSet &moves);

struct Components {
    std::vector<int> of;  // component id per state, ids in order of first state
    int count = 0;

    bool connected() const { return count <= 1; }
    std::vector<std::vector<int>> members() const;
};

Components check_connectivity(const StateGraph &sg);

struct DistanceCheck {
    bool holds = true;  // dist <= |G△G'|/2 - 1 for all pairs
    /// dist <= |G△G'|/2, the bound read with both endpoints counted as moves.
    bool holds_lenient = true;
    bool connected = true;
    int worst_from = -1;
    int worst_to = -1;
};

DistanceCheck distance_bound(const StateGraph &sg);
bool check_distance_bound(const StateGraph &sg);

/// static_set(inst.degrees) against the cellwise intersection of all
/// realizations of the unconstrained sequence.
bool check_static_set(const DegreeSequence &s, const std::vector<std::uint64_t> &all_realizations);

/// Ground-truth static set computed from a complete realization list.
StaticSet static_set_from(const DegreeSequence &s, const std::vector<std::uint64_t> &all_realizations);

/// Components compared pairwise as unlabeled graphs. Throws TooLarge for
/// more than 16 components.
bool components_isomorphic(const StateGraph &sg);

struct UniformityReport {
    std::size_t states = 0;
    std::uint64_t samples = 0;
    double tv_distance = 0.0;
    double chi_square = 0.0;
    double chi_square_p = 1.0;
};

/// Runs the chain from initial_realization and bins every emitted state
/// against the enumerated state list.
UniformityReport uniformity_report(const Instance &inst, const ChainConfig &cfg);

// Exact transition kernels ---------------------------------------------------

struct ReversibilityResult {
    std::size_t pairs_checked = 0;
    std::size_t violations = 0;
    int witness_from = -1;
    int witness_to = -1;
    bool rows_sum_to_one = true;
};

/// One-step kernel of the Trades chain, computed in exact rationals from
/// first principles, checked for P(A,B) == P(B,A).
ReversibilityResult trades_reversibility(const Instance &inst, const std::vector<std::uint64_t> &states);

/// Same for trades plus circle trades, with or without the Metropolis
/// correction on circle trades.
ReversibilityResult circle_reversibility(const Instance &inst, const std::vector<std::uint64_t> &states,
                                         bool mh_correction);

// Verification suite ---------------------------------------------------------

enum class PoolClass : std::uint8_t { Exhaustive, RandomNoMatching, RandomGeneral };

struct PoolOptions {
    int exhaustive_rows = 3;
    int exhaustive_cols = 4;
    int max_fixed = 4;
    int random_rows = 5;
    int random_cols = 5;
    int random_count = 200;  // per random class
    std::uint64_t seed = 1;
    /// Random instances with more realizations are redrawn.
    std::size_t random_state_cap = 1500;
};

/// Calls visit(inst, cls, realizations) for every feasible pool instance.
void for_each_pool_instance(
    const PoolOptions &opts,
    const std::function<void(const Instance &, PoolClass, const std::vector<std::uint64_t> &)> &visit);

enum Check : unsigned {
    check_static = 1U << 0,
    check_lifting = 1U << 1,
    check_swap4 = 1U << 2,      // no 3-matching: connected + distance bound
    check_trade_swap = 1U << 3, // no 3-matching: trade and swap components agree
    check_six = 1U << 4,        // no 8-cycle / forest: {4,6}-swaps connected
    check_bounded = 1U << 5,    // no 2l-cycle: swaps up to 2l-2 connected
    check_circle = 1U << 6,     // no 8-cycle: trades plus circle connected
    check_reversible = 1U << 7, // exact detailed balance on small instances
    check_all = (1U << 8) - 1,
};

struct VerifyOptions {
    PoolOptions pool;
    unsigned checks = check_all;
    std::size_t reversibility_limit = 60;
    /// Mutation test: build {4,6}-swap graphs without 6-swaps.
    bool drop_six_swaps = false;
};

struct CheckTally {
    std::string name;
    std::uint64_t applied = 0;
    std::uint64_t failed = 0;
    std::optional<Instance> witness;  // first failing instance
};

struct VerifyReport {
    std::uint64_t instances = 0;
    std::vector<CheckTally> checks;
    /// Informational: circle-trade kernel without correction.
    std::uint64_t raw_circle_checked = 0;
    std::uint64_t raw_circle_irreversible = 0;
    /// Pairs within |G△G'|/2 moves but not |G△G'|/2 - 1.
    std::uint64_t distance_lenient_only = 0;

    bool passed() const;
    const CheckTally *find(const std::string &name) const;
    std::optional<Instance> first_witness() const;
};

VerifyReport verify(const VerifyOptions &opts);

/// One "check <name> applied=<k> failed=<f> PASS|FAIL [witness=<digest>]"
/// line per check, then the informational lines.
std::string format_report(const VerifyReport &report);

// Counter-example search -----------------------------------------------------

struct SwapSplitWitness {
    Instance inst;
    int swap4_components = 0;
    bool isomorphic = true;
    bool circle_connected = false;
};

/// Scans S = ((1,1,1,1),(2,1,1)) with a 3-matching of forced non-edges plus
/// one more forced non-edge; returns every mask whose 4-swap state graph is
/// disconnected.
std::vector<SwapSplitWitness> search_split_instances();

}  // namespace bisample
