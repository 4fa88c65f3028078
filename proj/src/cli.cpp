#include <bisample/cli.hpp>

#include <bisample/analysis.hpp>
#include <bisample/chains.hpp>
#include <bisample/io.hpp>
#include <bisample/oracle.hpp>
#include <bisample/realizability.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace bisample {

namespace {

struct Reduction {
    StaticSet static_cells;
    FixedPartition partition;
};

// Static-set pipeline: F' from the degree sequence, then H -> (F, F*).
// Without reduction F is H itself.
Reduction reduce(const Instance &inst, bool enabled) {
    Reduction out;
    if (!enabled) {
        out.static_cells = StaticSet(FixedSet(inst.rows(), inst.cols()));
        out.partition = FixedPartition{inst.fixed, {}};
        return out;
    }
    out.static_cells = static_set(inst.degrees);
    out.partition = partition_fixed_set(inst, out.static_cells);
    return out;
}

const char *yes_no(bool v) { return v ? "yes" : "no"; }

// Report fields survive a missing bound; the recommendation does not.
struct Recommendation {
    AnalysisReport report;
    bool usable = true;
};

Recommendation recommend(const FixedSet &f) {
    Recommendation out;
    try {
        out.report = analyze(f);
    } catch (const NoUsableBound &) {
        const FGraph g(f);
        out.usable = false;
        out.report.has_3_matching = max_matching_at_least(g, 3);
        out.report.has_8_cycle = has_cycle_of_length(g, 8);
        out.report.is_forest = is_forest(g);
    }
    return out;
}

int cmd_analyze(const std::string &path, bool no_reduce, std::ostream &out) {
    const Instance inst = read_instance(path);
    out << "instance: " << path << '\n';
    out << "size: " << inst.rows() << " x " << inst.cols() << '\n';
    const bool realizable = gale_ryser_realizable(inst.degrees);
    out << "realizable: " << yes_no(realizable) << '\n';
    if (!realizable) return exit_infeasible;

    Reduction red;
    try {
        red = reduce(inst, !no_reduce);
    } catch (const PolarityConflict &e) {
        out << "feasible: no (" << e.what() << ")\n";
        return exit_infeasible;
    }
    try {
        (void)initial_realization(inst);
    } catch (const Infeasible &) {
        out << "feasible: no\n";
        return exit_infeasible;
    }
    out << "feasible: yes\n";
    out << "|H| = " << inst.fixed.size() << '\n';
    if (!no_reduce)
        out << "|F'| = " << red.static_cells.size() << " (" << red.static_cells.forced_edges().size() << " edges, "
            << red.static_cells.forced_non_edges().size() << " non-edges)\n";
    const FixedSet &f = red.partition.reduced;
    if (f.empty())
        out << "|F| = 0; plain Curveball applies\n";
    else
        out << "|F| = " << f.size() << '\n';
    out << "|F*| = " << red.partition.redundant.size() << '\n';

    const Recommendation rec = recommend(f);
    out << "has_3_matching: " << yes_no(rec.report.has_3_matching) << '\n';
    out << "has_8_cycle: " << yes_no(rec.report.has_8_cycle) << '\n';
    out << "is_forest: " << yes_no(rec.report.is_forest) << '\n';
    out << "min_excluded_ell: ";
    if (rec.report.min_excluded_ell)
        out << *rec.report.min_excluded_ell << '\n';
    else
        out << "none\n";
    out << "recommended: " << (rec.usable ? rec.report.recommended.name() : std::string("none")) << '\n';
    return exit_ok;
}

struct SampleArgs {
    std::string path;
    std::string chain = "auto";
    std::uint64_t steps = 1000;
    std::uint64_t seed = 0;
    std::uint64_t count = 1;
    std::uint64_t gap = 0;
    std::string mh = "on";
    std::string out_dir;
    bool no_reduce = false;
};

MoveSet chain_moves(const std::string &chain, const FixedSet &f) {
    if (chain == "auto") {
        const Recommendation rec = recommend(f);
        if (!rec.usable) throw NoUsableBound("no cycle length excluded from F; choose --chain cycle:L explicitly");
        return rec.report.recommended;
    }
    if (chain == "swap") return MoveSet::swaps4();
    if (chain == "curveball") return MoveSet::trades();
    if (chain == "circle") return MoveSet::trades_plus_circle();
    if (chain.rfind("cycle:", 0) == 0) return MoveSet::parse(chain);
    throw std::invalid_argument("unknown chain '" + chain + "'");
}

int cmd_sample(const SampleArgs &a, std::ostream &out, std::ostream &err) {
    if (a.steps < 1) {
        err << "error: --steps must be at least 1\n";
        return exit_usage;
    }
    if (a.count < 1) {
        err << "error: --count must be at least 1\n";
        return exit_usage;
    }
    const Instance inst = read_instance(a.path);
    if (!gale_ryser_realizable(inst.degrees)) {
        err << "error: degree sequence is not realizable\n";
        return exit_infeasible;
    }
    const Reduction red = reduce(inst, !a.no_reduce);
    const FixedSet &f = red.partition.reduced;

    MoveSet moves = MoveSet::trades();
    try {
        moves = chain_moves(a.chain, f);
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const NoUsableBound &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    const Realization start = initial_realization(Instance(inst.degrees, f));

    ChainConfig cfg;
    cfg.move_set = moves;
    cfg.steps = a.steps;
    cfg.sample_gap = a.gap == 0 ? a.steps : a.gap;
    cfg.mh_correction = a.mh == "on";

    if (!a.out_dir.empty()) std::filesystem::create_directories(a.out_dir);
    std::uint64_t written = 0;
    for (std::uint64_t idx = 0; idx < a.count; ++idx) {
        cfg.seed = a.seed + idx;
        run_from(start, f, cfg, [&](const Realization &g) {
            if (!g.satisfies(inst)) throw std::logic_error("sample violates the instance");
            const std::string text = format_realization(g);
            if (a.out_dir.empty()) {
                if (written > 0) out << '\n';
                out << text;
            } else {
                char name[32];
                std::snprintf(name, sizeof name, "sample_%06llu.txt", static_cast<unsigned long long>(written));
                std::ofstream file(std::filesystem::path(a.out_dir) / name);
                if (!file) throw Error("cannot write to " + a.out_dir);
                file << text;
            }
            ++written;
        });
    }
    if (!a.out_dir.empty()) out << "chain: " << moves.name() << "\nwrote " << written << " samples to " << a.out_dir << '\n';
    return exit_ok;
}

struct VerifyArgs {
    int max_rows = 5;
    int max_cols = 5;
    int random = 200;
    std::uint64_t seed = 1;
    std::string fault;
    std::string witness_out;
};

int cmd_verify(const VerifyArgs &a, std::ostream &out, std::ostream &err) {
    if (a.max_rows < 1 || a.max_cols < 1 || a.max_rows * a.max_cols > max_enumeration_cells) {
        err << "error: need 1 <= rows, 1 <= cols and rows*cols <= " << max_enumeration_cells << '\n';
        return exit_usage;
    }
    VerifyOptions opts;
    opts.pool.exhaustive_rows = std::min(3, a.max_rows);
    opts.pool.exhaustive_cols = std::min(4, a.max_cols);
    opts.pool.random_rows = a.max_rows;
    opts.pool.random_cols = a.max_cols;
    opts.pool.random_count = a.random;
    opts.pool.seed = a.seed;
    opts.drop_six_swaps = a.fault == "drop-6-swaps";

    const VerifyReport report = verify(opts);
    out << format_report(report);
    if (report.passed()) return exit_ok;
    for (const auto &c : report.checks) {
        if (!c.witness) continue;
        out << "witness " << c.name << ":\n" << format_instance(*c.witness);
        if (!a.witness_out.empty()) write_instance(a.witness_out, *c.witness);
        break;
    }
    return exit_verify_failed;
}

int cmd_enumerate(const std::string &path, bool list, std::ostream &out) {
    const Instance inst = read_instance(path);
    const auto states = enumerate_realizations(inst);
    out << "realizations: " << states.size() << '\n';
    if (list)
        for (const auto &g : states) out << '\n' << format_realization(g);
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Sampling of bipartite realizations with fixed edges and non-edges", "bisample"};
    app.require_subcommand(1);

    std::string analyze_path;
    bool analyze_no_reduce = false;
    auto *analyze_cmd = app.add_subcommand("analyze", "Static set, partition and chain recommendation");
    analyze_cmd->add_option("instance", analyze_path, "Instance file")->required();
    analyze_cmd->add_flag("--no-reduce", analyze_no_reduce, "Skip the static-set reduction");

    SampleArgs sample;
    auto *sample_cmd = app.add_subcommand("sample", "Run Markov chains and emit realizations");
    sample_cmd->add_option("instance", sample.path, "Instance file")->required();
    sample_cmd->add_option("--chain", sample.chain, "auto, swap, curveball, circle or cycle:L");
    sample_cmd->add_option("--steps", sample.steps, "Steps per chain");
    sample_cmd->add_option("--seed", sample.seed, "Seed of the first chain");
    sample_cmd->add_option("--count", sample.count, "Number of chains, seeded seed, seed+1, ...");
    sample_cmd->add_option("--gap", sample.gap, "Steps between emitted samples (default: steps)");
    sample_cmd->add_option("--mh", sample.mh, "Metropolis correction for circle trades")
        ->check(CLI::IsMember({"on", "off"}));
    sample_cmd->add_option("--out", sample.out_dir, "Write one file per sample into this directory");
    sample_cmd->add_flag("--no-reduce", sample.no_reduce, "Skip the static-set reduction");

    VerifyArgs verify_args;
    auto *verify_cmd = app.add_subcommand("verify", "Check the connectivity results on small instances");
    verify_cmd->add_option("--max-rows", verify_args.max_rows, "Rows of random instances");
    verify_cmd->add_option("--max-cols", verify_args.max_cols, "Columns of random instances");
    verify_cmd->add_option("--random", verify_args.random, "Random instances per class");
    verify_cmd->add_option("--seed", verify_args.seed, "Seed for random instances");
    verify_cmd->add_option("--inject-fault", verify_args.fault, "Mutation test")
        ->check(CLI::IsMember({"drop-6-swaps"}));
    verify_cmd->add_option("--witness-out", verify_args.witness_out, "Write the first failing instance here");

    std::string enumerate_path;
    bool enumerate_list = false;
    auto *enumerate_cmd = app.add_subcommand("enumerate", "Count all realizations of a small instance");
    enumerate_cmd->add_option("instance", enumerate_path, "Instance file")->required();
    enumerate_cmd->add_flag("--list", enumerate_list, "Print every realization");

    std::vector<const char *> argv{"bisample"};
    for (const auto &a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_path, analyze_no_reduce, out);
        if (sample_cmd->parsed()) return cmd_sample(sample, out, err);
        if (verify_cmd->parsed()) return cmd_verify(verify_args, out, err);
        if (enumerate_cmd->parsed()) return cmd_enumerate(enumerate_path, enumerate_list, out);
    } catch (const ParseError &e) {
        err << e.what() << '\n';
        return exit_usage;
    } catch (const TooLarge &e) {
        err << "error: " << e.what() << '\n';
        return exit_too_large;
    } catch (const Infeasible &e) {
        err << "error: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const NotRealizable &e) {
        err << "error: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const PolarityConflict &e) {
        err << "error: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace bisample
