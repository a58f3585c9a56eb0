#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streamdt/csv.hpp"
#include "streamdt/efdt.hpp"
#include "streamdt/rng.hpp"
#include "streamdt/stream.hpp"
#include "streamdt/tree.hpp"
#include "streamdt/vfdt.hpp"

namespace streamdt {

/// One checkpoint row of a prequential run.
struct PrequentialRecord {
    std::uint64_t timestep = 0;
    double cum_error = 0.0;     // errors so far / timestep, exact
    double window_error = 0.0;  // error rate over the last W instances
    std::uint64_t nodes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t depth = 0;
    double cpu_seconds = 0.0;   // cumulative, predict+learn only
};

struct RunSummary {
    std::uint64_t length = 0;
    std::uint64_t errors = 0;
    double total_error_rate = 0.0;
    double total_cpu_seconds = 0.0;
    std::uint64_t final_nodes = 0;
    std::uint64_t final_leaves = 0;
    std::uint64_t final_depth = 0;
    std::vector<PrequentialRecord> records;
};

namespace detail {

inline double read_clock(clockid_t id) {
    timespec ts{};
    clock_gettime(id, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

// Some virtualized hosts tick the per-process CPU clock at scheduler
// granularity (10ms) regardless of the advertised resolution, which is far
// too coarse for per-block timing. Probe once and fall back to the monotonic
// clock; the timed sections are single-threaded and compute-bound, so wall
// time over them is an accurate stand-in.
inline bool cpu_clock_is_fine() {
    static const bool fine = [] {
        const double start = read_clock(CLOCK_PROCESS_CPUTIME_ID);
        double prev = start;
        double min_step = 1.0;
        while (prev - start < 2e-3) {
            const double now = read_clock(CLOCK_PROCESS_CPUTIME_ID);
            if (now > prev) min_step = std::min(min_step, now - prev);
            prev = now;
        }
        return min_step < 1e-4;
    }();
    return fine;
}

}  // namespace detail

inline double process_cpu_seconds() {
    return detail::cpu_clock_is_fine() ? detail::read_clock(CLOCK_PROCESS_CPUTIME_ID)
                                       : detail::read_clock(CLOCK_MONOTONIC);
}

/// Interleaved test-then-train over the whole stream: each instance is
/// predicted and scored before the learner sees its label. Checkpoints are
/// appended every `checkpoint_every` instances (and at the end of a partial
/// tail). CPU time covers predict+learn only; instances are materialized in
/// blocks outside the timed section.
template <typename Learner>
RunSummary prequential_run(Learner& learner, const StreamSpec& stream,
                           std::uint64_t checkpoint_every = 1000, std::uint64_t window = 1000) {
    stream.validate();
    if (checkpoint_every < 1) throw std::invalid_argument("prequential_run: checkpoint_every must be >= 1");
    if (window < 1) throw std::invalid_argument("prequential_run: window must be >= 1");

    RunSummary out;
    out.length = stream.length;
    std::vector<std::uint8_t> ring(window, 0);
    std::uint64_t window_errors = 0;
    double cpu = 0.0;
    std::vector<Instance> block;
    block.reserve(static_cast<std::size_t>(std::min(checkpoint_every, stream.length)));

    std::uint64_t done = 0;
    while (done < stream.length) {
        const std::uint64_t n = std::min(checkpoint_every, stream.length - done);
        block.clear();
        for (std::uint64_t i = 0; i < n; ++i) block.push_back(instance_at(stream, done + i));

        const double cpu_start = process_cpu_seconds();
        for (std::uint64_t i = 0; i < n; ++i) {
            const Instance& x = block[static_cast<std::size_t>(i)];
            const std::uint8_t miss = learner.predict(x) != x.label ? 1 : 0;
            out.errors += miss;
            const std::uint64_t slot = (done + i) % window;
            if (done + i >= window) window_errors -= ring[static_cast<std::size_t>(slot)];
            ring[static_cast<std::size_t>(slot)] = miss;
            window_errors += miss;
            learner.learn_one(x);
        }
        cpu += process_cpu_seconds() - cpu_start;
        done += n;

        const TreeSummary tree = summarize_tree(learner.root());
        const std::uint64_t in_window = std::min(done, window);
        out.records.push_back({done, static_cast<double>(out.errors) / static_cast<double>(done),
                               static_cast<double>(window_errors) / static_cast<double>(in_window),
                               tree.nodes, tree.leaves, tree.depth, cpu});
    }

    out.total_error_rate = static_cast<double>(out.errors) / static_cast<double>(out.length);
    out.total_cpu_seconds = cpu;
    const TreeSummary final_tree = summarize_tree(learner.root());
    out.final_nodes = final_tree.nodes;
    out.final_leaves = final_tree.leaves;
    out.final_depth = final_tree.depth;
    return out;
}

/// Recipe for instantiating per-seed streams: either a synthetic random-tree
/// source (optionally with an abrupt concept switch) or a CSV file that is
/// reshuffled per seed.
struct StreamTemplate {
    int attrs = 5;
    int values = 5;
    int classes = 5;
    int max_depth = 5;
    double leaf_prob = 0.15;
    std::uint64_t length = 100000;
    std::optional<std::uint64_t> drift_at;
    std::string csv_path;  // file-backed source when nonempty
    bool shuffle = true;   // file sources only

    bool is_file() const { return !csv_path.empty(); }
};

/// Per-seed stream construction. For synthetic sources the run seed fans out
/// into independent concept and instance seeds, so different seeds give
/// different streams and both learners of a comparison see identical bytes.
inline StreamSpec instantiate_stream(const StreamTemplate& tpl, std::uint64_t seed) {
    if (tpl.is_file()) {
        Dataset data = load_csv(tpl.csv_path);
        std::optional<std::uint64_t> shuffle_seed;
        if (tpl.shuffle) shuffle_seed = derive_seed(seed, 4);
        StreamSpec spec = make_file_stream(std::move(data.schema), std::move(data.instances),
                                           shuffle_seed);
        if (tpl.length > 0 && tpl.length < spec.length) spec.length = tpl.length;
        return spec;
    }
    RandomTreeConcept before = build_random_tree_concept(derive_seed(seed, 1), tpl.attrs, tpl.values,
                                                         tpl.classes, tpl.max_depth, tpl.leaf_prob);
    if (tpl.drift_at) {
        RandomTreeConcept after = build_random_tree_concept(derive_seed(seed, 3), tpl.attrs,
                                                            tpl.values, tpl.classes, tpl.max_depth,
                                                            tpl.leaf_prob);
        return make_drift_stream(std::move(before), std::move(after), *tpl.drift_at, tpl.length,
                                 derive_seed(seed, 2));
    }
    return make_concept_stream(std::move(before), tpl.length, derive_seed(seed, 2));
}

struct SeedRun {
    std::uint64_t seed = 0;
    RunSummary vfdt;
    RunSummary efdt;
    std::vector<SplitEvent> efdt_events;
};

struct ComparisonResult {
    std::vector<SeedRun> runs;
    std::vector<std::uint64_t> checkpoints;   // shared record grid
    std::vector<double> mean_vfdt_error;      // pointwise mean cumulative error
    std::vector<double> mean_efdt_error;
    std::vector<double> mean_vfdt_window;
    std::vector<double> mean_efdt_window;
    double mean_vfdt_total_error = 0.0;
    double mean_efdt_total_error = 0.0;
    double mean_vfdt_cpu = 0.0;
    double mean_efdt_cpu = 0.0;
};

/// Paired evaluation: for each seed, a fresh VFDT and a fresh EFDT consume the
/// identical instance sequence; curves are averaged pointwise across seeds.
inline ComparisonResult compare_run(const StreamTemplate& tpl, const HyperParams& params,
                                    std::span<const std::uint64_t> seeds,
                                    std::uint64_t checkpoint_every = 1000,
                                    std::uint64_t window = 1000) {
    if (seeds.empty()) throw std::invalid_argument("compare_run: needs at least one seed");
    ComparisonResult out;
    for (std::uint64_t seed : seeds) {
        const StreamSpec spec = instantiate_stream(tpl, seed);
        SeedRun run;
        run.seed = seed;
        VfdtLearner vfdt(spec.schema, params);
        run.vfdt = prequential_run(vfdt, spec, checkpoint_every, window);
        EfdtLearner efdt(spec.schema, params);
        run.efdt = prequential_run(efdt, spec, checkpoint_every, window);
        run.efdt_events = efdt.split_events();
        out.runs.push_back(std::move(run));
    }

    const std::vector<PrequentialRecord>& grid = out.runs.front().vfdt.records;
    out.checkpoints.reserve(grid.size());
    for (const auto& rec : grid) out.checkpoints.push_back(rec.timestep);
    out.mean_vfdt_error.assign(grid.size(), 0.0);
    out.mean_efdt_error.assign(grid.size(), 0.0);
    out.mean_vfdt_window.assign(grid.size(), 0.0);
    out.mean_efdt_window.assign(grid.size(), 0.0);
    const double n = static_cast<double>(out.runs.size());
    for (const SeedRun& run : out.runs) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out.mean_vfdt_error[i] += run.vfdt.records[i].cum_error / n;
            out.mean_efdt_error[i] += run.efdt.records[i].cum_error / n;
            out.mean_vfdt_window[i] += run.vfdt.records[i].window_error / n;
            out.mean_efdt_window[i] += run.efdt.records[i].window_error / n;
        }
        out.mean_vfdt_total_error += run.vfdt.total_error_rate / n;
        out.mean_efdt_total_error += run.efdt.total_error_rate / n;
        out.mean_vfdt_cpu += run.vfdt.total_cpu_seconds / n;
        out.mean_efdt_cpu += run.efdt.total_cpu_seconds / n;
    }
    return out;
}

/// Checkpoint rows as CSV. When `learner` is nonempty a trailing learner
/// column is added (comparison outputs).
inline void write_run_csv(std::ostream& os, const RunSummary& summary, std::string_view learner = {}) {
    os << "timestep,cum_error,window_error,nodes,leaves,depth,cpu_s";
    if (!learner.empty()) os << ",learner";
    os << '\n';
    char buffer[64];
    for (const PrequentialRecord& rec : summary.records) {
        std::snprintf(buffer, sizeof(buffer), "%.6f,%.6f", rec.cum_error, rec.window_error);
        os << rec.timestep << ',' << buffer << ',' << rec.nodes << ',' << rec.leaves << ','
           << rec.depth << ',';
        std::snprintf(buffer, sizeof(buffer), "%.6f", rec.cpu_seconds);
        os << buffer;
        if (!learner.empty()) os << ',' << learner;
        os << '\n';
    }
}

inline void write_run_csv(const std::filesystem::path& path, const RunSummary& summary,
                          std::string_view learner = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_run_csv(out, summary, learner);
}

}  // namespace streamdt
