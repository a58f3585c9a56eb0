// streamdt command line: synthetic stream generation, prequential runs,
// paired VFDT/EFDT comparisons, and batch-tree convergence checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streamdt/streamdt.hpp"

namespace {

namespace fs = std::filesystem;
using namespace streamdt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;

struct CommonOptions {
    // synthetic stream
    int attrs = 5;
    int values = 5;
    int classes = 5;
    int max_depth = 5;
    double leaf_prob = 0.15;
    std::uint64_t length = 100000;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> drift_at;
    // file stream
    std::string csv_path;
    std::optional<std::uint64_t> shuffle_seed;
    // learner
    HyperParams params;
    // evaluation
    std::uint64_t checkpoint = 1000;
    std::uint64_t window = 1000;
    std::string out_dir = ".";
    std::string experiment = "experiment";
};

void add_stream_flags(CLI::App* cmd, CommonOptions& opt, bool allow_csv) {
    cmd->add_option("--attrs", opt.attrs, "Nominal attributes in the synthetic schema")
        ->capture_default_str()
        ->check(CLI::Range(1, 1000));
    cmd->add_option("--values", opt.values, "Values per nominal attribute")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000));
    cmd->add_option("--classes", opt.classes, "Number of classes")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000));
    cmd->add_option("--max-depth", opt.max_depth, "Depth cap of the hidden concept tree")
        ->capture_default_str()
        ->check(CLI::Range(1, 64));
    cmd->add_option("--leaf-prob", opt.leaf_prob,
                    "Chance that a concept node below the root becomes a leaf")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--length", opt.length, "Stream length in instances")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{2000000000}));
    cmd->add_option("--seed", opt.seed, "Run seed; concept and instance seeds derive from it")
        ->capture_default_str();
    if (allow_csv) {
        cmd->add_option("--csv", opt.csv_path, "Read the stream from this CSV instead of generating");
        cmd->add_option("--shuffle-seed", opt.shuffle_seed,
                        "Shuffle the CSV rows with this seed before streaming");
        cmd->add_option("--drift-at", opt.drift_at,
                        "Swap to a second concept at this timestep (synthetic streams)");
    }
}

void add_learner_flags(CLI::App* cmd, HyperParams& params) {
    cmd->add_option("--delta", params.delta,
                    "Split-test significance. 0.05 is this tool's own default; no canonical "
                    "value exists, so tune it for your workload")
        ->capture_default_str()
        ->check(CLI::Range(1e-12, 0.9999999));
    cmd->add_option("--tau", params.tau, "Tie-break threshold for the Hoeffding tree split test")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 10.0));
    cmd->add_option("--leaf-cadence", params.leaf_cadence,
                    "Examples between split attempts at a leaf")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1000000}));
    cmd->add_option("--internal-cadence", params.internal_cadence,
                    "Examples between re-evaluations at an internal node (EFDT)")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1000000}));
    cmd->add_option("--numeric-candidates", params.numeric_candidates,
                    "Candidate thresholds per numeric attribute")
        ->capture_default_str()
        ->check(CLI::Range(1, 1000));
    cmd->add_flag("--reuse-nominal", params.reuse_nominal_attributes,
                  "Keep nominal attributes available below a split on them");
}

StreamTemplate to_template(const CommonOptions& opt) {
    StreamTemplate tpl;
    tpl.attrs = opt.attrs;
    tpl.values = opt.values;
    tpl.classes = opt.classes;
    tpl.max_depth = opt.max_depth;
    tpl.leaf_prob = opt.leaf_prob;
    tpl.length = opt.length;
    tpl.drift_at = opt.drift_at;
    tpl.csv_path = opt.csv_path;
    tpl.shuffle = opt.shuffle_seed.has_value();
    return tpl;
}

StreamSpec make_stream(const CommonOptions& opt) {
    if (!opt.csv_path.empty()) {
        Dataset data = load_csv(opt.csv_path);
        StreamSpec spec =
            make_file_stream(std::move(data.schema), std::move(data.instances), opt.shuffle_seed);
        if (opt.length > 0 && opt.length < spec.length) spec.length = opt.length;
        return spec;
    }
    return instantiate_stream(to_template(opt), opt.seed);
}

fs::path result_path(const CommonOptions& opt, const std::string& learner, std::uint64_t seed) {
    return fs::path(opt.out_dir) / (opt.experiment + "_" + learner + "_" + std::to_string(seed) + ".csv");
}

int cmd_generate(const CommonOptions& opt, const std::string& out_path) {
    const StreamSpec spec = make_stream(opt);
    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(spec.length));
    for (std::uint64_t t = 0; t < spec.length; ++t) instances.push_back(instance_at(spec, t));
    write_csv(fs::path(out_path), spec.schema, instances);

    int nominal = 0, numeric = 0;
    for (const AttributeSpec& a : spec.schema.attributes) (a.is_nominal() ? nominal : numeric)++;
    std::cout << "schema: " << nominal << " nominal attributes";
    if (nominal > 0 && spec.schema.all_nominal())
        std::cout << " x " << spec.schema.attributes.front().value_count() << " values";
    if (numeric > 0) std::cout << " + " << numeric << " numeric attributes";
    std::cout << ", " << spec.schema.class_count << " classes\n";
    std::cout << "wrote " << spec.length << " instances to " << out_path << "\n";
    return kExitOk;
}

template <typename Learner>
RunSummary run_learner(const StreamSpec& spec, const CommonOptions& opt,
                       std::vector<SplitEvent>* events) {
    Learner learner(spec.schema, opt.params);
    RunSummary summary = prequential_run(learner, spec, opt.checkpoint, opt.window);
    if (events) {
        if constexpr (std::is_same_v<Learner, EfdtLearner>) *events = learner.split_events();
    }
    return summary;
}

int cmd_run(const CommonOptions& opt, const std::string& learner_name, bool export_events) {
    const StreamSpec spec = make_stream(opt);
    fs::create_directories(opt.out_dir);
    std::vector<SplitEvent> events;
    RunSummary summary;
    if (learner_name == "vfdt") {
        summary = run_learner<VfdtLearner>(spec, opt, nullptr);
    } else {
        summary = run_learner<EfdtLearner>(spec, opt, &events);
    }
    write_run_csv(result_path(opt, learner_name, opt.seed), summary);
    if (export_events && learner_name == "efdt") {
        std::ofstream out(fs::path(opt.out_dir) /
                          (opt.experiment + "_efdt_events_" + std::to_string(opt.seed) + ".csv"));
        write_events_csv(out, events);
    }
    if (opt.drift_at) std::cout << "drift_at=" << *opt.drift_at << "\n";
    std::printf("%s E=%.6f T=%.3fs nodes=%llu leaves=%llu\n", learner_name.c_str(),
                summary.total_error_rate, summary.total_cpu_seconds,
                static_cast<unsigned long long>(summary.final_nodes),
                static_cast<unsigned long long>(summary.final_leaves));
    return kExitOk;
}

int cmd_compare(const CommonOptions& opt, std::uint64_t seed_count, bool export_events) {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < seed_count; ++s) seeds.push_back(opt.seed + s);
    const StreamTemplate tpl = to_template(opt);
    const ComparisonResult result = compare_run(tpl, opt.params, seeds, opt.checkpoint, opt.window);

    fs::create_directories(opt.out_dir);
    for (const SeedRun& run : result.runs) {
        write_run_csv(result_path(opt, "vfdt", run.seed), run.vfdt, "vfdt");
        write_run_csv(result_path(opt, "efdt", run.seed), run.efdt, "efdt");
        if (export_events) {
            std::ofstream out(fs::path(opt.out_dir) /
                              (opt.experiment + "_efdt_events_" + std::to_string(run.seed) + ".csv"));
            write_events_csv(out, run.efdt_events);
        }
    }
    if (opt.drift_at) std::cout << "drift_at=" << *opt.drift_at << "\n";
    std::printf("vfdt E=%.6f T=%.3fs\n", result.mean_vfdt_total_error, result.mean_vfdt_cpu);
    std::printf("efdt E=%.6f T=%.3fs\n", result.mean_efdt_total_error, result.mean_efdt_cpu);
    return kExitOk;
}

int cmd_convergence(const CommonOptions& opt, std::uint64_t check_every) {
    CommonOptions conv = opt;
    conv.drift_at.reset();  // convergence is defined on stationary streams
    const StreamSpec spec = make_stream(conv);
    if (!spec.schema.all_nominal()) {
        std::cerr << "convergence: the batch-tree comparison needs a nominal-only schema\n";
        return kExitConfig;
    }

    EfdtLearner efdt(spec.schema, conv.params);
    std::vector<Instance> prefix;
    prefix.reserve(static_cast<std::size_t>(spec.length));

    std::vector<std::pair<std::uint64_t, bool>> equality;  // (timestep, trees equal)
    for (std::uint64_t t = 0; t < spec.length; ++t) {
        const Instance x = instance_at(spec, t);
        prefix.push_back(x);
        efdt.learn_one(x);
        const bool at_checkpoint = (t + 1) % check_every == 0 || t + 1 == spec.length;
        if (!at_checkpoint) continue;
        const auto batch = batch_fit(prefix, spec.schema);
        equality.emplace_back(t + 1, trees_structurally_equal(efdt.root(), *batch));
    }

    // first checkpoint from which equality holds through the end of the stream
    std::optional<std::uint64_t> converged_at;
    for (auto it = equality.rbegin(); it != equality.rend() && it->second; ++it)
        converged_at = it->first;
    const bool stable = converged_at.has_value();
    std::cout << "checkpoints=" << equality.size() << "\n";
    if (stable)
        std::cout << "converged_at=" << *converged_at << " stable_to_end=yes\n";
    else
        std::cout << "converged_at=none stable_to_end=no\n";
    return stable ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental decision trees over data streams: Hoeffding tree (VFDT) and EFDT "
                 "learners with seeded synthetic streams and prequential evaluation"};
    app.require_subcommand(1);

    CommonOptions gen_opt;
    std::string gen_out = "stream.csv";
    CLI::App* generate = app.add_subcommand("generate", "Write a seeded synthetic stream to CSV");
    add_stream_flags(generate, gen_opt, /*allow_csv=*/false);
    generate->add_option("--out", gen_out, "Output CSV path")->capture_default_str();

    CommonOptions run_opt;
    std::string run_learner_name = "efdt";
    bool run_events = false;
    CLI::App* run = app.add_subcommand("run", "Prequential run of one learner over a stream");
    add_stream_flags(run, run_opt, /*allow_csv=*/true);
    add_learner_flags(run, run_opt.params);
    run->add_option("--learner", run_learner_name, "Learner to run")
        ->capture_default_str()
        ->check(CLI::IsMember({"vfdt", "efdt"}));
    run->add_option("--checkpoint", run_opt.checkpoint, "Instances between output records")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    run->add_option("--window", run_opt.window, "Window size for the windowed error rate")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
    run->add_option("--out-dir", run_opt.out_dir, "Directory for result CSVs")->capture_default_str();
    run->add_option("--experiment", run_opt.experiment, "Experiment name used in file names")
        ->capture_default_str();
    run->add_flag("--events", run_events, "Also export the EFDT split-event log");

    CommonOptions cmp_opt;
    std::uint64_t cmp_seeds = 10;
    bool cmp_events = false;
    CLI::App* compare =
        app.add_subcommand("compare", "Paired VFDT/EFDT runs over seeded streams, plus mean summary");
    add_stream_flags(compare, cmp_opt, /*allow_csv=*/true);
    add_learner_flags(compare, cmp_opt.params);
    compare->add_option("--seeds", cmp_seeds, "Number of seeds (streams); runs use seed, seed+1, ...")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{10000}));
    compare->add_option("--checkpoint", cmp_opt.checkpoint, "Instances between output records")
        ->capture_default_str();
    compare->add_option("--window", cmp_opt.window, "Window size for the windowed error rate")
        ->capture_default_str();
    compare->add_option("--out-dir", cmp_opt.out_dir, "Directory for result CSVs")->capture_default_str();
    compare->add_option("--experiment", cmp_opt.experiment, "Experiment name used in file names")
        ->capture_default_str();
    compare->add_flag("--events", cmp_events, "Also export the EFDT split-event logs");

    CommonOptions conv_opt;
    conv_opt.attrs = 3;
    conv_opt.values = 2;
    conv_opt.classes = 2;
    conv_opt.max_depth = 3;
    std::uint64_t conv_check_every = 5000;
    CLI::App* convergence = app.add_subcommand(
        "convergence", "Check that EFDT reaches and keeps the batch tree on a stationary stream");
    add_stream_flags(convergence, conv_opt, /*allow_csv=*/true);
    add_learner_flags(convergence, conv_opt.params);
    convergence->add_option("--check-every", conv_check_every, "Instances between batch-tree fits")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen_opt, gen_out);
        if (run->parsed()) return cmd_run(run_opt, run_learner_name, run_events);
        if (compare->parsed()) return cmd_compare(cmp_opt, cmp_seeds, cmp_events);
        if (convergence->parsed()) return cmd_convergence(conv_opt, conv_check_every);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
