#include "cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "rarequant/atomic_file.hpp"
#include "rarequant/bundle_io.hpp"
#include "rarequant/error.hpp"
#include "rarequant/experiment.hpp"
#include "rarequant/numeric.hpp"
#include "rarequant/report_io.hpp"
#include "rarequant/run_config.hpp"
#include "rarequant/synth.hpp"

namespace rarequant::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string corpus;
    std::string bundle;
    std::string target;
    std::string truth;
    std::string kind = "all";
    bool all = false;
    std::string method;
    std::optional<int> models;
    std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const Options& o) {
    RunConfig cfg;
    if (!o.config.empty()) {
        if (!fs::exists(o.config)) throw ConfigError("--config", "config file '" + o.config + "' does not exist");
        cfg = load_run_config(o.config);
    }
    if (o.models) cfg.models = *o.models;
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.synth.seed = *o.seed;
        cfg.experiment_seeds.clear();
    }
    if (!o.method.empty()) {
        const auto m = parse_calibration_method(o.method);
        if (!m) throw ConfigError("--method", "must be 'em' or 'bayes'");
        cfg.method = *m;
    }
    cfg.validate();
    return cfg;
}

int cmd_synth(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o);
    const SynthCorpus corpus = generate(cfg.synth);
    write_corpus(corpus, o.out);
    const auto paths = CorpusPaths::in(o.out);
    const auto positives = std::count(corpus.target_truth.begin(), corpus.target_truth.end(), 1);
    out << "train: " << paths.train.string() << " (" << corpus.train.size() << " documents, "
        << corpus.train.positive_count() << " positive)\n";
    out << "target: " << paths.target.string() << " (" << corpus.target.size() << " documents)\n";
    out << "truth: " << paths.truth.string() << " (" << positives << " positive)\n";
    return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o);
    const auto docs = load_documents(o.corpus);
    for (const auto& d : docs)
        if (!d.label) throw DataError("training corpus document '" + d.id + "' has no label");
    const LabeledDataset data(docs);

    EnsembleOptions options;
    options.members = cfg.models;
    options.threads = cfg.threads;
    options.with_single_model = true;
    const EnsembleBundle bundle = build_ensemble(data, cfg.pipeline, cfg.seed, options);
    save_bundle(o.out, bundle);

    out << "single model: validation weight " << bundle.single().weight << '\n';
    for (std::size_t i = 0; i < bundle.members.size(); ++i)
        out << "member " << i << ": seed " << bundle.members[i].seed << ", validation weight "
            << bundle.members[i].weight << '\n';
    out << "bundle: " << o.out << '\n';
    return kOk;
}

std::string bundle_digest(const EnsembleBundle& bundle) {
    auto doc = bundle_to_json(bundle);
    doc.erase("members");
    doc.erase("single_model");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
    return buf;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    const auto method = parse_calibration_method(o.method.empty() ? "bayes" : o.method);
    if (!method) throw ConfigError("--method", "must be 'em' or 'bayes'");
    std::vector<EstimatorKind> kinds;
    if (o.all || o.kind == "all") {
        kinds.assign(kAllEstimators.begin(), kAllEstimators.end());
    } else if (const auto k = parse_estimator_kind(o.kind)) {
        kinds.push_back(*k);
    } else {
        throw ConfigError("--kind", "unknown estimator '" + o.kind + "'");
    }

    const EnsembleBundle bundle = load_bundle(o.bundle);
    const auto target_docs = load_documents(o.target);
    if (target_docs.empty()) throw EmptyDatasetError();
    const auto target = vectorize_all(target_docs, bundle.config.vectorizer);

    const fs::path truth_path = o.truth.empty() ? default_truth_path(o.target) : fs::path(o.truth);
    std::optional<std::vector<int>> truth;
    if (!o.truth.empty() || fs::exists(truth_path)) truth = load_truth(truth_path, target_docs);

    std::vector<KindEstimate> estimates;
    for (const auto kind : kinds) estimates.push_back({kind, estimate_positives(bundle, target, kind, *method)});
    const auto rows = truth ? build_report(estimates, std::span<const int>(*truth)) : build_report(estimates, std::nullopt);

    ReportHeader header;
    header.method = *method;
    header.master_seed = bundle.master_seed;
    header.config_digest = bundle_digest(bundle);
    header.members = bundle.members.size();
    write_file_atomic(o.out, estimate_report(header, rows).dump(2) + "\n");

    for (const auto& row : rows) {
        out << to_string(row.kind) << ": est_pos " << row.est_pos;
        if (row.bias) out << ", bias " << *row.bias;
        out << '\n';
    }
    out << "report: " << o.out << '\n';
    return kOk;
}

int cmd_experiment(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o);
    std::vector<SeedRun> runs;
    for (const auto seed : cfg.seeds()) {
        runs.push_back(run_seed(cfg, seed));
        out << "seed " << seed << ':';
        for (const auto& row : runs.back().rows) out << ' ' << to_string(row.kind) << '=' << row.bias.value_or(0.0);
        out << '\n';
    }
    const auto summary = summarize(runs);

    fs::create_directories(o.out);
    const fs::path dir(o.out);
    write_file_atomic(dir / "report.json", experiment_report(cfg, runs, summary).dump(2) + "\n");
    write_file_atomic(dir / "bias_series.csv", median_bias_csv(summary));
    write_file_atomic(dir / "bias_per_seed.csv", per_seed_bias_csv(runs));

    out << "ladder on medians: " << (summary.ladder_holds_on_medians ? "yes" : "no") << ", seeds with ladder "
        << summary.seeds_with_ladder << '/' << summary.seeds << '\n';
    out << "report: " << (dir / "report.json").string() << '\n';
    return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rare-positive count estimation with calibrated classifier ensembles", "rarequant"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Run configuration (JSON)");
        sub->add_option("--seed", o.seed, "Override the master seed");
    };

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    add_common(synth);
    synth->add_option("--out", o.out, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Train the single model and the ensemble into a bundle");
    add_common(train);
    train->add_option("--corpus", o.corpus, "Labeled training corpus (JSONL)")->required();
    train->add_option("--out", o.out, "Bundle output path")->required();
    train->add_option("--models", o.models, "Ensemble size")->check(CLI::PositiveNumber);

    auto* estimate = app.add_subcommand("estimate", "Estimate positives in a target corpus");
    estimate->add_option("--bundle", o.bundle, "Bundle produced by train")->required();
    estimate->add_option("--target", o.target, "Target corpus (JSONL)")->required();
    estimate->add_option("--truth", o.truth, "Ground-truth sidecar (default: <target>.truth.jsonl if present)");
    estimate->add_option("--kind", o.kind, "label_count|raw_prob_sum|calibrated_sum|ensemble_calibrated|all");
    estimate->add_flag("--all", o.all, "Same as --kind all");
    estimate->add_option("--method", o.method, "em|bayes");
    estimate->add_option("--out", o.out, "Report output path")->required();

    auto* experiment = app.add_subcommand("experiment", "Run synth, train and estimate across seeds");
    add_common(experiment);
    experiment->add_option("--out", o.out, "Output directory")->required();
    experiment->add_option("--models", o.models, "Ensemble size")->check(CLI::PositiveNumber);
    experiment->add_option("--method", o.method, "em|bayes");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(o, out);
        if (train->parsed()) return cmd_train(o, out);
        if (estimate->parsed()) return cmd_estimate(o, out);
        if (experiment->parsed()) return cmd_experiment(o, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const EnsembleBuildError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const DimError& e) {
        err << "incompatible model: " << e.what() << '\n';
        return kIncompatible;
    } catch (const FormatError& e) {
        err << "incompatible bundle: " << e.what() << '\n';
        return kIncompatible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace rarequant::cli
