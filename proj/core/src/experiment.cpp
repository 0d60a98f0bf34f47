#include "rarequant/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rarequant/report_io.hpp"
#include "rarequant/synth.hpp"

namespace rarequant {

namespace {

double median(std::vector<double> v) {
    std::ranges::sort(v);
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const MethodReport* find_row(std::span<const MethodReport> rows, EstimatorKind kind) {
    const auto it = std::ranges::find(rows, kind, &MethodReport::kind);
    return it == rows.end() ? nullptr : &*it;
}

}  // namespace

SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed) {
    SynthConfig synth_cfg = cfg.synth;
    synth_cfg.seed = seed;
    const SynthCorpus corpus = generate(synth_cfg);

    EnsembleOptions options;
    options.members = cfg.models;
    options.threads = cfg.threads;
    options.with_single_model = true;
    const EnsembleBundle bundle = build_ensemble(corpus.train, cfg.pipeline, seed, options);

    const auto target = vectorize_all(corpus.target, cfg.pipeline.vectorizer);
    std::vector<KindEstimate> estimates;
    for (const auto kind : kAllEstimators)
        estimates.push_back({kind, estimate_positives(bundle, target, kind, cfg.method)});

    SeedRun run;
    run.seed = seed;
    run.rows = build_report(estimates, std::span<const int>(corpus.target_truth));
    for (const auto& m : bundle.members) run.member_weights.push_back(m.weight);
    return run;
}

bool ladder_holds(std::span<const MethodReport> rows) {
    const auto* label = find_row(rows, EstimatorKind::label_count);
    const auto* cal = find_row(rows, EstimatorKind::calibrated_sum);
    const auto* ens = find_row(rows, EstimatorKind::ensemble_calibrated);
    if (!label || !cal || !ens || !label->bias || !cal->bias || !ens->bias) return false;
    return std::abs(*label->bias) > std::abs(*cal->bias) && std::abs(*cal->bias) > std::abs(*ens->bias);
}

ExperimentSummary summarize(std::span<const SeedRun> runs) {
    ExperimentSummary s;
    s.seeds = runs.size();
    for (const auto kind : kAllEstimators) {
        std::vector<double> b, ab;
        for (const auto& run : runs)
            if (const auto* row = find_row(run.rows, kind); row && row->bias) {
                b.push_back(*row->bias);
                ab.push_back(std::abs(*row->bias));
            }
        if (b.empty()) continue;
        s.median_bias[kind] = median(b);
        s.median_abs_bias[kind] = median(ab);
    }
    for (const auto& run : runs) {
        if (ladder_holds(run.rows)) ++s.seeds_with_ladder;
        const auto* label = find_row(run.rows, EstimatorKind::label_count);
        const auto* raw = find_row(run.rows, EstimatorKind::raw_prob_sum);
        if (label && raw && label->bias && raw->bias && *raw->bias >= *label->bias) ++s.seeds_raw_over_label;
    }
    const auto& m = s.median_abs_bias;
    if (m.contains(EstimatorKind::label_count) && m.contains(EstimatorKind::calibrated_sum) &&
        m.contains(EstimatorKind::ensemble_calibrated))
        s.ladder_holds_on_medians = m.at(EstimatorKind::label_count) > m.at(EstimatorKind::calibrated_sum) &&
                                    m.at(EstimatorKind::calibrated_sum) > m.at(EstimatorKind::ensemble_calibrated);
    return s;
}

nlohmann::json experiment_report(const RunConfig& cfg, std::span<const SeedRun> runs,
                                 const ExperimentSummary& summary) {
    using nlohmann::json;
    json per_seed = json::array();
    for (const auto& run : runs)
        per_seed.push_back({{"seed", run.seed}, {"member_weights", run.member_weights}, {"rows", rows_to_json(run.rows)}});

    json median_bias = json::object(), median_abs_bias = json::object();
    for (const auto& [kind, v] : summary.median_bias) median_bias[std::string(to_string(kind))] = v;
    for (const auto& [kind, v] : summary.median_abs_bias) median_abs_bias[std::string(to_string(kind))] = v;

    return {
        {"format", "rarequant-experiment"},
        {"version", kReportFormatVersion},
        {"method", std::string(to_string(cfg.method))},
        {"members", cfg.models},
        {"config_digest", config_digest(cfg)},
        {"config", to_json(cfg)},
        {"runs", std::move(per_seed)},
        {"aggregate",
         {{"seeds", summary.seeds},
          {"median_bias", std::move(median_bias)},
          {"median_abs_bias", std::move(median_abs_bias)},
          {"ladder_holds_on_medians", summary.ladder_holds_on_medians},
          {"seeds_with_ladder", summary.seeds_with_ladder},
          {"seeds_raw_over_label", summary.seeds_raw_over_label}}},
    };
}

std::string median_bias_csv(const ExperimentSummary& summary) {
    std::ostringstream out;
    out.precision(17);
    out << "kind,bias\n";
    for (const auto kind : kAllEstimators)
        if (const auto it = summary.median_bias.find(kind); it != summary.median_bias.end())
            out << to_string(kind) << ',' << it->second << '\n';
    return out.str();
}

std::string per_seed_bias_csv(std::span<const SeedRun> runs) {
    std::ostringstream out;
    out.precision(17);
    out << "seed,kind,bias\n";
    for (const auto& run : runs)
        for (const auto& row : run.rows)
            if (row.bias) out << run.seed << ',' << to_string(row.kind) << ',' << *row.bias << '\n';
    return out.str();
}

}  // namespace rarequant
