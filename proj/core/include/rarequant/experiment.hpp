#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rarequant/metrics.hpp"
#include "rarequant/run_config.hpp"

namespace rarequant {

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<MethodReport> rows;
    std::vector<double> member_weights;
};

// Generate a corpus with synth.seed = seed, build the single model and the
// ensemble with master seed = seed, then estimate and score all four kinds.
SeedRun run_seed(const RunConfig& cfg, std::uint64_t seed);

struct ExperimentSummary {
    std::map<EstimatorKind, double> median_bias;
    std::map<EstimatorKind, double> median_abs_bias;
    // |bias| of label_count > calibrated_sum > ensemble_calibrated, on medians.
    bool ladder_holds_on_medians = false;
    // Seeds where that strict ordering holds individually.
    std::size_t seeds_with_ladder = 0;
    // Seeds where raw_prob_sum bias >= label_count bias.
    std::size_t seeds_raw_over_label = 0;
    std::size_t seeds = 0;
};

bool ladder_holds(std::span<const MethodReport> rows);
ExperimentSummary summarize(std::span<const SeedRun> runs);

nlohmann::json experiment_report(const RunConfig& cfg, std::span<const SeedRun> runs,
                                 const ExperimentSummary& summary);

// kind,bias with the median bias per kind.
std::string median_bias_csv(const ExperimentSummary& summary);
// seed,kind,bias for every run and row.
std::string per_seed_bias_csv(std::span<const SeedRun> runs);

}  // namespace rarequant
