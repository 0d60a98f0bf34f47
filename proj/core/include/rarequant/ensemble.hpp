#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rarequant/calibration.hpp"
#include "rarequant/corpus.hpp"
#include "rarequant/features.hpp"
#include "rarequant/logreg.hpp"
#include "rarequant/random.hpp"

namespace rarequant {

// Everything a member build needs besides data and seed. split.seed is
// ignored; the member seed drives the split.
struct PipelineConfig {
    VectorizerConfig vectorizer;
    TrainConfig train;
    SplitSpec split;

    void validate() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline constexpr int kMaxResampleAttempts = 100;
inline constexpr int kDefaultEnsembleSize = 10;

struct Member {
    LinearModel model;
    ScoreDensityPair densities;
    double weight = 0.0;     // validation accuracy, in [0, 1]
    std::uint64_t seed = 0;  // seed requested for this member
    int retries = 0;         // resample retries consumed; the effective seed is seed + retries

    friend bool operator==(const Member&, const Member&) = default;
};

struct EnsembleBundle {
    // Unresampled model used by the single-model estimators. When absent,
    // those estimators fall back to members.front().
    std::optional<Member> single_model;
    std::vector<Member> members;
    PipelineConfig config;
    std::uint64_t master_seed = 0;

    const Member& single() const;

    friend bool operator==(const EnsembleBundle&, const EnsembleBundle&) = default;
};

enum class EstimatorKind { label_count, raw_prob_sum, calibrated_sum, ensemble_calibrated };

inline constexpr std::array<EstimatorKind, 4> kAllEstimators = {
    EstimatorKind::label_count, EstimatorKind::raw_prob_sum, EstimatorKind::calibrated_sum,
    EstimatorKind::ensemble_calibrated};

std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator_kind(std::string_view text) noexcept;

// Vectorized training corpus shared by every member of one build.
struct PreparedCorpus {
    std::vector<SparseVector> features;
    std::vector<int> labels;
    std::vector<std::size_t> group_keys;  // equal for documents sharing an id

    static PreparedCorpus from(const LabeledDataset& data, const VectorizerConfig& cfg);
};

// Bootstrap resample, stratified split into train/test/validation, train on
// train, weight by validation accuracy, fit score densities on test. Resamples
// that leave any part with fewer than two documents of a class are redrawn
// with seed + 1, up to 100 attempts.
Member build_member(const LabeledDataset& data, const PipelineConfig& cfg, std::uint64_t seed);
Member build_member(const PreparedCorpus& corpus, const PipelineConfig& cfg, std::uint64_t seed,
                    bool resample = true);

// Same pipeline on the full data without the bootstrap step.
Member build_single_model(const LabeledDataset& data, const PipelineConfig& cfg, std::uint64_t seed);

constexpr std::uint64_t member_seed(std::uint64_t master_seed, std::size_t index) noexcept {
    return master_seed ^ mix64(static_cast<std::uint64_t>(index));
}

struct EnsembleOptions {
    int members = kDefaultEnsembleSize;
    // Worker threads for member builds; 0 uses the hardware concurrency.
    // The result does not depend on this value.
    int threads = 0;
    bool with_single_model = false;
};

EnsembleBundle build_ensemble(const LabeledDataset& data, const PipelineConfig& cfg,
                              std::uint64_t master_seed, const EnsembleOptions& options = {});

// Weighted average sum_m w_m q_m / sum_m w_m. Throws ZeroWeightError when all
// weights are zero.
double ensemble_probability(std::span<const double> weights, std::span<const double> values);
double ensemble_probability(const EnsembleBundle& bundle, std::span<const double> values);

struct PositiveEstimate {
    double est_pos = 0.0;
    std::vector<double> per_doc;
    // One entry per calibrated member (empty for the uncalibrated kinds).
    std::vector<PrevalenceEstimate> prevalence;
};

// label_count, raw_prob_sum and calibrated_sum use members.front() alone;
// ensemble_calibrated calibrates every member on its own scores and averages
// the calibrated probabilities with the voting weights.
PositiveEstimate estimate_positives(std::span<const Member> members,
                                    std::span<const SparseVector> target, EstimatorKind kind,
                                    CalibrationMethod method);

// Routes the single-model kinds to bundle.single() and ensemble_calibrated to
// bundle.members.
PositiveEstimate estimate_positives(const EnsembleBundle& bundle, std::span<const SparseVector> target,
                                    EstimatorKind kind, CalibrationMethod method);

inline constexpr double kDecisionThreshold = 0.5;

// Fraction of items whose score exceeds 0.5 exactly when the label is 1.
double threshold_accuracy(std::span<const double> scores, std::span<const int> labels);

}  // namespace rarequant
