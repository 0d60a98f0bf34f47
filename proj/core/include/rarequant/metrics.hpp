#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rarequant/ensemble.hpp"

namespace rarequant {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }

    // Predictions are positive when the value exceeds 0.5.
    static ConfusionMatrix from_predictions(std::span<const double> per_doc, std::span<const int> truth);

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

double accuracy(const ConfusionMatrix& cm);
double balanced_accuracy(const ConfusionMatrix& cm);

// Signed relative error of a positive count: (est_pos - true_pos) / n_target.
double bias(double est_pos, std::int64_t true_pos, std::int64_t n_target);

// One row of an estimator report. Fields that need ground truth are empty
// when none was supplied; balanced_accuracy is also empty when a class is
// absent from the target.
struct MethodReport {
    EstimatorKind kind = EstimatorKind::label_count;
    std::size_t n_target = 0;
    double est_pos = 0.0;
    // Prevalence behind the estimate: mean calibrated prevalence for the
    // calibrated kinds, est_pos / n_target otherwise.
    double prevalence = 0.0;
    std::optional<std::size_t> tp;  // true number of positives in the target
    std::optional<double> bias;
    std::optional<double> accuracy;
    std::optional<double> balanced_accuracy;
};

struct KindEstimate {
    EstimatorKind kind;
    PositiveEstimate estimate;
};

// Rows come out in the canonical estimator order regardless of input order.
std::vector<MethodReport> build_report(std::span<const KindEstimate> estimates,
                                       std::optional<std::span<const int>> truth);

// kind,bias lines for plotting; rows without a bias are skipped.
std::string bias_series_csv(std::span<const MethodReport> rows);

}  // namespace rarequant
