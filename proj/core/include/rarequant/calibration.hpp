#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rarequant {

struct BetaParams {
    double alpha = 1.0;
    double beta = 1.0;

    // Density floored at 1e-300; s is clamped to [1e-6, 1 - 1e-6] first.
    double pdf(double s) const noexcept;

    friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

// Class-conditional score densities measured on held-out labeled data:
// f1 for positives, f0 for negatives.
struct ScoreDensityPair {
    BetaParams f1;
    BetaParams f0;
    std::size_t n1 = 0;
    std::size_t n0 = 0;

    // True when the two densities coincide within 1e-9 and the mixture
    // likelihood is flat in the prevalence.
    bool flat() const noexcept;

    friend bool operator==(const ScoreDensityPair&, const ScoreDensityPair&) = default;
};

enum class CalibrationMethod { em_ml, bayes_posterior_mean };

std::string_view to_string(CalibrationMethod method) noexcept;
// Accepts "em"/"em_ml" and "bayes"/"bayes_posterior_mean".
std::optional<CalibrationMethod> parse_calibration_method(std::string_view text) noexcept;

struct PrevalenceEstimate {
    double pi = 0.5;
    CalibrationMethod method = CalibrationMethod::em_ml;
    int iterations = 0;
    std::optional<double> posterior_sd;  // bayes only
    bool identifiable = true;

    friend bool operator==(const PrevalenceEstimate&, const PrevalenceEstimate&) = default;
};

// Method-of-moments Beta fit. Throws DegenerateScoresError when the sample
// variance (after clamping) is below 1e-6.
BetaParams fit_beta_moments(std::span<const double> scores);

// Fits f1 on the positive-class scores and f0 on the negative-class scores.
// Each class needs at least two scores.
ScoreDensityPair fit_densities(std::span<const double> scores, std::span<const int> labels);

double mixture_log_likelihood(double pi, const ScoreDensityPair& densities,
                              std::span<const double> target_scores);

struct EmOptions {
    double tol = 1e-8;
    int max_iter = 10000;
    // Called with each new iterate.
    std::function<void(double)> on_iteration;
};

// Fixed-point EM for the mixture weight, starting from 0.5.
PrevalenceEstimate estimate_prevalence_em(const ScoreDensityPair& densities,
                                          std::span<const double> target_scores,
                                          const EmOptions& options = {});

// Posterior mean and sd of the mixture weight under a uniform prior, by
// Simpson's rule on a uniform grid of grid_points (odd, >= 3) nodes.
PrevalenceEstimate estimate_prevalence_bayes(const ScoreDensityPair& densities,
                                             std::span<const double> target_scores,
                                             int grid_points = 2001);

struct CalibratedScore {
    double probability;
    // Both densities vanished at s; probability fell back to pi.
    bool fallback = false;
};

CalibratedScore calibrate_score(double s, double pi, const ScoreDensityPair& densities);

struct Calibration {
    PrevalenceEstimate prevalence;
    std::vector<double> probabilities;
};

Calibration calibrate_all(std::span<const double> scores, const ScoreDensityPair& densities,
                          CalibrationMethod method);

}  // namespace rarequant
