#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rarequant/features.hpp"

namespace rarequant {

struct LinearModel {
    std::size_t dim = 0;
    std::vector<double> weights;
    double intercept = 0.0;

    static LinearModel zeros(std::size_t dim) { return {dim, std::vector<double>(dim, 0.0), 0.0}; }

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct TrainConfig {
    double l2_lambda = 1e-4;
    int max_iters = 500;
    double grad_tol = 1e-6;
    // Backtracking line search: start every iteration at initial_step and
    // multiply by backtrack until the Armijo condition with armijo_c holds.
    double initial_step = 1.0;
    double backtrack = 0.5;
    double armijo_c = 1e-4;

    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline constexpr double kScoreFloor = 1e-6;

struct LossAndGradient {
    double loss;
    std::vector<double> gradient;  // dim weight partials, then the intercept partial
};

// Mean negative log-likelihood plus (l2_lambda / 2) * |w|^2; the intercept
// is not penalized.
LossAndGradient loss_and_gradient(const LinearModel& model, std::span<const SparseVector> x,
                                  std::span<const int> y, const TrainConfig& cfg);

// Full-batch gradient descent from the zero model. Stops when the largest
// gradient component is at most grad_tol or after max_iters steps.
LinearModel train(std::span<const SparseVector> x, std::span<const int> y, const TrainConfig& cfg);
LinearModel train(std::span<const SparseVector> x, std::span<const int> y, const TrainConfig& cfg,
                  const LinearModel& init);

double margin(const LinearModel& model, const SparseVector& x);

// sigmoid(margin), clamped to [1e-6, 1 - 1e-6].
double score(const LinearModel& model, const SparseVector& x);
double clamp_score(double s) noexcept;

std::vector<double> score_all(const LinearModel& model, std::span<const SparseVector> x);

}  // namespace rarequant
