#include "rarequant/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rarequant/error.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {

void TrainConfig::validate() const {
    if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda))
        throw ConfigError("train.l2_lambda", "must be a finite non-negative number");
    if (max_iters < 1) throw ConfigError("train.max_iters", "must be at least 1");
    if (!(grad_tol > 0.0)) throw ConfigError("train.grad_tol", "must be positive");
    if (!(initial_step > 0.0)) throw ConfigError("train.initial_step", "must be positive");
    if (!(backtrack > 0.0 && backtrack < 1.0))
        throw ConfigError("train.backtrack", "must lie strictly inside (0, 1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
        throw ConfigError("train.armijo_c", "must lie strictly inside (0, 1)");
}

namespace {

double sparse_dot(std::span<const double> w, const SparseVector& x) noexcept {
    double s = 0.0;
    for (const auto& e : x.entries) s += w[e.index] * e.value;
    return s;
}

void check_inputs(std::size_t dim, std::span<const SparseVector> x, std::span<const int> y, bool both_classes) {
    if (x.size() != y.size()) throw std::invalid_argument("feature and label counts differ");
    if (x.empty()) throw EmptyDatasetError();
    bool has[2] = {false, false};
    for (const int label : y) {
        if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
        has[label] = true;
    }
    if (both_classes && (!has[0] || !has[1])) throw SingleClassError();
    for (const auto& v : x)
        if (v.dim != dim) throw DimError(dim, v.dim);
}

double sample_loss(double z, int y) noexcept { return log1p_exp(z) - (y == 1 ? z : 0.0); }

double squared_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (const double a : v) s += a * a;
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Mean data loss for margins z - t * d.
double data_loss(std::span<const double> z, std::span<const double> d, double t,
                 std::span<const int> y, std::vector<double>& buffer) {
    buffer.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) buffer[i] = sample_loss(z[i] - t * d[i], y[i]);
    return pairwise_sum(buffer) / static_cast<double>(z.size());
}

}  // namespace

LossAndGradient loss_and_gradient(const LinearModel& model, std::span<const SparseVector> x,
                                  std::span<const int> y, const TrainConfig& cfg) {
    check_inputs(model.dim, x, y, false);
    const auto n = static_cast<double>(x.size());

    std::vector<double> losses(x.size());
    std::vector<double> gradient(model.dim + 1, 0.0);
    std::vector<double> residuals(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = sparse_dot(model.weights, x[i]) + model.intercept;
        losses[i] = sample_loss(z, y[i]);
        residuals[i] = sigmoid(z) - y[i];
        for (const auto& e : x[i].entries) gradient[e.index] += residuals[i] * e.value;
    }
    for (std::size_t j = 0; j < model.dim; ++j)
        gradient[j] = gradient[j] / n + cfg.l2_lambda * model.weights[j];
    gradient[model.dim] = pairwise_sum(residuals) / n;

    const double loss = pairwise_sum(losses) / n + 0.5 * cfg.l2_lambda * squared_norm(model.weights);
    return {loss, std::move(gradient)};
}

LinearModel train(std::span<const SparseVector> x, std::span<const int> y, const TrainConfig& cfg) {
    const std::size_t dim = x.empty() ? 0 : x.front().dim;
    return train(x, y, cfg, LinearModel::zeros(dim));
}

LinearModel train(std::span<const SparseVector> x, std::span<const int> y, const TrainConfig& cfg,
                  const LinearModel& init) {
    cfg.validate();
    if (init.weights.size() != init.dim) throw std::invalid_argument("initial model is malformed");
    check_inputs(init.dim, x, y, true);

    LinearModel model = init;
    const std::size_t n = x.size();
    std::vector<double> z(n), d(n), buffer;
    std::span<const double> w(model.weights);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const auto [loss, gradient] = loss_and_gradient(model, x, y, cfg);
        if (!std::isfinite(loss)) throw DivergenceError(iter);

        double gmax = 0.0;
        for (const double g : gradient) gmax = std::max(gmax, std::abs(g));
        if (gmax <= cfg.grad_tol) break;

        std::span<const double> gw(gradient.data(), model.dim);
        const double gb = gradient[model.dim];
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = sparse_dot(w, x[i]) + model.intercept;
            d[i] = sparse_dot(gw, x[i]) + gb;
        }
        const double ww = squared_norm(w);
        const double wg = dot(w, gw);
        const double gg_w = squared_norm(gw);
        const double gg = gg_w + gb * gb;

        double step = cfg.initial_step;
        bool accepted = false;
        while (step > 1e-20) {
            const double reg = 0.5 * cfg.l2_lambda * (ww - 2.0 * step * wg + step * step * gg_w);
            const double trial = data_loss(z, d, step, y, buffer) + reg;
            if (!std::isfinite(trial)) throw DivergenceError(iter);
            if (trial <= loss - cfg.armijo_c * step * gg) {
                accepted = true;
                break;
            }
            step *= cfg.backtrack;
        }
        if (!accepted) break;

        for (std::size_t j = 0; j < model.dim; ++j) model.weights[j] -= step * gw[j];
        model.intercept -= step * gb;
    }
    return model;
}

double margin(const LinearModel& model, const SparseVector& x) {
    if (x.dim != model.dim) throw DimError(model.dim, x.dim);
    return sparse_dot(model.weights, x) + model.intercept;
}

double clamp_score(double s) noexcept { return std::clamp(s, kScoreFloor, 1.0 - kScoreFloor); }

double score(const LinearModel& model, const SparseVector& x) {
    return clamp_score(sigmoid(margin(model, x)));
}

std::vector<double> score_all(const LinearModel& model, std::span<const SparseVector> x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& v : x) out.push_back(score(model, v));
    return out;
}

}  // namespace rarequant
