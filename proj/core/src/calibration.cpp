#include "rarequant/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rarequant/error.hpp"
#include "rarequant/logreg.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {

namespace {

constexpr double kDensityFloor = 1e-300;
constexpr double kVarianceFloor = 1e-6;
constexpr double kParamFloor = 0.01;
constexpr double kFlatTolerance = 1e-9;
// Grid nodes whose log-posterior falls this far below the peak carry
// relative weight below e^-60 and are treated as zero.
constexpr double kLogPosteriorCut = 60.0;

double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
    int sign;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double log_beta_fn(double a, double b) noexcept { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// Beta density with its normalizer computed once.
class BetaDensity {
public:
    explicit BetaDensity(const BetaParams& p) noexcept
        : a_(p.alpha), b_(p.beta), log_norm_(log_beta_fn(p.alpha, p.beta)) {}

    double operator()(double s) const noexcept {
        s = clamp_score(s);
        const double log_pdf = (a_ - 1.0) * std::log(s) + (b_ - 1.0) * std::log1p(-s) - log_norm_;
        return std::max(std::exp(log_pdf), kDensityFloor);
    }

private:
    double a_, b_, log_norm_;
};

struct DensityTable {
    std::vector<double> f1, f0;
};

DensityTable evaluate(const ScoreDensityPair& densities, std::span<const double> scores) {
    const BetaDensity f1(densities.f1), f0(densities.f0);
    DensityTable t;
    t.f1.reserve(scores.size());
    t.f0.reserve(scores.size());
    for (const double s : scores) {
        t.f1.push_back(f1(s));
        t.f0.push_back(f0(s));
    }
    return t;
}

double log_likelihood(double pi, const DensityTable& t, std::vector<double>& buffer) {
    buffer.resize(t.f1.size());
    for (std::size_t j = 0; j < t.f1.size(); ++j) buffer[j] = std::log(pi * t.f1[j] + (1.0 - pi) * t.f0[j]);
    return pairwise_sum(buffer);
}

void require_targets(std::span<const double> target_scores) {
    if (target_scores.empty()) throw std::invalid_argument("target scores are empty");
}

}  // namespace

double BetaParams::pdf(double s) const noexcept { return BetaDensity(*this)(s); }

bool ScoreDensityPair::flat() const noexcept {
    return std::abs(f1.alpha - f0.alpha) <= kFlatTolerance && std::abs(f1.beta - f0.beta) <= kFlatTolerance;
}

std::string_view to_string(CalibrationMethod method) noexcept {
    return method == CalibrationMethod::em_ml ? "em_ml" : "bayes_posterior_mean";
}

std::optional<CalibrationMethod> parse_calibration_method(std::string_view text) noexcept {
    if (text == "em" || text == "em_ml") return CalibrationMethod::em_ml;
    if (text == "bayes" || text == "bayes_posterior_mean") return CalibrationMethod::bayes_posterior_mean;
    return std::nullopt;
}

BetaParams fit_beta_moments(std::span<const double> scores) {
    if (scores.size() < 2) throw std::invalid_argument("fit_beta_moments needs at least two scores");
    std::vector<double> clamped(scores.begin(), scores.end());
    for (auto& s : clamped) s = clamp_score(s);

    const auto n = static_cast<double>(clamped.size());
    const double mean = pairwise_sum(clamped) / n;
    std::vector<double> sq(clamped.size());
    for (std::size_t i = 0; i < clamped.size(); ++i) sq[i] = (clamped[i] - mean) * (clamped[i] - mean);
    const double var = pairwise_sum(sq) / (n - 1.0);
    if (!(var >= kVarianceFloor)) throw DegenerateScoresError(var);

    const double common = mean * (1.0 - mean) / var - 1.0;
    return {std::max(mean * common, kParamFloor), std::max((1.0 - mean) * common, kParamFloor)};
}

ScoreDensityPair fit_densities(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(scores[i]);
    if (pos.size() < 2) throw InsufficientClassError(1);
    if (neg.size() < 2) throw InsufficientClassError(0);
    return {fit_beta_moments(pos), fit_beta_moments(neg), pos.size(), neg.size()};
}

double mixture_log_likelihood(double pi, const ScoreDensityPair& densities,
                              std::span<const double> target_scores) {
    std::vector<double> buffer;
    return log_likelihood(pi, evaluate(densities, target_scores), buffer);
}

PrevalenceEstimate estimate_prevalence_em(const ScoreDensityPair& densities,
                                          std::span<const double> target_scores,
                                          const EmOptions& options) {
    require_targets(target_scores);
    PrevalenceEstimate est;
    est.method = CalibrationMethod::em_ml;
    est.pi = 0.5;
    if (densities.flat()) {
        est.identifiable = false;
        return est;
    }

    const auto table = evaluate(densities, target_scores);
    const auto n = static_cast<double>(target_scores.size());
    std::vector<double> resp(target_scores.size()), buffer;
    const auto em_step = [&](double p) {
        for (std::size_t j = 0; j < resp.size(); ++j) {
            const double a = p * table.f1[j];
            resp[j] = a / (a + (1.0 - p) * table.f0[j]);
        }
        return std::clamp(pairwise_sum(resp) / n, 0.0, 1.0);
    };
    const auto accept = [&](double p) {
        if (options.on_iteration) options.on_iteration(p);
    };

    // Plain EM crawls when the two densities overlap heavily or the optimum
    // sits on the boundary. After every pair of EM steps an Aitken-style
    // extrapolation is tried and kept only if it raises the likelihood, so
    // the likelihood never decreases. Termination is always decided by a
    // plain EM step, which keeps the fixed-point property.
    double pi = 0.5;
    int iter = 0;
    while (iter < options.max_iter) {
        const double p1 = em_step(pi);
        ++iter;
        const double r = p1 - pi;
        pi = p1;
        accept(pi);
        if (std::abs(r) <= options.tol || iter >= options.max_iter) break;

        const double p2 = em_step(p1);
        ++iter;
        const double v = (p2 - p1) - r;
        pi = p2;
        accept(pi);
        if (std::abs(p2 - p1) <= options.tol) break;
        if (v == 0.0) continue;

        // Both boundaries are absorbing for EM, so a jump may cover at most
        // half the remaining distance to either of them.
        const double alpha = -std::abs(r) / std::abs(v);
        const double x = std::clamp(p1 - r - 2.0 * alpha * r + alpha * alpha * v, 0.5 * p2, 0.5 * (1.0 + p2));
        if (x != p2 && log_likelihood(x, table, buffer) > log_likelihood(p2, table, buffer)) {
            pi = x;
            ++iter;
            accept(pi);
        }
    }
    est.pi = pi;
    est.iterations = iter;
    return est;
}

PrevalenceEstimate estimate_prevalence_bayes(const ScoreDensityPair& densities,
                                             std::span<const double> target_scores, int grid_points) {
    require_targets(target_scores);
    if (grid_points < 3 || grid_points % 2 == 0)
        throw std::invalid_argument("grid_points must be odd and at least 3");

    const auto table = evaluate(densities, target_scores);
    const auto g = static_cast<std::size_t>(grid_points);
    const double h = 1.0 / static_cast<double>(g - 1);
    const auto node = [&](std::size_t k) { return k == g - 1 ? 1.0 : static_cast<double>(k) * h; };

    // The log-posterior is concave in pi, so the peak can be bracketed by
    // ternary search and the support walked outward from it.
    constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> log_post(g, kUnset);
    std::vector<double> buffer;
    int evaluations = 0;
    const auto at = [&](std::size_t k) {
        if (std::isnan(log_post[k])) {
            log_post[k] = log_likelihood(node(k), table, buffer);
            ++evaluations;
        }
        return log_post[k];
    };

    std::size_t lo = 0, hi = g - 1;
    while (hi - lo > 2) {
        const std::size_t m1 = lo + (hi - lo) / 3;
        const std::size_t m2 = hi - (hi - lo) / 3;
        const double l1 = at(m1), l2 = at(m2);
        if (l1 < l2) {
            lo = m1 + 1;
        } else if (l1 > l2) {
            hi = m2 - 1;
        } else {
            lo = m1;
            hi = m2;
        }
    }
    std::size_t peak = lo;
    for (std::size_t k = lo; k <= hi; ++k)
        if (at(k) > at(peak)) peak = k;

    const double threshold = at(peak) - kLogPosteriorCut;
    std::size_t first = peak, last = peak;
    while (first > 0 && at(first - 1) >= threshold) --first;
    while (last + 1 < g && at(last + 1) >= threshold) ++last;

    double top = at(peak);
    for (std::size_t k = first; k <= last; ++k) top = std::max(top, log_post[k]);

    const auto simpson = [&](std::size_t k) {
        if (k == 0 || k == g - 1) return 1.0;
        return k % 2 == 1 ? 4.0 : 2.0;
    };
    std::vector<double> mass, first_moment;
    for (std::size_t k = first; k <= last; ++k) {
        const double w = simpson(k) * std::exp(log_post[k] - top);
        mass.push_back(w);
        first_moment.push_back(w * node(k));
    }
    const double z = pairwise_sum(mass);
    const double mean = pairwise_sum(first_moment) / z;
    std::vector<double> second(mass.size());
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double dev = node(first + i) - mean;
        second[i] = mass[i] * dev * dev;
    }
    const double var = pairwise_sum(second) / z;

    PrevalenceEstimate est;
    est.method = CalibrationMethod::bayes_posterior_mean;
    est.pi = std::clamp(mean, 0.0, 1.0);
    est.posterior_sd = std::sqrt(std::max(var, 0.0));
    est.iterations = evaluations;
    est.identifiable = !densities.flat();
    return est;
}

CalibratedScore calibrate_score(double s, double pi, const ScoreDensityPair& densities) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("pi must lie in [0, 1]");
    const double f1 = densities.f1.pdf(s);
    const double f0 = densities.f0.pdf(s);
    if (f1 == f0) return {pi, f1 <= kDensityFloor};
    const double a = pi * f1;
    const double denom = a + (1.0 - pi) * f0;
    if (!(denom > 0.0)) return {pi, true};
    return {a / denom, false};
}

Calibration calibrate_all(std::span<const double> scores, const ScoreDensityPair& densities,
                          CalibrationMethod method) {
    Calibration out;
    out.prevalence = method == CalibrationMethod::em_ml ? estimate_prevalence_em(densities, scores)
                                                        : estimate_prevalence_bayes(densities, scores);
    const double pi = out.prevalence.pi;
    const auto table = evaluate(densities, scores);
    out.probabilities.reserve(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (table.f1[j] == table.f0[j]) {
            out.probabilities.push_back(pi);
            continue;
        }
        const double a = pi * table.f1[j];
        const double denom = a + (1.0 - pi) * table.f0[j];
        out.probabilities.push_back(denom > 0.0 ? a / denom : pi);
    }
    return out;
}

}  // namespace rarequant
