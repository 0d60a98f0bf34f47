#pragma once

// Reference computations used only by tests. Nothing here calls into the
// library's numerical code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace rarequant::testing {

inline double beta_pdf(double a, double b, double s) {
    s = std::fmin(std::fmax(s, 1e-6), 1.0 - 1e-6);
    return std::pow(s, a - 1.0) * std::pow(1.0 - s, b - 1.0) / std::beta(a, b);
}

inline double mixture_ll(double pi, double a1, double b1, double a0, double b0, std::span<const double> s) {
    long double total = 0.0L;
    for (const double x : s) {
        const double f1 = std::fmax(beta_pdf(a1, b1, x), 1e-300);
        const double f0 = std::fmax(beta_pdf(a0, b0, x), 1e-300);
        total += std::log(pi * f1 + (1.0 - pi) * f0);
    }
    return static_cast<double>(total);
}

// argmax over pi in {0, step, 2 step, ..., 1}.
inline double grid_argmax(double a1, double b1, double a0, double b0, std::span<const double> s,
                          double step = 1e-3) {
    const int n = static_cast<int>(std::lround(1.0 / step));
    double best_pi = 0.0, best = -INFINITY;
    for (int k = 0; k <= n; ++k) {
        const double pi = k * step;
        const double ll = mixture_ll(pi, a1, b1, a0, b0, s);
        if (ll > best) {
            best = ll;
            best_pi = pi;
        }
    }
    return best_pi;
}

// Beta variates via two gamma draws.
inline double sample_beta(std::mt19937_64& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng), y = gb(rng);
    return x / (x + y);
}

inline std::vector<double> sample_mixture(std::mt19937_64& rng, std::size_t n, double pi, double a1, double b1,
                                          double a0, double b0) {
    std::bernoulli_distribution coin(pi);
    std::vector<double> out(n);
    for (auto& s : out) s = coin(rng) ? sample_beta(rng, a1, b1) : sample_beta(rng, a0, b0);
    return out;
}

// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                               std::vector<double> x, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + h;
        const double up = f(x);
        x[i] = saved - h;
        const double down = f(x);
        x[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace rarequant::testing
