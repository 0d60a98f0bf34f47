#include "rarequant/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rarequant/error.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {

namespace {

// Both metrics are rationals; dividing the lowest-terms form makes equal
// rationals produce identical doubles.
double reduced_ratio(std::uint64_t num, std::uint64_t den) {
    const auto g = std::gcd(num, den);
    return static_cast<double>(num / g) / static_cast<double>(den / g);
}

}  // namespace

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const double> per_doc, std::span<const int> truth) {
    if (per_doc.size() != truth.size()) throw std::invalid_argument("predictions and truth differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < per_doc.size(); ++i) {
        const bool predicted = per_doc[i] > kDecisionThreshold;
        if (truth[i] == 1) {
            ++(predicted ? cm.tp : cm.fn);
        } else {
            ++(predicted ? cm.fp : cm.tn);
        }
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw EmptyEvaluationError();
    return reduced_ratio(cm.tp + cm.tn, cm.total());
}

double balanced_accuracy(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) throw ClassAbsentError(1);
    if (cm.tn + cm.fp == 0) throw ClassAbsentError(0);
    const std::uint64_t pos = cm.tp + cm.fn, neg = cm.tn + cm.fp;
    return reduced_ratio(cm.tp * neg + cm.tn * pos, 2 * pos * neg);
}

double bias(double est_pos, std::int64_t true_pos, std::int64_t n_target) {
    if (n_target <= 0) throw EmptyEvaluationError();
    return (est_pos - static_cast<double>(true_pos)) / static_cast<double>(n_target);
}

std::vector<MethodReport> build_report(std::span<const KindEstimate> estimates,
                                       std::optional<std::span<const int>> truth) {
    std::vector<MethodReport> rows;
    for (const auto kind : kAllEstimators) {
        const auto it = std::ranges::find(estimates, kind, &KindEstimate::kind);
        if (it == estimates.end()) continue;
        const auto& est = it->estimate;

        MethodReport row;
        row.kind = kind;
        row.n_target = est.per_doc.size();
        row.est_pos = est.est_pos;
        if (est.prevalence.empty()) {
            row.prevalence = row.n_target ? est.est_pos / static_cast<double>(row.n_target) : 0.0;
        } else {
            std::vector<double> pis;
            for (const auto& p : est.prevalence) pis.push_back(p.pi);
            row.prevalence = pairwise_sum(pis) / static_cast<double>(pis.size());
        }

        if (truth) {
            if (truth->size() != row.n_target) throw std::invalid_argument("ground truth size does not match target");
            const auto cm = ConfusionMatrix::from_predictions(est.per_doc, *truth);
            row.tp = cm.tp + cm.fn;
            row.bias = bias(est.est_pos, static_cast<std::int64_t>(*row.tp), static_cast<std::int64_t>(row.n_target));
            row.accuracy = accuracy(cm);
            if (cm.tp + cm.fn > 0 && cm.tn + cm.fp > 0) row.balanced_accuracy = balanced_accuracy(cm);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string bias_series_csv(std::span<const MethodReport> rows) {
    std::ostringstream out;
    out.precision(17);
    out << "kind,bias\n";
    for (const auto& row : rows)
        if (row.bias) out << to_string(row.kind) << ',' << *row.bias << '\n';
    return out.str();
}

}  // namespace rarequant
