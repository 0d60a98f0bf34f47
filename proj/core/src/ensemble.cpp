#include "rarequant/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include "rarequant/error.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {

void PipelineConfig::validate() const {
    vectorizer.validate();
    train.validate();
    split.validate();
}

const Member& EnsembleBundle::single() const {
    if (single_model) return *single_model;
    if (members.empty()) throw std::invalid_argument("bundle has no members");
    return members.front();
}

std::string_view to_string(EstimatorKind kind) noexcept {
    switch (kind) {
        case EstimatorKind::label_count: return "label_count";
        case EstimatorKind::raw_prob_sum: return "raw_prob_sum";
        case EstimatorKind::calibrated_sum: return "calibrated_sum";
        case EstimatorKind::ensemble_calibrated: return "ensemble_calibrated";
    }
    return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view text) noexcept {
    for (const auto kind : kAllEstimators)
        if (to_string(kind) == text) return kind;
    return std::nullopt;
}

PreparedCorpus PreparedCorpus::from(const LabeledDataset& data, const VectorizerConfig& cfg) {
    PreparedCorpus out;
    out.features = vectorize_all(data.documents(), cfg);
    out.labels = data.labels();
    std::unordered_map<std::string, std::size_t> key_of;
    out.group_keys.reserve(data.size());
    for (const auto& doc : data.documents())
        out.group_keys.push_back(key_of.try_emplace(doc.id, key_of.size()).first->second);
    return out;
}

double threshold_accuracy(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    if (scores.empty()) throw EmptyEvaluationError();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        correct += static_cast<std::size_t>((scores[i] > kDecisionThreshold) == (labels[i] == 1));
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

namespace {

struct View {
    std::vector<SparseVector> x;
    std::vector<int> y;
};

View gather(const PreparedCorpus& corpus, std::span<const std::size_t> rows,
            std::span<const std::size_t> picks) {
    View v;
    v.x.reserve(picks.size());
    v.y.reserve(picks.size());
    for (const auto p : picks) {
        v.x.push_back(corpus.features[rows[p]]);
        v.y.push_back(corpus.labels[rows[p]]);
    }
    return v;
}

bool has_two_per_class(std::span<const int> labels) {
    std::size_t count[2] = {0, 0};
    for (const int y : labels) ++count[y];
    return count[0] >= 2 && count[1] >= 2;
}

}  // namespace

Member build_member(const PreparedCorpus& corpus, const PipelineConfig& cfg, std::uint64_t seed,
                    bool resample) {
    cfg.validate();
    if (corpus.labels.empty()) throw EmptyDatasetError();
    if (corpus.features.size() != corpus.labels.size() || corpus.group_keys.size() != corpus.labels.size())
        throw std::invalid_argument("prepared corpus is inconsistent");

    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);

        std::vector<std::size_t> rows;
        if (resample) {
            rows = bootstrap_indices(corpus.labels.size(), s);
        } else {
            rows.resize(corpus.labels.size());
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        std::vector<int> labels(rows.size());
        std::vector<std::size_t> keys(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            labels[i] = corpus.labels[rows[i]];
            keys[i] = corpus.group_keys[rows[i]];
        }

        SplitSpec split = cfg.split;
        split.seed = s;
        SplitIndices parts;
        try {
            parts = stratified_split_indices(keys, labels, split);
        } catch (const InsufficientClassError& e) {
            last_failure = e.what();
            continue;
        }

        const View train_part = gather(corpus, rows, parts.train);
        const View test_part = gather(corpus, rows, parts.test);
        const View validation_part = gather(corpus, rows, parts.validation);
        const bool wants_validation = cfg.split.validation_fraction_of_train > 0.0;
        if (!has_two_per_class(train_part.y) || !has_two_per_class(test_part.y) ||
            (wants_validation && !has_two_per_class(validation_part.y))) {
            last_failure = "a split part has fewer than two documents of a class";
            continue;
        }

        Member member;
        member.seed = seed;
        member.retries = attempt;
        member.model = train(train_part.x, train_part.y, cfg.train);

        const auto test_scores = score_all(member.model, test_part.x);
        if (wants_validation) {
            member.weight = threshold_accuracy(score_all(member.model, validation_part.x), validation_part.y);
        } else {
            member.weight = threshold_accuracy(test_scores, test_part.y);
        }
        try {
            member.densities = fit_densities(test_scores, test_part.y);
        } catch (const DegenerateScoresError& e) {
            last_failure = e.what();
            continue;
        }
        return member;
    }
    throw MemberBuildError(seed, last_failure);
}

Member build_member(const LabeledDataset& data, const PipelineConfig& cfg, std::uint64_t seed) {
    return build_member(PreparedCorpus::from(data, cfg.vectorizer), cfg, seed, true);
}

Member build_single_model(const LabeledDataset& data, const PipelineConfig& cfg, std::uint64_t seed) {
    return build_member(PreparedCorpus::from(data, cfg.vectorizer), cfg, seed, false);
}

EnsembleBundle build_ensemble(const LabeledDataset& data, const PipelineConfig& cfg,
                              std::uint64_t master_seed, const EnsembleOptions& options) {
    if (options.members < 1) throw std::invalid_argument("ensemble needs at least one member");
    cfg.validate();
    if (data.empty()) throw EmptyDatasetError();
    if (data.positive_count() == 0 || data.negative_count() == 0) throw SingleClassError();

    const PreparedCorpus corpus = PreparedCorpus::from(data, cfg.vectorizer);

    // Job 0 is the single model when requested; the rest are ensemble members.
    const std::size_t m = static_cast<std::size_t>(options.members);
    const std::size_t offset = options.with_single_model ? 1 : 0;
    const std::size_t jobs = m + offset;
    const auto job_seed = [&](std::size_t job) {
        return job < offset ? master_seed ^ stream::kSingleModel : member_seed(master_seed, job - offset);
    };

    std::vector<std::optional<Member>> built(jobs);
    std::vector<std::exception_ptr> failures(jobs);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            try {
                built[job] = build_member(corpus, cfg, job_seed(job), job >= offset);
            } catch (...) {
                failures[job] = std::current_exception();
            }
        }
    };

    std::size_t threads = options.threads > 0 ? static_cast<std::size_t>(options.threads)
                                              : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<std::uint64_t> failed;
    std::string message = "ensemble build failed:";
    for (std::size_t job = 0; job < jobs; ++job) {
        if (!failures[job]) continue;
        failed.push_back(job_seed(job));
        try {
            std::rethrow_exception(failures[job]);
        } catch (const std::exception& e) {
            message += std::string(" [") + e.what() + "]";
        }
    }
    if (!failed.empty()) throw EnsembleBuildError(std::move(failed), message);

    EnsembleBundle bundle;
    bundle.config = cfg;
    bundle.master_seed = master_seed;
    if (offset) bundle.single_model = std::move(*built[0]);
    for (std::size_t job = offset; job < jobs; ++job) bundle.members.push_back(std::move(*built[job]));
    return bundle;
}

double ensemble_probability(std::span<const double> weights, std::span<const double> values) {
    if (weights.size() != values.size() || values.empty())
        throw std::invalid_argument("need one value per member");
    const double total = pairwise_sum(weights);
    if (!(total > 0.0)) throw ZeroWeightError();
    double acc = 0.0;
    for (std::size_t m = 0; m < values.size(); ++m) acc += (weights[m] / total) * values[m];
    const auto [lo, hi] = std::ranges::minmax(values);
    return std::clamp(acc, lo, hi);
}

double ensemble_probability(const EnsembleBundle& bundle, std::span<const double> values) {
    std::vector<double> weights;
    weights.reserve(bundle.members.size());
    for (const auto& member : bundle.members) weights.push_back(member.weight);
    return ensemble_probability(weights, values);
}

PositiveEstimate estimate_positives(std::span<const Member> members, std::span<const SparseVector> target,
                                    EstimatorKind kind, CalibrationMethod method) {
    if (members.empty()) throw std::invalid_argument("no members to estimate with");
    if (target.empty()) throw std::invalid_argument("target is empty");

    PositiveEstimate out;
    switch (kind) {
        case EstimatorKind::label_count: {
            const auto scores = score_all(members.front().model, target);
            out.per_doc.reserve(scores.size());
            for (const double s : scores) out.per_doc.push_back(s > kDecisionThreshold ? 1.0 : 0.0);
            break;
        }
        case EstimatorKind::raw_prob_sum:
            out.per_doc = score_all(members.front().model, target);
            break;
        case EstimatorKind::calibrated_sum: {
            auto cal = calibrate_all(score_all(members.front().model, target), members.front().densities, method);
            out.prevalence.push_back(cal.prevalence);
            out.per_doc = std::move(cal.probabilities);
            break;
        }
        case EstimatorKind::ensemble_calibrated: {
            std::vector<double> weights;
            std::vector<std::vector<double>> calibrated;
            for (const auto& member : members) {
                auto cal = calibrate_all(score_all(member.model, target), member.densities, method);
                out.prevalence.push_back(cal.prevalence);
                calibrated.push_back(std::move(cal.probabilities));
                weights.push_back(member.weight);
            }
            out.per_doc.resize(target.size());
            std::vector<double> column(members.size());
            for (std::size_t j = 0; j < target.size(); ++j) {
                for (std::size_t m = 0; m < members.size(); ++m) column[m] = calibrated[m][j];
                out.per_doc[j] = ensemble_probability(weights, column);
            }
            break;
        }
    }
    out.est_pos = pairwise_sum(out.per_doc);
    return out;
}

PositiveEstimate estimate_positives(const EnsembleBundle& bundle, std::span<const SparseVector> target,
                                    EstimatorKind kind, CalibrationMethod method) {
    if (kind == EstimatorKind::ensemble_calibrated) return estimate_positives(bundle.members, target, kind, method);
    return estimate_positives(std::span<const Member>(&bundle.single(), 1), target, kind, method);
}

}  // namespace rarequant
