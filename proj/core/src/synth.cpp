#include "rarequant/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rarequant/atomic_file.hpp"
#include "rarequant/error.hpp"
#include "rarequant/random.hpp"

namespace rarequant {

namespace {

// The most frequent background words never act as markers.
constexpr std::size_t kFirstMarker = 10;

std::vector<double> normalized(std::vector<double> w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= total;
    return w;
}

void check_probability_vector(const std::vector<double>& p, std::size_t vocab, const char* field) {
    if (p.size() != vocab) throw ConfigError(field, "length must equal vocab_size");
    double total = 0.0;
    for (const double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field, "weights must be non-negative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError(field, "weights must sum to 1");
}

class WordSampler {
public:
    explicit WordSampler(const std::vector<double>& p) : cdf_(p.size()) {
        std::partial_sum(p.begin(), p.end(), cdf_.begin());
    }
    std::size_t operator()(Rng& rng) const {
        const double u = rng.uniform() * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

struct Drawn {
    Document doc;
    int label;
};

Drawn draw_document(const SynthConfig& cfg, const WordSampler (&samplers)[2], double prevalence,
                    std::uint64_t stream_seed, std::size_t index, const char* prefix) {
    Rng rng(stream_seed ^ mix64(index));
    const int label = rng.bernoulli(prevalence) ? 1 : 0;
    const std::size_t length = std::max<std::uint64_t>(1, rng.poisson(cfg.doc_length_mean));
    std::string text;
    for (std::size_t k = 0; k < length; ++k) {
        if (k) text.push_back(' ');
        text += word(samplers[label](rng));
    }
    char id[48];
    std::snprintf(id, sizeof id, "%s-%06zu", prefix, index);
    return {Document{id, std::move(text), std::nullopt}, label};
}

}  // namespace

std::string word(std::size_t index) { return "w" + std::to_string(index); }

void SynthConfig::validate() const {
    if (vocab_size < 2) throw ConfigError("synth.vocab_size", "must be at least 2");
    if (!(doc_length_mean > 0.0) || !std::isfinite(doc_length_mean))
        throw ConfigError("synth.doc_length_mean", "must be positive");
    if (!(zipf_exponent >= 0.0) || !std::isfinite(zipf_exponent))
        throw ConfigError("synth.zipf_exponent", "must be non-negative");
    if (!(marker_fraction > 0.0 && marker_fraction <= 0.5))
        throw ConfigError("synth.marker_fraction", "must lie inside (0, 0.5]");
    if (!(separation >= 0.0) || !std::isfinite(separation))
        throw ConfigError("synth.separation", "must be non-negative");
    if (train_size < 1) throw ConfigError("synth.train_size", "must be at least 1");
    if (target_size < 1) throw ConfigError("synth.target_size", "must be at least 1");
    if (!(train_prevalence > 0.0 && train_prevalence < 1.0))
        throw ConfigError("synth.train_prevalence", "must lie strictly inside (0, 1)");
    if (!(target_prevalence > 0.0 && target_prevalence < 1.0))
        throw ConfigError("synth.target_prevalence", "must lie strictly inside (0, 1)");
    if (class_token_distributions) {
        check_probability_vector((*class_token_distributions)[0], vocab_size,
                                 "synth.class_token_distributions[0]");
        check_probability_vector((*class_token_distributions)[1], vocab_size,
                                 "synth.class_token_distributions[1]");
    }
}

std::array<std::vector<double>, 2> SynthConfig::distributions() const {
    if (class_token_distributions) return *class_token_distributions;

    std::vector<double> background(vocab_size);
    for (std::size_t t = 0; t < vocab_size; ++t)
        background[t] = std::pow(static_cast<double>(t + 1), -zipf_exponent);

    const auto stride = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(1.0 / marker_fraction)));
    const double tilt = std::exp(separation);
    std::vector<double> negative = background, positive = background;
    for (std::size_t t = kFirstMarker; t < vocab_size; ++t) {
        const std::size_t phase = (t - kFirstMarker) % stride;
        if (phase == 0) positive[t] *= tilt;
        if (phase == stride / 2) negative[t] *= tilt;
    }
    return {normalized(std::move(negative)), normalized(std::move(positive))};
}

SynthCorpus generate(const SynthConfig& cfg) {
    cfg.validate();
    const auto dists = cfg.distributions();
    const WordSampler samplers[2] = {WordSampler(dists[0]), WordSampler(dists[1])};

    SynthCorpus out;
    std::vector<Document> train;
    train.reserve(cfg.train_size);
    for (std::size_t i = 0; i < cfg.train_size; ++i) {
        auto drawn = draw_document(cfg, samplers, cfg.train_prevalence, cfg.seed ^ stream::kSynthTrain, i, "train");
        drawn.doc.label = drawn.label;
        train.push_back(std::move(drawn.doc));
    }
    out.train = LabeledDataset(std::move(train));

    out.target.reserve(cfg.target_size);
    out.target_truth.reserve(cfg.target_size);
    for (std::size_t i = 0; i < cfg.target_size; ++i) {
        auto drawn =
            draw_document(cfg, samplers, cfg.target_prevalence, cfg.seed ^ stream::kSynthTarget, i, "target");
        out.target.push_back(std::move(drawn.doc));
        out.target_truth.push_back(drawn.label);
    }
    return out;
}

CorpusPaths CorpusPaths::in(const std::filesystem::path& dir) {
    return {dir / "train.jsonl", dir / "target.jsonl", dir / "target.truth.jsonl"};
}

std::filesystem::path default_truth_path(const std::filesystem::path& target_path) {
    auto p = target_path;
    p.replace_filename(target_path.stem().string() + ".truth.jsonl");
    return p;
}

void write_truth(std::ostream& out, const std::vector<Document>& target, const std::vector<int>& truth) {
    if (target.size() != truth.size()) throw std::invalid_argument("truth does not align with target");
    for (std::size_t i = 0; i < target.size(); ++i)
        out << nlohmann::json{{"id", target[i].id}, {"label", truth[i]}}.dump() << '\n';
}

std::vector<int> load_truth(const std::filesystem::path& path, const std::vector<Document>& target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open ground-truth file '" + path.string() + "'");
    std::unordered_map<std::string, int> by_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto record = nlohmann::json::parse(line);
            const int label = record.at("label").get<int>();
            if (label != 0 && label != 1) throw ParseError(line_no, "label must be 0 or 1");
            by_id.emplace(record.at("id").get<std::string>(), label);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    std::vector<int> out;
    out.reserve(target.size());
    for (const auto& doc : target) {
        const auto it = by_id.find(doc.id);
        if (it == by_id.end()) throw DataError("ground truth has no label for id '" + doc.id + "'");
        out.push_back(it->second);
    }
    return out;
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto paths = CorpusPaths::in(dir);
    write_file_atomic(paths.train, [&](std::ostream& out) { write_documents(out, corpus.train.documents()); });
    write_file_atomic(paths.target, [&](std::ostream& out) { write_documents(out, corpus.target); });
    write_file_atomic(paths.truth, [&](std::ostream& out) { write_truth(out, corpus.target, corpus.target_truth); });
}

}  // namespace rarequant
