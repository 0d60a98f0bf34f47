#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rarequant/corpus.hpp"

namespace rarequant {

// Seeded generator of labeled text corpora with a known number of positives.
// Words are "w<index>" for index < vocab_size. Negatives draw words from a
// Zipf background; positives from the same background with a set of
// positive marker words up-weighted by exp(separation). Negatives carry
// their own marker words up-weighted the same way.
struct SynthConfig {
    std::size_t vocab_size = 3000;
    double doc_length_mean = 70.0;
    double zipf_exponent = 1.5;
    // Share of the vocabulary acting as markers for each class.
    double marker_fraction = 0.02;
    double separation = 1.6;

    std::size_t train_size = 1669;
    double train_prevalence = 0.30;
    std::size_t target_size = 20000;
    double target_prevalence = 0.005;
    std::uint64_t seed = 0;

    // Explicit word distributions (index 0 negative, 1 positive). When
    // absent they are derived from the parameters above.
    std::optional<std::array<std::vector<double>, 2>> class_token_distributions;

    void validate() const;

    // The two word distributions actually used, each summing to 1.
    std::array<std::vector<double>, 2> distributions() const;
};

struct SynthCorpus {
    LabeledDataset train;
    std::vector<Document> target;  // labels stripped
    std::vector<int> target_truth;  // hidden ground truth, aligned with target
};

SynthCorpus generate(const SynthConfig& cfg);

std::string word(std::size_t index);

// train.jsonl, target.jsonl and target.truth.jsonl under dir.
struct CorpusPaths {
    std::filesystem::path train, target, truth;
    static CorpusPaths in(const std::filesystem::path& dir);
};

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

// Sidecar file of {"id": ..., "label": 0|1} lines, aligned with ids.
void write_truth(std::ostream& out, const std::vector<Document>& target, const std::vector<int>& truth);
// Returns labels in the order of target ids. Throws DataError when an id is
// missing from the sidecar.
std::vector<int> load_truth(const std::filesystem::path& path, const std::vector<Document>& target);

// Sidecar path convention: "<stem>.truth.jsonl" beside the target file.
std::filesystem::path default_truth_path(const std::filesystem::path& target_path);

}  // namespace rarequant
