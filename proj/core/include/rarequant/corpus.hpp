#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rarequant {

struct Document {
    std::string id;
    std::string text;
    std::optional<int> label;  // 1 = positive, 0 = negative

    friend bool operator==(const Document&, const Document&) = default;
};

// A dataset whose documents all carry a label. Ids may repeat (bootstrap
// resamples draw the same document more than once).
class LabeledDataset {
public:
    LabeledDataset() = default;
    // Throws std::invalid_argument if a document is unlabeled or has a label
    // other than 0/1.
    explicit LabeledDataset(std::vector<Document> documents);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }
    std::size_t positive_count() const noexcept { return positives_; }
    std::size_t negative_count() const noexcept { return documents_.size() - positives_; }

    std::vector<int> labels() const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

private:
    std::vector<Document> documents_;
    std::size_t positives_ = 0;
};

struct SplitSpec {
    double train_fraction = 0.7;
    double validation_fraction_of_train = 0.1;
    std::uint64_t seed = 0;

    // Throws ConfigError naming the offending field.
    void validate() const;

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

enum class DocumentFormat { jsonl };

// One JSON object per line with fields id, text and optional integer label.
// Blank lines are skipped; unknown fields are ignored.
std::vector<Document> parse_documents(std::istream& in);
std::vector<Document> load_documents(const std::filesystem::path& path,
                                     DocumentFormat format = DocumentFormat::jsonl);
void write_documents(std::ostream& out, std::span<const Document> documents);

struct Split {
    LabeledDataset train;
    LabeledDataset test;
    LabeledDataset validation;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> validation;
};

// Per-class shuffle of groups, then contiguous slicing into test, validation
// and train. Entries sharing a group key always land in the same part, so
// splitting a bootstrap resample never leaks a document across parts.
// Indices in each part are ascending.
SplitIndices stratified_split_indices(std::span<const std::size_t> group_keys,
                                      std::span<const int> labels, const SplitSpec& spec);

// Groups documents by id.
Split stratified_split(const LabeledDataset& data, const SplitSpec& spec);

// n uniform draws with replacement from [0, n), in draw order.
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed);

LabeledDataset bootstrap_resample(const LabeledDataset& data, std::uint64_t seed);

}  // namespace rarequant
