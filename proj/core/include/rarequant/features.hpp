#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rarequant/corpus.hpp"

namespace rarequant {

struct SparseEntry {
    std::uint32_t index;
    double value;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Hashed term-frequency vector. Entries are sorted by strictly increasing
// index, all below dim.
struct SparseVector {
    std::size_t dim = 0;
    std::vector<SparseEntry> entries;

    bool empty() const noexcept { return entries.empty(); }
    double norm() const noexcept;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct VectorizerConfig {
    std::size_t dim = 65536;
    bool sublinear_tf = true;

    // Throws ConfigError unless dim >= 2 and dim is a power of two.
    void validate() const;

    friend bool operator==(const VectorizerConfig&, const VectorizerConfig&) = default;
};

// Lowercased maximal runs of alphanumeric code points. ASCII letters and
// digits are alphanumeric; non-ASCII code points are alphanumeric unless
// they fall in a punctuation, symbol or space block. Malformed UTF-8 bytes
// act as separators.
std::vector<std::string> tokenize(std::string_view text);

std::uint32_t feature_index(std::string_view token, std::size_t dim) noexcept;

SparseVector vectorize(std::string_view text, const VectorizerConfig& cfg);
inline SparseVector vectorize(const Document& doc, const VectorizerConfig& cfg) {
    return vectorize(doc.text, cfg);
}

std::vector<SparseVector> vectorize_all(std::span<const Document> docs, const VectorizerConfig& cfg);

}  // namespace rarequant
