#include "rarequant/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "rarequant/error.hpp"
#include "rarequant/numeric.hpp"

namespace rarequant {

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point starting at text[pos] and advances pos. Malformed
// sequences consume one byte and yield U+FFFD.
char32_t decode_utf8(std::string_view text, std::size_t& pos) noexcept {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char lead = byte(pos);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    std::size_t len;
    char32_t cp;
    char32_t min;
    if ((lead & 0xE0) == 0xC0) {
        len = 2, cp = lead & 0x1F, min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3, cp = lead & 0x0F, min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4, cp = lead & 0x07, min = 0x10000;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kInvalid;
    }
    pos += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in(char32_t cp, char32_t lo, char32_t hi) noexcept { return cp >= lo && cp <= hi; }

bool is_alnum(char32_t cp) noexcept {
    if (cp < 0x80)
        return in(cp, U'0', U'9') || in(cp, U'a', U'z') || in(cp, U'A', U'Z');
    if (in(cp, 0x80, 0xBF)) {
        switch (cp) {
            case 0xAA: case 0xB2: case 0xB3: case 0xB5: case 0xB9:
            case 0xBA: case 0xBC: case 0xBD: case 0xBE:
                return true;
            default:
                return false;
        }
    }
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x2190, 0x2BFF) ||
        in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F) || in(cp, 0xFE10, 0xFE1F) ||
        in(cp, 0xFE30, 0xFE6F) || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
        in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF))
        return false;
    if (cp == 0xFEFF || cp == kInvalid) return false;
    return true;
}

char32_t to_lower(char32_t cp) noexcept {
    if (in(cp, U'A', U'Z')) return cp + 0x20;
    if (cp < 0x80) return cp;
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
    if (cp == 0x130) return U'i';
    if (cp == 0x178) return 0xFF;
    if ((in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) && cp % 2 == 0) return cp + 1;
    if ((in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) && cp % 2 == 1) return cp + 1;
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
    if (in(cp, 0x410, 0x42F)) return cp + 0x20;
    if (in(cp, 0x400, 0x40F)) return cp + 0x50;
    return cp;
}

}  // namespace

double SparseVector::norm() const noexcept {
    double s = 0.0;
    for (const auto& e : entries) s += e.value * e.value;
    return std::sqrt(s);
}

void VectorizerConfig::validate() const {
    if (dim < 2 || !std::has_single_bit(dim))
        throw ConfigError("vectorizer.dim", "must be a power of two and at least 2");
    if (dim > (std::size_t{1} << 32))
        throw ConfigError("vectorizer.dim", "must not exceed 2^32");
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = decode_utf8(text, pos);
        if (is_alnum(cp)) {
            encode_utf8(to_lower(cp), current);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::uint32_t feature_index(std::string_view token, std::size_t dim) noexcept {
    return static_cast<std::uint32_t>(fnv1a64(token) & (dim - 1));
}

SparseVector vectorize(std::string_view text, const VectorizerConfig& cfg) {
    cfg.validate();
    std::map<std::uint32_t, double> counts;
    for (const auto& token : tokenize(text)) counts[feature_index(token, cfg.dim)] += 1.0;

    SparseVector v;
    v.dim = cfg.dim;
    v.entries.reserve(counts.size());
    double sq = 0.0;
    for (const auto& [index, tf] : counts) {
        const double value = cfg.sublinear_tf ? 1.0 + std::log(tf) : tf;
        v.entries.push_back({index, value});
        sq += value * value;
    }
    if (!v.entries.empty()) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& e : v.entries) e.value *= inv;
    }
    return v;
}

std::vector<SparseVector> vectorize_all(std::span<const Document> docs, const VectorizerConfig& cfg) {
    std::vector<SparseVector> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) out.push_back(vectorize(doc.text, cfg));
    return out;
}

}  // namespace rarequant
