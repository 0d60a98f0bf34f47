#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace rarequant {

// Pairwise (cascade) summation in a fixed association order, so a reduction
// gives the same bits no matter how its inputs were produced.
double pairwise_sum(std::span<const double> values) noexcept;

double sigmoid(double z) noexcept;

// ln(1 + e^z) without overflow.
double log1p_exp(double z) noexcept;

// FNV-1a, 64-bit.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace rarequant
