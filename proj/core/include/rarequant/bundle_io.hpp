#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "rarequant/ensemble.hpp"

namespace rarequant {

inline constexpr int kBundleFormatVersion = 1;

// Self-describing bundle document: format version, vectorizer, training and
// split settings, master seed, and every member's nonzero weights as
// [index, value] pairs with intercept, Beta parameters, voting weight and
// seed. Doubles round-trip exactly.
nlohmann::json bundle_to_json(const EnsembleBundle& bundle);

// Throws FormatError on an unsupported version or malformed document.
EnsembleBundle bundle_from_json(const nlohmann::json& doc);

void save_bundle(const std::filesystem::path& path, const EnsembleBundle& bundle);
EnsembleBundle load_bundle(const std::filesystem::path& path);

}  // namespace rarequant
