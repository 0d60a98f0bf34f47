#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "rarequant/bundle_io.hpp"
#include "rarequant/error.hpp"
#include "rarequant/synth.hpp"

namespace rarequant {
namespace {

namespace fs = std::filesystem;

EnsembleBundle small_bundle(bool with_single) {
    SynthConfig synth;
    synth.vocab_size = 400;
    synth.train_size = 300;
    synth.target_size = 1;
    synth.doc_length_mean = 40;
    synth.separation = 2.0;
    PipelineConfig cfg;
    cfg.vectorizer.dim = 2048;
    cfg.train.max_iters = 50;
    EnsembleOptions options;
    options.members = 2;
    options.with_single_model = with_single;
    return build_ensemble(generate(synth).train, cfg, 42, options);
}

TEST(BundleJson, RoundTripsExactly) {
    for (const bool with_single : {false, true}) {
        const auto bundle = small_bundle(with_single);
        const auto doc = bundle_to_json(bundle);
        EXPECT_EQ(doc.at("format"), "rarequant-bundle");
        EXPECT_EQ(doc.at("version"), kBundleFormatVersion);
        EXPECT_EQ(bundle_from_json(doc), bundle);
        // Through text as well, to cover number formatting.
        EXPECT_EQ(bundle_from_json(nlohmann::json::parse(doc.dump())), bundle);
    }
}

TEST(BundleJson, StoresOnlyNonzeroWeights) {
    const auto bundle = small_bundle(false);
    const auto doc = bundle_to_json(bundle);
    std::size_t nonzero = 0;
    for (const double w : bundle.members[0].model.weights) nonzero += w != 0.0;
    EXPECT_EQ(doc.at("members").at(0).at("model").at("weights").size(), nonzero);
    EXPECT_LT(nonzero, bundle.members[0].model.dim);
}

TEST(BundleJson, RejectsUnsupportedOrMalformedDocuments) {
    auto doc = bundle_to_json(small_bundle(false));
    auto bad = doc;
    bad["version"] = kBundleFormatVersion + 1;
    EXPECT_THROW(bundle_from_json(bad), FormatError);
    bad = doc;
    bad["format"] = "something-else";
    EXPECT_THROW(bundle_from_json(bad), FormatError);
    bad = doc;
    bad.erase("members");
    EXPECT_THROW(bundle_from_json(bad), FormatError);
    bad = doc;
    bad["members"] = nlohmann::json::array();
    EXPECT_THROW(bundle_from_json(bad), FormatError);
    bad = doc;
    bad["members"][0]["model"]["weights"][0][0] = 1u << 30;
    EXPECT_THROW(bundle_from_json(bad), FormatError);
    EXPECT_THROW(bundle_from_json(nlohmann::json::array()), FormatError);
}

TEST(BundleFile, SaveIsDeterministicAndAtomic) {
    const auto dir = fs::temp_directory_path() / "rarequant_bundle_test";
    fs::create_directories(dir);
    const auto bundle = small_bundle(true);
    save_bundle(dir / "a.json", bundle);
    save_bundle(dir / "b.json", small_bundle(true));
    const auto read = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    EXPECT_EQ(read(dir / "a.json"), read(dir / "b.json"));
    EXPECT_FALSE(fs::exists(dir / "a.json.tmp"));
    EXPECT_EQ(load_bundle(dir / "a.json"), bundle);

    std::ofstream(dir / "broken.json") << "{";
    EXPECT_THROW(load_bundle(dir / "broken.json"), FormatError);
    EXPECT_ANY_THROW(load_bundle(dir / "missing.json"));
    fs::remove_all(dir);
}

}  // namespace
}  // namespace rarequant
