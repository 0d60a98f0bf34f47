#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rarequant/calibration.hpp"
#include "rarequant/ensemble.hpp"
#include "rarequant/synth.hpp"

namespace rarequant {

// Every knob of a run in one declarative document. Parsing rejects unknown
// keys and validates each embedded config.
struct RunConfig {
    PipelineConfig pipeline;
    SynthConfig synth;
    int models = kDefaultEnsembleSize;
    int max_models = kDefaultEnsembleSize;
    CalibrationMethod method = CalibrationMethod::bayes_posterior_mean;
    std::uint64_t seed = 0;
    // Does not affect results.
    int threads = 0;
    // Seeds for the repeated experiment; empty means {seed}.
    std::vector<std::uint64_t> experiment_seeds;

    void validate() const;
    std::vector<std::uint64_t> seeds() const;
};

RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);

// Throws ConfigError (field "config") when the file is missing or unreadable.
RunConfig load_run_config(const std::filesystem::path& path);

// Hex FNV-1a-64 of the canonical JSON form.
std::string config_digest(const RunConfig& cfg);

}  // namespace rarequant
