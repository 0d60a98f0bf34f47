#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "rarequant/calibration.hpp"
#include "rarequant/metrics.hpp"

namespace rarequant {

inline constexpr int kReportFormatVersion = 1;

// Ground-truth fields are omitted from a row when they are empty.
nlohmann::json row_to_json(const MethodReport& row);
nlohmann::json rows_to_json(std::span<const MethodReport> rows);

struct ReportHeader {
    CalibrationMethod method = CalibrationMethod::bayes_posterior_mean;
    std::uint64_t master_seed = 0;
    std::string config_digest;
    std::size_t members = 0;
};

nlohmann::json estimate_report(const ReportHeader& header, std::span<const MethodReport> rows);

}  // namespace rarequant
