#include "rarequant/report_io.hpp"

namespace rarequant {

using nlohmann::json;

json row_to_json(const MethodReport& row) {
    json j = {
        {"kind", std::string(to_string(row.kind))},
        {"n_target", row.n_target},
        {"est_pos", row.est_pos},
        {"prevalence", row.prevalence},
    };
    if (row.tp) j["tp"] = *row.tp;
    if (row.bias) j["bias"] = *row.bias;
    if (row.accuracy) j["accuracy"] = *row.accuracy;
    if (row.balanced_accuracy) j["balanced_accuracy"] = *row.balanced_accuracy;
    return j;
}

json rows_to_json(std::span<const MethodReport> rows) {
    json out = json::array();
    for (const auto& row : rows) out.push_back(row_to_json(row));
    return out;
}

json estimate_report(const ReportHeader& header, std::span<const MethodReport> rows) {
    return {
        {"format", "rarequant-report"},
        {"version", kReportFormatVersion},
        {"method", std::string(to_string(header.method))},
        {"master_seed", header.master_seed},
        {"config_digest", header.config_digest},
        {"members", header.members},
        {"rows", rows_to_json(rows)},
    };
}

}  // namespace rarequant
