#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "prefopt/trainer.hpp"

namespace prefopt {

// little-endian float64 arrays <-> base64, the checkpoint encoding for bulk
// numeric state
std::string base64_encode_doubles(const std::vector<double>& v);
std::vector<double> base64_decode_doubles(const std::string& s);

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json bundle_to_json(const TrainedBundle& b);
TrainedBundle bundle_from_json(const nlohmann::json& j);

void save_bundle(const TrainedBundle& b, const std::string& path);
TrainedBundle load_bundle(const std::string& path);

// metrics.csv with 17-significant-digit floats so identical runs produce
// identical bytes
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

std::string format_double(double v); // %.17g

} // namespace prefopt
