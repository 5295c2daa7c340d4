#pragma once

#include <json.hpp>
#include <string>

#include "gibbstf/asymptotics.hpp"
#include "gibbstf/diagnostics.hpp"
#include "gibbstf/estimate.hpp"

namespace gibbstf {

using Json = nlohmann::json;

/// `pattern.csv` -> `pattern.window.json`.
std::string sidecar_path(const std::string& csv_path);

/// Reads `x,y[,mark]` rows (a `z` column is accepted for 3-d data) and the
/// carrier window from `window_path`, or from the sidecar when empty.
Configuration read_pattern(const std::string& csv_path, const std::string& window_path = "");
/// Writes the CSV and its sidecar window descriptor.
void write_pattern(const Configuration& cfg, const std::string& csv_path);

Json window_to_json(const Window& w);
Window window_from_json(const Json& j);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const ContrastReport& r);
Json to_json(const CovarianceReport& r);
Json to_json(const GnzReport& r);
Json to_json(const ProfileReport& r);
Json to_json(const DetCheckReport& r);

void write_json(const Json& j, const std::string& path);
Json read_json(const std::string& path);

}  // namespace gibbstf
