#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "tonelli/types.hpp"

namespace tonelli {

using Json = nlohmann::json;

inline constexpr const char* kCatalogueVersion = "tonelli-lab 1.0.0";

/// Reject unknown keys (schema discipline for configs).
void require_keys(const Json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context);

Vec json_to_vec(const Json& a, const std::string& what);
IVec json_to_ivec(const Json& a, const std::string& what);
Json vec_to_json(const Vec& v);
Json mat_to_json(const Mat& m);  // row-major flat array + shape handled by caller

/// Validated experiment configuration (angles in turns everywhere).
struct RunConfig {
  std::string task;
  std::string model = "flat";
  int dim = 1;
  Json model_params = Json::object();
  std::string method = "auto";
  double step = 1e-3;
  long seed = 0;
  Json params = Json::object();

  static RunConfig from_json(const Json& cfg);
  Json echo() const;  // canonical config echo embedded in reports
};

/// FNV-1a hash of the canonical config dump, hex string.
std::string config_hash(const Json& canonical);

struct RunReport {
  Json document;
  bool pass = true;
  const Json& payload() const { return document.at("payload"); }
};

/// Dispatch a task and assemble the deterministic report document.
RunReport run_task(const RunConfig& cfg);

/// Fieldwise numeric diff of two report payloads of the same task.
/// field_tols maps payload paths (e.g. "residuals.closure") to tolerances.
Json compare_reports(const Json& report_a, const Json& report_b, double default_tol,
                     const Json& field_tols = Json::object());

/// Flatten the payload to "field,value" CSV rows for external plotting.
std::string report_csv(const Json& report);

}  // namespace tonelli
