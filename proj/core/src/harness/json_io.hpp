#pragma once

#include <cmath>

#include <json.hpp>

#include "pldo/harness/config.hpp"

namespace pldo::harness {

using Json = nlohmann::ordered_json;

Json config_to_json(const ExperimentConfig& config);

/// Non-finite doubles become null so the sidecar stays valid JSON.
inline Json number(double v)
{
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

}  // namespace pldo::harness
