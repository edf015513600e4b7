#pragma once

#include <filesystem>

#include <json.hpp>

#include "tsgrasp/harness.hpp"

namespace tsgrasp {

/// Parses an experiment config. Keys absent from the document keep their
/// desk defaults; unknown keys throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace tsgrasp
