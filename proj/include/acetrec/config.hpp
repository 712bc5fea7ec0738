#pragma once

#include "acetrec/experiment.hpp"
#include "acetrec/json_codec.hpp"

#include <string>

namespace acetrec {

// Config JSON. Reading starts from the defaults and overrides only the keys
// present; unknown keys are a ConfigurationError.
void to_json(json& j, const ReconstructionConfig& cfg);
void from_json(const json& j, ReconstructionConfig& cfg);
void to_json(json& j, const ExperimentConfig& cfg);
void from_json(const json& j, ExperimentConfig& cfg);

ExperimentConfig load_experiment_config(const std::string& path);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace acetrec
