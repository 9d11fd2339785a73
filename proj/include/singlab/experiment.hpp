#pragma once

#include "singlab/probe.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace singlab {

// Validates a config document against the experiment schema. Unknown keys
// are rejected (misspellings must not fall back to defaults); value ranges
// are enforced by the module constructors downstream.
void validate_config(const nlohmann::json& config);

struct ExperimentOutcome {
  nlohmann::json result;  // also written to <outdir>/<experiment>_result.json
  std::vector<std::filesystem::path> files;
};

// Executes the named experiment (norms | kernel-check | cz | net | probe |
// params), writes CSV + JSON into `outdir`, and echoes the resolved config
// inside the JSON for reproducibility. Deterministic given config + seed.
ExperimentOutcome run_experiment(const nlohmann::json& config,
                                 const std::filesystem::path& outdir);

}  // namespace singlab
