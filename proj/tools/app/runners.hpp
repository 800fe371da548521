#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace polylab::app {

struct OutputFile {
    std::string name;   // relative to out_dir
    std::string bytes;
};

struct RunOutput {
    std::vector<OutputFile> files;
};

// Runs one configuration in memory. Throws ConfigError or NumericError.
RunOutput run_model(const RunConfig& cfg);

// Writes every output plus manifest.json (last, atomically). Returns the manifest.
nlohmann::json write_outputs(const RunConfig& cfg, const RunOutput& out, double wall_seconds);

// Recomputes checksums of the files listed in a manifest; returns mismatching names.
std::vector<std::string> verify_manifest(const std::string& manifest_path);

std::string tool_version();

}  // namespace polylab::app
