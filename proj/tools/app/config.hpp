#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace polylab::app {

// start:stop:count, both endpoints included
struct Grid {
    double start = 0.0, stop = 0.0;
    long count = 1;

    static Grid parse(const std::string& text);
    static Grid from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    std::vector<double> values() const;
    std::vector<int> int_values() const;  // rounded, duplicates rejected
    void validate(const std::string& name) const;
};

struct ParamDef {
    enum class Kind { number, integer, text, flag };
    std::string name;
    Kind kind = Kind::number;
    nlohmann::json def;
    std::string help;
    std::vector<std::string> choices;  // text only; empty means free
};

struct GridDef {
    std::string name;
    Grid def;
    std::string help;
};

struct ModelSchema {
    std::string name;
    std::string help;
    std::vector<ParamDef> params;
    std::vector<GridDef> grids;
};

const std::vector<ModelSchema>& schemas();
const ModelSchema& schema(const std::string& model);

struct RunConfig {
    std::string subcommand;
    nlohmann::json params = nlohmann::json::object();  // every schema key, defaults filled in
    std::map<std::string, Grid> grids;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string out_dir = "out";
    std::string format = "csv";

    double num(const std::string& k) const;
    long integer(const std::string& k) const;
    std::string text(const std::string& k) const;
    bool flag(const std::string& k) const;
    std::vector<double> grid(const std::string& k) const { return grids.at(k).values(); }
    std::vector<int> int_grid(const std::string& k) const { return grids.at(k).int_values(); }

    nlohmann::json to_json() const;
};

// Defaults for `model`; unknown model is a ConfigError.
RunConfig default_config(const std::string& model);
// Parses a config document. Unknown keys anywhere are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig config_from_file(const std::string& path);
// Flag values as typed on the command line; names are schema names.
void apply_param(RunConfig& cfg, const std::string& name, const std::string& value);
void apply_grid(RunConfig& cfg, const std::string& name, const std::string& value);
void validate(const RunConfig& cfg);

}  // namespace polylab::app
