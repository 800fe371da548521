#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace polylab::app {

// Shortest round-trip decimal, falling back to 12 significant digits when
// the shortest form is longer.
std::string format_double(double v);

// Numeric table; flags are stored as 0/1.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

// Report JSON with every double routed through format_double, so reports are
// as reproducible as the CSV files.
std::string dump_json(const nlohmann::json& j);

std::string sha256_hex(const std::string& bytes);

// write to a sibling temp file, then rename over the target
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace polylab::app
