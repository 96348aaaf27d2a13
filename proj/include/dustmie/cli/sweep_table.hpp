#pragma once

// Rectangular result table with a units row and a metadata block, written
// as CSV or JSON.

#include <string>
#include <utility>
#include <vector>

#include "dustmie/cli/config.hpp"

namespace dustmie::cli {

struct Column {
    std::string name;
    std::string unit;  // "1" for dimensionless
};

struct SweepTable {
    std::string command;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> warnings;
    ConfigMap config;

    /// Throws std::logic_error when the row width does not match the columns.
    void add_row(std::vector<double> row);
};

/// Scientific notation, 12 significant digits, '.' decimal separator.
std::string format_number(double value);

/// "fnv1a64:" + 16 hex digits of the canonical config text.
std::string config_hash(const ConfigMap& config);

std::string to_csv(const SweepTable& table);
std::string to_json(const SweepTable& table);
std::string render(const SweepTable& table, OutputFormat format);

}  // namespace dustmie::cli
