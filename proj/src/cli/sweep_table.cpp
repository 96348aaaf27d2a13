#include "dustmie/cli/sweep_table.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace dustmie::cli {

void SweepTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width does not match its columns");
    rows.push_back(std::move(row));
}

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific, 11);
    if (ec != std::errc()) throw std::logic_error("number formatting failed");
    return std::string(buf.data(), ptr);
}

std::string config_hash(const ConfigMap& config) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_text(config))));
    return "fnv1a64:" + std::string(buf.data());
}

std::string to_csv(const SweepTable& table) {
    std::string out = "# dustmie " + table.command + "\n";
    out += "# config_hash = " + config_hash(table.config) + "\n";
    for (const auto& [key, value] : table.metadata) out += "# " + key + " = " + value + "\n";
    for (const auto& w : table.warnings) out += "# warning = " + w + "\n";
    const std::string cfg = canonical_text(table.config);
    std::size_t pos = 0;
    while (pos < cfg.size()) {
        std::size_t nl = cfg.find('\n', pos);
        out += "#| " + cfg.substr(pos, nl - pos) + "\n";
        pos = nl + 1;
    }

    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    std::vector<std::string> names, units;
    for (const auto& c : table.columns) {
        names.push_back(c.name);
        units.push_back(c.unit);
    }
    line(names);
    line(units);
    for (const auto& row : table.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double v : row) cells.push_back(format_number(v));
        line(cells);
    }
    return out;
}

std::string to_json(const SweepTable& table) {
    using nlohmann::ordered_json;
    ordered_json meta = ordered_json::object();
    meta["config_hash"] = config_hash(table.config);
    for (const auto& [key, value] : table.metadata) meta[key] = value;
    meta["warnings"] = table.warnings;
    ordered_json cfg = ordered_json::object();
    for (const auto& [section, body] : table.config) {
        for (const auto& [key, value] : body) cfg[section][key] = value;
    }
    meta["config"] = cfg;

    ordered_json columns = ordered_json::array();
    for (const auto& c : table.columns) columns.push_back({{"name", c.name}, {"unit", c.unit}});

    // Values go through the same 12-digit rounding as the CSV writer.
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json r = ordered_json::array();
        for (double v : row) {
            const std::string text = format_number(v);
            double rounded = 0.0;
            std::from_chars(text.data(), text.data() + text.size(), rounded);
            r.push_back(rounded);
        }
        rows.push_back(std::move(r));
    }

    ordered_json doc;
    doc["command"] = table.command;
    doc["metadata"] = std::move(meta);
    doc["columns"] = std::move(columns);
    doc["rows"] = std::move(rows);
    return doc.dump(1) + "\n";
}

std::string render(const SweepTable& table, OutputFormat format) {
    return format == OutputFormat::csv ? to_csv(table) : to_json(table);
}

}  // namespace dustmie::cli
