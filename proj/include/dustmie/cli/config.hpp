#pragma once

// Run configuration for the command-line front end.
//
// Settings live in a flat sectioned key/value text ("[wave]" then
// "frequency_hz = 3e11"). Values are kept as the strings the user wrote so
// that echoing the effective configuration into an output file and reading
// it back reproduces the run exactly.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dustmie/channel.hpp"
#include "dustmie/charged_mie.hpp"
#include "dustmie/dust_field.hpp"

namespace dustmie::cli {

enum class Command { qext, spectrum, attenuation, pathloss };
enum class OutputFormat { csv, json };
enum class Spacing { linear, log };
enum class UnitsSelection { physical, paper, both };

std::string_view command_name(Command c);

/// section -> key -> raw value, sorted, which is also the canonical order.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

/// Parses configuration text. Accepts plain sectioned key/value files and
/// the files this tool writes: CSV tables (config lines prefixed with "#| ")
/// and JSON tables (the metadata.config object). Unknown keys are errors.
ConfigMap parse_config_text(std::string_view text);
ConfigMap load_config_file(const std::filesystem::path& path);

/// "section.key=value".
void apply_assignment(ConfigMap& config, std::string_view assignment);
void set_value(ConfigMap& config, const std::string& section, const std::string& key, std::string value);

/// Fills every unset key that has a default for this command. Sweep and
/// group defaults follow the chosen sweep variable and grouping.
ConfigMap with_defaults(ConfigMap config, Command command);

/// "[section]\nkey = value\n..." in canonical order.
std::string canonical_text(const ConfigMap& config);

std::uint64_t fnv1a64(std::string_view bytes);

struct SweepSpec {
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
    Spacing spacing = Spacing::linear;

    std::vector<double> grid() const;
};

struct GroupSpec {
    std::string by;
    std::vector<double> values;
};

struct RunConfig {
    Command command = Command::qext;
    ConfigMap effective;

    mie::WaveSpec wave = mie::WaveSpec::from_frequency(3e11);
    mie::ParticleState particle{};
    dust::DustLayerModel layer{};
    std::optional<double> n0_per_m3;
    double dust_altitude_m = 100.0;
    channel::LinkGeometry geometry{};
    bool link_parameters_set = false;

    std::optional<SweepSpec> sweep;
    std::optional<GroupSpec> groups;

    mie::ChargeMode charge_mode = mie::ChargeMode::full;
    UnitsSelection units = UnitsSelection::physical;
    OutputFormat format = OutputFormat::csv;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 1;
    double quad_rel_tol = 1e-6;
    std::optional<std::filesystem::path> absorption_profile;
};

/// Applies defaults, parses and validates. Throws ConfigError.
RunConfig resolve_run_config(const ConfigMap& config, Command command);

/// "2-0.025i", "1.33", "1.5+0.1i".
mie::ComplexValue parse_complex(std::string_view text);

}  // namespace dustmie::cli
