#include "dustmie/cli/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "dustmie/error.hpp"

namespace dustmie::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"wave", {"frequency_hz", "wavelength_m"}},
        {"particle", {"radius_m", "electrons", "temperature_k", "refractive_index"}},
        {"dust", {"n0_per_m3", "altitude_m"}},
        {"link",
         {"distance_m", "reference_distance_m", "tx_altitude_m", "elevation_rad", "scenario", "path_loss_exponent",
          "shadow_sigma_db"}},
        {"sweep", {"variable", "start", "stop", "count", "spacing"}},
        {"groups", {"by", "values"}},
        {"run", {"mode", "units", "format", "seed", "trials"}},
        {"numerics", {"rel_tol"}},
        {"absorption", {"profile"}},
    };
    return keys;
}

struct SweepDefault {
    const char* variable;
    const char* start;
    const char* stop;
    const char* count;
    const char* spacing;
};

struct GroupDefault {
    const char* by;
    const char* values;
};

std::vector<SweepDefault> sweep_defaults(Command c) {
    switch (c) {
        case Command::qext:
            return {{"x", "0.02", "2", "200", "log"}, {"frequency_hz", "1e11", "1e13", "200", "log"}};
        case Command::spectrum:
            return {{"radius_mm", "1e-4", "10", "2000", "log"}};
        case Command::attenuation:
            return {{"altitude_m", "0", "200", "41", "linear"}, {"frequency_hz", "1e11", "1e13", "41", "log"}};
        case Command::pathloss:
            break;
    }
    return {};
}

std::vector<GroupDefault> group_defaults(Command c) {
    switch (c) {
        case Command::qext:
            return {{"electrons", "0,10,100"}, {"radius_m", "1e-5,2e-5,5e-5"}};
        case Command::spectrum:
            return {{"altitude_m", "100,150,200"}};
        case Command::attenuation:
            return {{"electrons", "0,1000,1000000"}};
        case Command::pathloss:
            break;
    }
    return {};
}

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& value,
                            const std::string& why) {
    throw ConfigError(section + "." + key + " = '" + value + "': " + why);
}

const std::string* find(const ConfigMap& config, const std::string& section, const std::string& key) {
    auto s = config.find(section);
    if (s == config.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

double to_double(std::string_view text, bool* ok) {
    std::string t = trim(text);
    std::string_view v = t;
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    *ok = ec == std::errc() && ptr == v.data() + v.size() && !v.empty() && std::isfinite(out);
    return out;
}

double number(const ConfigMap& config, const std::string& section, const std::string& key) {
    const std::string* raw = find(config, section, key);
    if (raw == nullptr) throw ConfigError(section + "." + key + " is required");
    bool ok = false;
    double v = to_double(*raw, &ok);
    if (!ok) bad_value(section, key, *raw, "not a finite number");
    return v;
}

std::optional<double> optional_number(const ConfigMap& config, const std::string& section, const std::string& key) {
    if (find(config, section, key) == nullptr) return std::nullopt;
    return number(config, section, key);
}

std::uint64_t whole(double v, const std::string& section, const std::string& key, const std::string& raw) {
    if (v < 0.0 || v != std::floor(v) || v > 9.0e18) bad_value(section, key, raw, "not a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

std::vector<double> number_list(const std::string& section, const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        bool ok = false;
        double v = to_double(item, &ok);
        if (!ok) bad_value(section, key, raw, "list entries must be finite numbers");
        out.push_back(v);
    }
    if (out.empty()) bad_value(section, key, raw, "empty list");
    return out;
}

std::string word(const ConfigMap& config, const std::string& section, const std::string& key,
                 std::initializer_list<const char*> allowed) {
    const std::string* raw = find(config, section, key);
    if (raw == nullptr) throw ConfigError(section + "." + key + " is required");
    std::string v = lower(trim(*raw));
    for (const char* a : allowed) {
        if (v == a) return v;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    bad_value(section, key, *raw, "expected one of " + list);
}

ConfigMap from_ptree(const boost::property_tree::ptree& tree) {
    ConfigMap out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("entry '" + section + "' is outside any [section]");
        for (const auto& [key, value] : body) {
            set_value(out, section, key, value.get_value<std::string>());
        }
    }
    return out;
}

ConfigMap from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    const auto* cfg = doc.contains("metadata") ? &doc["metadata"] : nullptr;
    if (cfg == nullptr || !cfg->contains("config") || !(*cfg)["config"].is_object()) {
        throw ConfigError("JSON input has no metadata.config object");
    }
    ConfigMap out;
    for (const auto& [section, body] : (*cfg)["config"].items()) {
        if (!body.is_object()) throw ConfigError("metadata.config." + section + " is not an object");
        for (const auto& [key, value] : body.items()) {
            if (!value.is_string()) throw ConfigError("metadata.config." + section + "." + key + " is not a string");
            set_value(out, section, key, value.get<std::string>());
        }
    }
    return out;
}

}  // namespace

std::string_view command_name(Command c) {
    switch (c) {
        case Command::qext: return "qext";
        case Command::spectrum: return "spectrum";
        case Command::attenuation: return "attenuation";
        case Command::pathloss: return "pathloss";
    }
    return "?";
}

void set_value(ConfigMap& config, const std::string& section, const std::string& key, std::string value) {
    auto s = schema().find(section);
    if (s == schema().end()) throw ConfigError("unknown config section [" + section + "]");
    if (s->second.count(key) == 0) throw ConfigError("unknown config key " + section + "." + key);
    value = trim(value);
    if (value.empty()) throw ConfigError(section + "." + key + " has an empty value");
    config[section][key] = std::move(value);
}

void apply_assignment(ConfigMap& config, std::string_view assignment) {
    auto eq = assignment.find('=');
    auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw ConfigError("expected section.key=value, got '" + std::string(assignment) + "'");
    }
    set_value(config, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
              std::string(assignment.substr(eq + 1)));
}

ConfigMap parse_config_text(std::string_view text) {
    std::string head = trim(text.substr(0, std::min<std::size_t>(text.size(), 64)));
    if (!head.empty() && head.front() == '{') return from_json(text);

    // Tables written by this tool carry their configuration in "#| " lines.
    std::string ini;
    bool embedded = false;
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("#|", 0) == 0) {
            if (!embedded) ini.clear();
            embedded = true;
            std::string_view body(line);
            body.remove_prefix(2);
            if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            ini.append(body).push_back('\n');
        } else if (!embedded) {
            ini.append(line).push_back('\n');
        }
    }

    boost::property_tree::ptree tree;
    std::istringstream in(ini);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return from_ptree(tree);
}

ConfigMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

ConfigMap with_defaults(ConfigMap config, Command command) {
    auto fill = [&config](const std::string& section, const std::string& key, const char* value) {
        if (find(config, section, key) == nullptr) config[section][key] = value;
    };

    if (find(config, "wave", "wavelength_m") == nullptr) fill("wave", "frequency_hz", "3e11");
    fill("particle", "radius_m", "2e-5");
    fill("particle", "electrons", "10");
    fill("particle", "temperature_k", "300");
    fill("particle", "refractive_index", "2-0.025i");
    fill("dust", "altitude_m", "100");
    fill("link", "distance_m", "1000");
    fill("link", "reference_distance_m", "10");
    fill("link", "tx_altitude_m", "10000");
    fill("link", "elevation_rad", "0");
    fill("link", "scenario", "los");
    fill("run", "mode", "full");
    fill("run", "units", "physical");
    fill("run", "format", "csv");
    fill("run", "trials", "1");
    fill("numerics", "rel_tol", "1e-6");

    auto sweeps = sweep_defaults(command);
    if (!sweeps.empty()) {
        const std::string* chosen = find(config, "sweep", "variable");
        const SweepDefault* d = &sweeps.front();
        if (chosen != nullptr) {
            auto it = std::find_if(sweeps.begin(), sweeps.end(),
                                   [&](const SweepDefault& s) { return *chosen == s.variable; });
            if (it == sweeps.end()) {
                bad_value("sweep", "variable", *chosen,
                          std::string("not a sweep variable of ") + std::string(command_name(command)));
            }
            d = &*it;
        }
        fill("sweep", "variable", d->variable);
        fill("sweep", "start", d->start);
        fill("sweep", "stop", d->stop);
        fill("sweep", "count", d->count);
        fill("sweep", "spacing", d->spacing);
    }

    auto groups = group_defaults(command);
    if (!groups.empty()) {
        const std::string* chosen = find(config, "groups", "by");
        const GroupDefault* d = &groups.front();
        if (chosen != nullptr) {
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const GroupDefault& g) { return *chosen == g.by; });
            if (it == groups.end()) {
                bad_value("groups", "by", *chosen,
                          std::string("not a grouping of ") + std::string(command_name(command)));
            }
            d = &*it;
        }
        fill("groups", "by", d->by);
        fill("groups", "values", d->values);
    }
    return config;
}

std::string canonical_text(const ConfigMap& config) {
    std::string out;
    for (const auto& [section, body] : config) {
        out += "[" + section + "]\n";
        for (const auto& [key, value] : body) out += key + " = " + value + "\n";
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> out(count);
    const double last = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / last;
        if (spacing == Spacing::log) {
            out[i] = std::exp(std::log(start) + (std::log(stop) - std::log(start)) * t);
        } else {
            out[i] = start + (stop - start) * t;
        }
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

mie::ComplexValue parse_complex(std::string_view text) {
    static const std::regex pattern(
        R"(^\s*\(?\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(?:([+-])\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij])?\s*\)?\s*$)");
    std::string s(text);
    std::smatch m;
    if (!std::regex_match(s, m, pattern)) throw ConfigError("cannot parse complex number '" + s + "'");
    bool ok = false;
    double re = to_double(m[1].str(), &ok);
    double im = 0.0;
    if (m[2].matched) {
        im = m[3].matched ? to_double(m[3].str(), &ok) : 1.0;
        if (m[2].str() == "-") im = -im;
    }
    if (!ok) throw ConfigError("cannot parse complex number '" + s + "'");
    return {re, im};
}

RunConfig resolve_run_config(const ConfigMap& config, Command command) {
    RunConfig rc;
    rc.command = command;
    rc.effective = with_defaults(config, command);
    const ConfigMap& c = rc.effective;

    auto f = optional_number(c, "wave", "frequency_hz");
    auto lambda = optional_number(c, "wave", "wavelength_m");
    if (f && lambda) throw ConfigError("set either wave.frequency_hz or wave.wavelength_m, not both");
    if (f) {
        if (*f <= 0.0) bad_value("wave", "frequency_hz", *find(c, "wave", "frequency_hz"), "must be positive");
        rc.wave = mie::WaveSpec::from_frequency(*f);
    } else {
        if (*lambda <= 0.0) bad_value("wave", "wavelength_m", *find(c, "wave", "wavelength_m"), "must be positive");
        rc.wave = mie::WaveSpec::from_wavelength(*lambda);
    }

    rc.particle.radius_m = number(c, "particle", "radius_m");
    rc.particle.electrons =
        whole(number(c, "particle", "electrons"), "particle", "electrons", *find(c, "particle", "electrons"));
    rc.particle.temperature_k = number(c, "particle", "temperature_k");
    rc.particle.refractive_index = parse_complex(*find(c, "particle", "refractive_index"));
    try {
        rc.particle.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("[particle] ") + e.what());
    }

    rc.n0_per_m3 = optional_number(c, "dust", "n0_per_m3");
    if (rc.n0_per_m3 && *rc.n0_per_m3 <= 0.0) {
        bad_value("dust", "n0_per_m3", *find(c, "dust", "n0_per_m3"), "must be positive");
    }
    rc.layer.n0_per_m3 = rc.n0_per_m3.value_or(0.0);
    rc.dust_altitude_m = number(c, "dust", "altitude_m");
    if (rc.dust_altitude_m < 0.0) bad_value("dust", "altitude_m", *find(c, "dust", "altitude_m"), "must be >= 0");

    rc.geometry.d_m = number(c, "link", "distance_m");
    rc.geometry.d0_m = number(c, "link", "reference_distance_m");
    rc.geometry.h0_m = number(c, "link", "tx_altitude_m");
    rc.geometry.theta_rad = number(c, "link", "elevation_rad");
    rc.geometry.scenario = word(c, "link", "scenario", {"los", "nlos"}) == "los" ? channel::Scenario::los
                                                                                 : channel::Scenario::nlos;
    auto n_i = optional_number(c, "link", "path_loss_exponent");
    auto sigma_i = optional_number(c, "link", "shadow_sigma_db");
    rc.link_parameters_set = n_i.has_value() && sigma_i.has_value();
    if (n_i) rc.geometry.path_loss_exponent = *n_i;
    if (sigma_i) rc.geometry.shadow_sigma_db = *sigma_i;

    if (command == Command::pathloss) {
        if (!rc.link_parameters_set) {
            throw ConfigError("pathloss needs link.path_loss_exponent and link.shadow_sigma_db (no defaults exist)");
        }
        if (!rc.n0_per_m3) throw ConfigError("pathloss needs dust.n0_per_m3 (no default exists)");
        rc.geometry.validate();
        if (c.count("sweep") || c.count("groups")) throw ConfigError("pathloss takes no [sweep] or [groups]");
    }

    if (c.count("sweep")) {
        SweepSpec s;
        s.variable = *find(c, "sweep", "variable");
        s.start = number(c, "sweep", "start");
        s.stop = number(c, "sweep", "stop");
        const std::string& raw_count = *find(c, "sweep", "count");
        const double count = number(c, "sweep", "count");
        if (count < 2.0 || count > 1e6 || count != std::floor(count)) {
            bad_value("sweep", "count", raw_count, "must be an integer in [2, 1000000]");
        }
        s.count = static_cast<std::size_t>(count);
        s.spacing = word(c, "sweep", "spacing", {"linear", "log"}) == "log" ? Spacing::log : Spacing::linear;
        if (s.spacing == Spacing::log && (s.start <= 0.0 || s.stop <= 0.0)) {
            throw ConfigError("log sweep needs positive sweep.start and sweep.stop");
        }
        if (s.start == s.stop) throw ConfigError("sweep.start equals sweep.stop");
        const bool nonneg = s.start >= 0.0 && s.stop >= 0.0;
        const bool positive = s.start > 0.0 && s.stop > 0.0;
        if ((s.variable == "altitude_m" && !nonneg) || (s.variable != "altitude_m" && !positive)) {
            throw ConfigError("sweep range of " + s.variable + " is outside its physical domain");
        }
        rc.sweep = s;
    }

    if (c.count("groups")) {
        GroupSpec g;
        g.by = *find(c, "groups", "by");
        const std::string& raw = *find(c, "groups", "values");
        g.values = number_list("groups", "values", raw);
        for (double v : g.values) {
            if (g.by == "electrons") whole(v, "groups", "values", raw);
            if (g.by == "altitude_m" && v < 0.0) bad_value("groups", "values", raw, "altitudes must be >= 0");
            if (g.by == "radius_m" && (v < mie::kMinRadius || v > mie::kMaxRadius)) {
                bad_value("groups", "values", raw, "radii must lie in [1e-9, 1e-2] m");
            }
        }
        if (rc.sweep && rc.sweep->variable == "x" && g.by == "radius_m") {
            throw ConfigError("an x sweep fixes the radius; group by electrons or sweep frequency_hz");
        }
        rc.groups = g;
    }

    rc.charge_mode = word(c, "run", "mode", {"full", "approx"}) == "full" ? mie::ChargeMode::full
                                                                          : mie::ChargeMode::approx;
    const std::string units = word(c, "run", "units", {"physical", "paper", "both"});
    rc.units = units == "physical" ? UnitsSelection::physical
               : units == "paper"  ? UnitsSelection::paper
                                   : UnitsSelection::both;
    if (rc.units == UnitsSelection::both && command != Command::attenuation) {
        throw ConfigError("run.units = both is only available for attenuation");
    }
    rc.format = word(c, "run", "format", {"csv", "json"}) == "csv" ? OutputFormat::csv : OutputFormat::json;
    if (const std::string* raw = find(c, "run", "seed")) {
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), seed);
        if (ec != std::errc() || ptr != raw->data() + raw->size()) {
            bad_value("run", "seed", *raw, "not an unsigned 64-bit integer");
        }
        rc.seed = seed;
    }
    const double trials = number(c, "run", "trials");
    if (trials < 1.0 || trials > 1e7 || trials != std::floor(trials)) {
        bad_value("run", "trials", *find(c, "run", "trials"), "must be an integer in [1, 10000000]");
    }
    rc.trials = static_cast<std::size_t>(trials);
    if (rc.trials > 1 && !rc.seed) throw ConfigError("Monte-Carlo trials need a seed (--seed)");

    rc.quad_rel_tol = number(c, "numerics", "rel_tol");
    if (!(rc.quad_rel_tol > 0.0 && rc.quad_rel_tol <= 1e-2)) {
        bad_value("numerics", "rel_tol", *find(c, "numerics", "rel_tol"), "must lie in (0, 1e-2]");
    }
    if (const std::string* p = find(c, "absorption", "profile")) rc.absorption_profile = std::filesystem::path(*p);
    return rc;
}

}  // namespace dustmie::cli
