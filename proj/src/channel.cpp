#include "dustmie/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "dustmie/constants.hpp"
#include "dustmie/error.hpp"

namespace dustmie::channel {
namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

}  // namespace

void LinkGeometry::validate() const {
    require(std::isfinite(d0_m) && d0_m > 0.0, "reference distance d0 must be > 0");
    require(std::isfinite(d_m) && d_m >= d0_m, "distance d must be >= reference distance d0");
    require(std::isfinite(path_loss_exponent) && path_loss_exponent > 0.0, "path-loss exponent must be > 0");
    require(std::isfinite(shadow_sigma_db) && shadow_sigma_db >= 0.0, "shadow-fading sigma must be >= 0 dB");
    require(std::isfinite(theta_rad) && theta_rad >= 0.0 && theta_rad <= 0.5 * kPi,
            "elevation angle must lie in [0, pi/2]");
    require(std::isfinite(h0_m) && h0_m >= 0.0, "transmitter altitude must be >= 0 m");
}

AbsorptionProfile::AbsorptionProfile(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    for (const auto& [h, k] : points_) {
        require(std::isfinite(h) && std::isfinite(k), "absorption profile values must be finite");
        require(k >= 0.0, "absorption coefficient must be >= 0 dB/km");
    }
    std::sort(points_.begin(), points_.end());
    for (std::size_t i = 1; i < points_.size(); ++i) {
        require(points_[i].first > points_[i - 1].first, "absorption profile altitudes must be distinct");
    }
}

AbsorptionProfile AbsorptionProfile::parse(std::string_view text) {
    std::vector<std::pair<double, double>> points;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        double h = 0.0;
        double k = 0.0;
        std::string extra;
        if (!(fields >> h >> k) || (fields >> extra)) {
            throw ConfigError("absorption profile line " + std::to_string(line_no) +
                              ": expected two numeric columns (altitude_m, dB_per_km)");
        }
        points.emplace_back(h, k);
    }
    return AbsorptionProfile(std::move(points));
}

AbsorptionProfile AbsorptionProfile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open absorption profile " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

double AbsorptionProfile::at(double altitude_m) const {
    if (points_.empty()) {
        return 0.0;
    }
    if (altitude_m <= points_.front().first) {
        return points_.front().second;
    }
    if (altitude_m >= points_.back().first) {
        return points_.back().second;
    }
    const auto upper = std::upper_bound(points_.begin(), points_.end(), altitude_m,
                                        [](double h, const auto& p) { return h < p.first; });
    const auto lower = upper - 1;
    const double t = (altitude_m - lower->first) / (upper->first - lower->first);
    return lower->second + t * (upper->second - lower->second);
}

double dust_size_integrand(double radius_mm, double altitude_m, const mie::WaveSpec& wave,
                           const dust::DustLayerModel& layer, const mie::ParticleState& particle_template,
                           const DustOptions& options) {
    mie::ParticleState particle = particle_template;
    particle.radius_m = std::clamp(radius_mm * 1e-3, mie::kMinRadius, mie::kMaxRadius);
    const auto result = mie::extinction_efficiency(particle, wave, options.charge);
    const double weight = options.units == UnitsMode::physical ? result.c_ext : result.q_ext;
    return dust::size_pdf(radius_mm, altitude_m, layer) * weight;
}

double dust_attenuation_coefficient(double altitude_m, const mie::WaveSpec& wave, const dust::DustLayerModel& layer,
                                    const mie::ParticleState& particle_template, const DustOptions& options) {
    layer.validate();
    if (layer.n0_per_m3 == 0.0) {
        return 0.0;
    }
    const auto support = dust::integration_support(altitude_m, layer);
    auto integrand = [&](double log_r) {
        const double r = std::clamp(std::exp(log_r), support.lower_mm, support.upper_mm);
        return dust_size_integrand(r, altitude_m, wave, layer, particle_template, options) * r;
    };
    const auto integral =
        quad::adaptive_simpson(integrand, std::log(support.lower_mm), std::log(support.upper_mm), options.quadrature);
    return kDustPrefactor * layer.n0_per_m3 * integral.value;
}

AttenuationProfile attenuation_profile(const std::vector<double>& altitudes_m, const mie::WaveSpec& wave,
                                       const dust::DustLayerModel& layer,
                                       const mie::ParticleState& particle_template,
                                       const AbsorptionProfile& absorption, const DustOptions& options) {
    AttenuationProfile out;
    out.reserve(altitudes_m.size());
    for (double h : altitudes_m) {
        out.push_back({h, absorption.at(h), dust_attenuation_coefficient(h, wave, layer, particle_template, options)});
    }
    return out;
}

double slant_dust_loss(const LinkGeometry& geometry, const mie::WaveSpec& wave, const dust::DustLayerModel& layer,
                       const mie::ParticleState& particle_template, const AbsorptionProfile& absorption,
                       const DustOptions& options) {
    geometry.validate();
    const double rise = std::sin(geometry.theta_rad);
    auto coefficient = [&](double altitude_m) {
        return absorption.at(altitude_m) +
               dust_attenuation_coefficient(altitude_m, wave, layer, particle_template, options);
    };
    if (rise == 0.0) {
        return geometry.d_m * coefficient(geometry.h0_m) / 1000.0;
    }
    auto integrand = [&](double s) { return coefficient(geometry.h0_m + s * rise); };
    const auto integral = quad::adaptive_simpson(integrand, 0.0, geometry.d_m, options.quadrature);
    return integral.value / 1000.0;
}

double reference_loss_db(double frequency_hz, double d0_m) {
    return 20.0 * std::log10(4.0 * kPi * frequency_hz * d0_m / PhysicalConstants::speed_of_light);
}

double shadow_draw(double sigma_db, std::uint64_t seed) {
    if (sigma_db == 0.0) {
        return 0.0;
    }
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, sigma_db);
    return normal(engine);
}

PathLossResult assemble_path_loss(const LinkGeometry& geometry, double frequency_hz, double dust_loss_db,
                                  ShadowFading shadow) {
    geometry.validate();
    PathLossResult out;
    out.fspl_db = reference_loss_db(frequency_hz, geometry.d0_m);
    out.distance_term_db = 10.0 * geometry.path_loss_exponent * std::log10(geometry.d_m / geometry.d0_m);
    out.shadow_db = shadow.seed ? shadow_draw(geometry.shadow_sigma_db, *shadow.seed) : 0.0;
    out.dust_loss_db = dust_loss_db;
    out.total_db = out.fspl_db + out.distance_term_db + out.shadow_db + out.dust_loss_db;
    out.seed = shadow.seed;
    return out;
}

PathLossResult path_loss(const LinkGeometry& geometry, const mie::WaveSpec& wave, const dust::DustLayerModel& layer,
                         const mie::ParticleState& particle_template, ShadowFading shadow,
                         const AbsorptionProfile& absorption, const DustOptions& options) {
    geometry.validate();
    const double dust_db = slant_dust_loss(geometry, wave, layer, particle_template, absorption, options);
    return assemble_path_loss(geometry, wave.frequency(), dust_db, shadow);
}

}  // namespace dustmie::channel
