#pragma once

// Link-level propagation through a dust layer: the dust attenuation
// coefficient k_dust(h), the slant-path loss integral and the log-distance
// path-loss model with shadow fading.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "dustmie/charged_mie.hpp"
#include "dustmie/dust_field.hpp"
#include "dustmie/quadrature.hpp"

namespace dustmie::channel {

enum class Scenario { los, nlos };

/// How the size integral of k_dust is weighted.
///  physical:       4.343e3 * int N_d(r) C_ext(r) dr, C_ext in m^2, r in mm.
///                  Np/m to dB/km is exact, the result is in dB/km.
///  paper_literal:  4.343e3 * int N_d(r) Q_ext(r) dr with dimensionless
///                  Q_ext, reproduced for comparison only.
enum class UnitsMode { physical, paper_literal };

/// Np -> dB (10 log10 e) times 1e3 m/km.
inline constexpr double kDustPrefactor = 4.343e3;

struct LinkGeometry {
    double h0_m = 10000.0;
    double theta_rad = 0.0;
    double d_m = 1000.0;
    double d0_m = 10.0;
    Scenario scenario = Scenario::los;
    double path_loss_exponent = 2.0;
    double shadow_sigma_db = 0.0;

    /// Throws ConfigError on d < d0, d0 <= 0, n_i <= 0, sigma_i < 0, theta
    /// outside [0, pi/2] or negative altitude.
    void validate() const;
};

/// Molecular absorption k_abs(h) in dB/km: piecewise-linear between the
/// tabulated altitudes, flat beyond them, zero when empty.
class AbsorptionProfile {
public:
    AbsorptionProfile() = default;
    explicit AbsorptionProfile(std::vector<std::pair<double, double>> points);

    /// Two numeric columns per line (altitude_m, dB_per_km). Blank lines and
    /// lines starting with '#' are ignored; commas count as whitespace.
    static AbsorptionProfile parse(std::string_view text);
    static AbsorptionProfile load(const std::filesystem::path& path);

    double at(double altitude_m) const;
    bool empty() const { return points_.empty(); }
    const std::vector<std::pair<double, double>>& points() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

struct AttenuationSample {
    double altitude_m;
    double k_abs_db_per_km;
    double k_dust_db_per_km;
};

using AttenuationProfile = std::vector<AttenuationSample>;

struct DustOptions {
    UnitsMode units = UnitsMode::physical;
    mie::ChargeMode charge = mie::ChargeMode::full;
    quad::SimpsonOptions quadrature{};
};

/// Single shadow-fading draw: none, or one N(0, sigma^2) sample from a
/// seeded mt19937_64.
struct ShadowFading {
    std::optional<std::uint64_t> seed;

    static ShadowFading none() { return {}; }
    static ShadowFading seeded(std::uint64_t s) { return {s}; }
};

struct PathLossResult {
    double fspl_db = 0.0;
    double distance_term_db = 0.0;
    double shadow_db = 0.0;
    double dust_loss_db = 0.0;
    double total_db = 0.0;
    std::optional<std::uint64_t> seed;
};

/// k_dust(h) in dB/km. The template's radius is ignored; refractive index,
/// charge and temperature apply to every particle size in the integral.
double dust_attenuation_coefficient(double altitude_m, const mie::WaveSpec& wave, const dust::DustLayerModel& layer,
                                    const mie::ParticleState& particle_template, const DustOptions& options = {});

/// The N0-free size integrand in log-size coordinates, t = ln(r / mm):
/// p(e^t, h) X(e^t) e^t. Exposed for brute-force cross-checks.
double dust_size_integrand(double radius_mm, double altitude_m, const mie::WaveSpec& wave,
                           const dust::DustLayerModel& layer, const mie::ParticleState& particle_template,
                           const DustOptions& options = {});

AttenuationProfile attenuation_profile(const std::vector<double>& altitudes_m, const mie::WaveSpec& wave,
                                       const dust::DustLayerModel& layer,
                                       const mie::ParticleState& particle_template,
                                       const AbsorptionProfile& absorption = {}, const DustOptions& options = {});

/// gamma_dust = int_0^d [k_abs + k_dust](h0 + s sin(theta)) ds, in dB.
double slant_dust_loss(const LinkGeometry& geometry, const mie::WaveSpec& wave, const dust::DustLayerModel& layer,
                       const mie::ParticleState& particle_template, const AbsorptionProfile& absorption = {},
                       const DustOptions& options = {});

/// 20 log10(4 pi f d0 / c).
double reference_loss_db(double frequency_hz, double d0_m);

/// One N(0, sigma^2) draw from mt19937_64(seed); 0 when sigma == 0.
double shadow_draw(double sigma_db, std::uint64_t seed);

PathLossResult path_loss(const LinkGeometry& geometry, const mie::WaveSpec& wave, const dust::DustLayerModel& layer,
                         const mie::ParticleState& particle_template, ShadowFading shadow,
                         const AbsorptionProfile& absorption = {}, const DustOptions& options = {});

/// Path loss from precomputed dust loss; used by Monte-Carlo drivers that
/// resample only the shadowing term.
PathLossResult assemble_path_loss(const LinkGeometry& geometry, double frequency_hz, double dust_loss_db,
                                  ShadowFading shadow);

}  // namespace dustmie::channel
