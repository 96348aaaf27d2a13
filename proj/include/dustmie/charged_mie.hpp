#pragma once

// Extended Mie kernel for electrically charged spheres.
//
// Surface charge enters through a single complex coefficient g_e that
// modifies the boundary conditions; for g_e = 0 the coefficients reduce to
// the conventional Mie a_n, b_n.
//
// Refractive index convention: callers pass m = n - i*kappa with kappa >= 0
// for absorbing media. The kernel works with outgoing h_n^(1) waves, where
// absorption carries a positive imaginary part, and conjugates m internally.
// Under this convention Q_ext >= 0 for every passive particle.

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "dustmie/specfun.hpp"

namespace dustmie::mie {

using specfun::ComplexValue;

enum class ChargeMode { full, approx };

/// One dust sphere.
struct ParticleState {
    double radius_m = 20e-6;
    std::uint64_t electrons = 0;
    double temperature_k = 300.0;
    ComplexValue refractive_index{2.0, -0.025};

    /// Throws DomainError unless radius in [1e-9, 1e-2] m and T > 0.
    void validate() const;
};

inline constexpr double kMinRadius = 1e-9;
inline constexpr double kMaxRadius = 1e-2;

/// Frequency, wavelength and angular frequency of the probing wave, always
/// mutually consistent.
class WaveSpec {
public:
    static WaveSpec from_frequency(double frequency_hz);
    static WaveSpec from_wavelength(double wavelength_m);

    double frequency() const { return frequency_; }
    double wavelength() const { return wavelength_; }
    double angular_frequency() const { return omega_; }

private:
    WaveSpec(double f, double lambda, double omega) : frequency_(f), wavelength_(lambda), omega_(omega) {}

    double frequency_;
    double wavelength_;
    double omega_;
};

struct ScatteringPair {
    ComplexValue a;
    ComplexValue b;
};

struct MieResult {
    double q_ext = 0.0;
    double c_ext = 0.0;  // m^2
    int n_max = 0;
    std::vector<ScatteringPair> terms;  // orders 1..n_max
    bool converged = false;
};

/// x = 2 pi r / lambda.
double scale_parameter(double radius_m, double wavelength_m);

/// Phi_e = k_e N_e e / r, volts.
double surface_potential(std::uint64_t electrons, double radius_m);

/// omega_s = sqrt(2 e Phi_e / (m_e r^2)), rad/s.
double surface_plasma_frequency(std::uint64_t electrons, double radius_m);

/// gamma_s = 2 pi k_B T / h_P, rad/s.
double collision_frequency(double temperature_k);

/// Charge coefficient g_e. Exactly zero when omega_s == 0.
ComplexValue charged_coefficient(double x, double omega, double omega_s, double gamma_s, ChargeMode mode);

/// floor(x + 4 x^{1/3} + 2), at least 1.
int truncation_order(double x);

/// Scattering coefficients (a_n, b_n) for a single order n >= 1.
ScatteringPair mie_ab(int n, double x, ComplexValue m, ComplexValue g_e);

/// Coefficients for orders 1..n_terms, sharing one set of recurrences.
std::vector<ScatteringPair> mie_coefficients(int n_terms, double x, ComplexValue m, ComplexValue g_e);

/// Q_ext from the dimensionless inputs alone. Used by extinction_efficiency
/// and directly by sweeps over x. `radius_m` only scales c_ext.
MieResult extinction_efficiency(double x, ComplexValue m, ComplexValue g_e, double radius_m);

/// Full single-particle evaluation.
MieResult extinction_efficiency(const ParticleState& particle, const WaveSpec& wave, ChargeMode mode);

/// g_e for a particle/wave pair; the same value extinction_efficiency uses.
ComplexValue charged_coefficient(const ParticleState& particle, const WaveSpec& wave, ChargeMode mode);

}  // namespace dustmie::mie
