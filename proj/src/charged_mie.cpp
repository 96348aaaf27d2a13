#include "dustmie/charged_mie.hpp"

#include <cmath>
#include <string>

#include "dustmie/constants.hpp"
#include "dustmie/error.hpp"

namespace dustmie::mie {
namespace {

using Real = long double;
using specfun::ExtComplex;

constexpr double kSingularDenominator = 1e-300;
constexpr int kConvergenceExtraOrders = 5;
constexpr double kConvergenceTolerance = 1e-10;

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(value));
    }
}

// Works in the h^(1) convention: absorbing media have Im(m) > 0.
ExtComplex internal_index(ComplexValue m) {
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
        throw DomainError("refractive index must be finite");
    }
    return ExtComplex(std::conj(m));
}

ComplexValue narrow(ExtComplex v) {
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace

void ParticleState::validate() const {
    if (!(radius_m >= kMinRadius && radius_m <= kMaxRadius)) {
        throw DomainError("particle radius " + std::to_string(radius_m) + " m outside [1e-9, 1e-2] m");
    }
    require_positive(temperature_k, "temperature");
    if (!std::isfinite(refractive_index.real()) || !std::isfinite(refractive_index.imag())) {
        throw DomainError("refractive index must be finite");
    }
}

WaveSpec WaveSpec::from_frequency(double frequency_hz) {
    require_positive(frequency_hz, "frequency");
    return WaveSpec(frequency_hz, PhysicalConstants::speed_of_light / frequency_hz, 2.0 * kPi * frequency_hz);
}

WaveSpec WaveSpec::from_wavelength(double wavelength_m) {
    require_positive(wavelength_m, "wavelength");
    const double f = PhysicalConstants::speed_of_light / wavelength_m;
    return WaveSpec(f, wavelength_m, 2.0 * kPi * f);
}

double scale_parameter(double radius_m, double wavelength_m) {
    require_positive(radius_m, "radius");
    require_positive(wavelength_m, "wavelength");
    return 2.0 * kPi * radius_m / wavelength_m;
}

double surface_potential(std::uint64_t electrons, double radius_m) {
    require_positive(radius_m, "radius");
    return PhysicalConstants::coulomb_constant * static_cast<double>(electrons) *
           PhysicalConstants::electron_charge / radius_m;
}

double surface_plasma_frequency(std::uint64_t electrons, double radius_m) {
    const double phi = surface_potential(electrons, radius_m);
    return std::sqrt(2.0 * PhysicalConstants::electron_charge * phi /
                     (PhysicalConstants::electron_mass * radius_m * radius_m));
}

double collision_frequency(double temperature_k) {
    require_positive(temperature_k, "temperature");
    return 2.0 * kPi * PhysicalConstants::boltzmann * temperature_k / PhysicalConstants::planck_reduced;
}

ComplexValue charged_coefficient(double x, double omega, double omega_s, double gamma_s, ChargeMode mode) {
    require_positive(x, "scale parameter");
    require_positive(omega, "angular frequency");
    require_positive(gamma_s, "collision frequency");
    if (!(omega_s >= 0.0) || !std::isfinite(omega_s)) {
        throw DomainError("surface plasma frequency must be non-negative");
    }
    if (omega_s == 0.0) {
        return {0.0, 0.0};
    }
    const double ws2 = omega_s * omega_s;
    if (mode == ChargeMode::approx) {
        return {0.0, x * ws2 / (2.0 * gamma_s * omega)};
    }
    const double magnitude = 0.5 * x * ws2 / (omega * omega + gamma_s * gamma_s);
    return magnitude * ComplexValue(-1.0, gamma_s / omega);
}

ComplexValue charged_coefficient(const ParticleState& particle, const WaveSpec& wave, ChargeMode mode) {
    const double x = scale_parameter(particle.radius_m, wave.wavelength());
    return charged_coefficient(x, wave.angular_frequency(),
                               surface_plasma_frequency(particle.electrons, particle.radius_m),
                               collision_frequency(particle.temperature_k), mode);
}

int truncation_order(double x) {
    require_positive(x, "scale parameter");
    const int n = static_cast<int>(std::floor(x + 4.0 * std::cbrt(x) + 2.0));
    return n < 1 ? 1 : n;
}

std::vector<ScatteringPair> mie_coefficients(int n_terms, double x, ComplexValue m, ComplexValue g_e) {
    if (n_terms < 1) {
        throw DomainError("Mie order must be >= 1");
    }
    require_positive(x, "scale parameter");
    const ExtComplex mi = internal_index(m);
    const ExtComplex g(g_e);
    const ExtComplex zx(static_cast<Real>(x), 0.0L);
    const ExtComplex zmx = mi * zx;

    const auto psi_x = specfun::riccati_psi_sequence(n_terms, zx);
    const auto psi_mx = specfun::riccati_psi_sequence(n_terms, zmx);
    const auto xi_x = specfun::riccati_xi_sequence(n_terms, zx);

    std::vector<ScatteringPair> out;
    out.reserve(static_cast<std::size_t>(n_terms));
    for (int n = 1; n <= n_terms; ++n) {
        const auto& p = psi_x[static_cast<std::size_t>(n)];
        const auto& q = psi_mx[static_cast<std::size_t>(n)];
        const auto& e = xi_x[static_cast<std::size_t>(n)];

        const ExtComplex a_num =
            q.derivative * p.value - mi * q.value * p.derivative - g * p.derivative * q.derivative;
        const ExtComplex a_den =
            q.derivative * e.value - mi * q.value * e.derivative - g * e.derivative * q.derivative;
        const ExtComplex b_num = p.derivative * q.value - mi * p.value * q.derivative + g * p.value * q.value;
        const ExtComplex b_den = e.derivative * q.value - mi * e.value * q.derivative + g * e.value * q.value;

        if (std::abs(a_den) < kSingularDenominator || std::abs(b_den) < kSingularDenominator) {
            throw SingularDenominatorError("Mie denominator vanishes at order " + std::to_string(n) +
                                           ", x = " + std::to_string(x));
        }
        const ComplexValue a = narrow(a_num / a_den);
        const ComplexValue b = narrow(b_num / b_den);
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
            !std::isfinite(b.imag())) {
            throw OverflowError("Mie coefficient not finite at order " + std::to_string(n));
        }
        out.push_back({a, b});
    }
    return out;
}

ScatteringPair mie_ab(int n, double x, ComplexValue m, ComplexValue g_e) {
    return mie_coefficients(n, x, m, g_e).back();
}

MieResult extinction_efficiency(double x, ComplexValue m, ComplexValue g_e, double radius_m) {
    MieResult result;
    result.n_max = truncation_order(x);
    auto coefficients = mie_coefficients(result.n_max + kConvergenceExtraOrders, x, m, g_e);

    Real sum = 0.0L;
    Real extended = 0.0L;
    for (int n = 1; n <= result.n_max + kConvergenceExtraOrders; ++n) {
        const auto& c = coefficients[static_cast<std::size_t>(n - 1)];
        const Real term = static_cast<Real>(2 * n + 1) * (static_cast<Real>(c.a.real()) + c.b.real());
        if (n <= result.n_max) {
            sum += term;
        }
        extended += term;
    }
    const Real scale = 2.0L / (static_cast<Real>(x) * x);
    result.q_ext = static_cast<double>(scale * sum);
    const double q_extended = static_cast<double>(scale * extended);
    const double change = std::abs(q_extended - result.q_ext);
    result.converged = change == 0.0 || change < kConvergenceTolerance * std::abs(result.q_ext);
    result.c_ext = result.q_ext * kPi * radius_m * radius_m;
    coefficients.resize(static_cast<std::size_t>(result.n_max));
    result.terms = std::move(coefficients);
    return result;
}

MieResult extinction_efficiency(const ParticleState& particle, const WaveSpec& wave, ChargeMode mode) {
    particle.validate();
    const double x = scale_parameter(particle.radius_m, wave.wavelength());
    const ComplexValue g = charged_coefficient(particle, wave, mode);
    return extinction_efficiency(x, particle.refractive_index, g, particle.radius_m);
}

}  // namespace dustmie::mie
