#pragma once

// Altitude-dependent log-normal dust size spectrum, fitted to sand-storm
// measurements taken up to ~200 m above ground.
//
// Sizes are in millimetres throughout this module (the fitted mu_d values
// assume ln r with r in mm). r is treated as the particle radius.

#include <utility>

namespace dustmie::dust {

struct ExponentialFit {
    double scale;
    double rate_per_m;

    double at(double altitude_m) const;
};

/// Log-normal parameters of ln(r / 1 mm) at one altitude.
struct LognormalParams {
    double mu;
    double sigma;
};

/// Integration bounds in millimetres.
struct SizeSupport {
    double lower_mm;
    double upper_mm;
};

inline constexpr double kFitValidityCeiling = 1000.0;  // m
inline constexpr double kSupportHalfWidthSigmas = 8.0;
inline constexpr double kMinRadiusMm = 1e-6;   // 1e-9 m
inline constexpr double kMaxRadiusMm = 10.0;   // 1e-2 m

struct DustLayerModel {
    ExponentialFit mu_fit{-2.061, 0.00159};
    ExponentialFit sigma_fit{0.323, 0.00476};
    double n0_per_m3 = 0.0;

    void validate() const;
};

/// (mu_d(h), sigma_d(h)) using the default fit.
LognormalParams lognormal_params(double altitude_m);
LognormalParams lognormal_params(double altitude_m, const DustLayerModel& layer);

/// True above the altitude where the fits have any measurement support.
bool fit_is_extrapolated(double altitude_m);

/// p(r, h) in 1/mm.
double size_pdf(double radius_mm, double altitude_m);
double size_pdf(double radius_mm, double altitude_m, const DustLayerModel& layer);

/// N_d(r) = N0 p(r, h) in particles / m^3 / mm.
double number_density(double radius_mm, double altitude_m, double n0_per_m3);
double number_density(double radius_mm, double altitude_m, const DustLayerModel& layer);

/// Mode of p(r, h): exp(mu_d - sigma_d^2).
double size_mode(double altitude_m, const DustLayerModel& layer = {});

/// [exp(mu - 8 sigma), exp(mu + 8 sigma)] clipped to the admissible particle
/// radius range [1e-6, 10] mm.
SizeSupport integration_support(double altitude_m, const DustLayerModel& layer = {});

}  // namespace dustmie::dust
