#include "dustmie/dust_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dustmie/constants.hpp"
#include "dustmie/error.hpp"

namespace dustmie::dust {
namespace {

void check_altitude(double altitude_m) {
    if (!(altitude_m >= 0.0) || !std::isfinite(altitude_m)) {
        throw DomainError("altitude must be >= 0 m, got " + std::to_string(altitude_m));
    }
}

}  // namespace

double ExponentialFit::at(double altitude_m) const { return scale * std::exp(rate_per_m * altitude_m); }

void DustLayerModel::validate() const {
    if (!(sigma_fit.scale > 0.0) || !std::isfinite(sigma_fit.rate_per_m) || !std::isfinite(mu_fit.scale) ||
        !std::isfinite(mu_fit.rate_per_m)) {
        throw DomainError("dust layer fit must have a positive, finite sigma scale");
    }
    if (!(n0_per_m3 >= 0.0) || !std::isfinite(n0_per_m3)) {
        throw DomainError("N0 must be >= 0, got " + std::to_string(n0_per_m3));
    }
}

LognormalParams lognormal_params(double altitude_m) { return lognormal_params(altitude_m, DustLayerModel{}); }

LognormalParams lognormal_params(double altitude_m, const DustLayerModel& layer) {
    check_altitude(altitude_m);
    return {layer.mu_fit.at(altitude_m), layer.sigma_fit.at(altitude_m)};
}

bool fit_is_extrapolated(double altitude_m) { return altitude_m > kFitValidityCeiling; }

double size_pdf(double radius_mm, double altitude_m) { return size_pdf(radius_mm, altitude_m, DustLayerModel{}); }

double size_pdf(double radius_mm, double altitude_m, const DustLayerModel& layer) {
    if (!(radius_mm > 0.0) || !std::isfinite(radius_mm)) {
        throw DomainError("particle size must be positive, got " + std::to_string(radius_mm));
    }
    const auto [mu, sigma] = lognormal_params(altitude_m, layer);
    const double u = (std::log(radius_mm) - mu) / sigma;
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * kPi) * sigma * radius_mm);
}

double number_density(double radius_mm, double altitude_m, double n0_per_m3) {
    DustLayerModel layer;
    layer.n0_per_m3 = n0_per_m3;
    return number_density(radius_mm, altitude_m, layer);
}

double number_density(double radius_mm, double altitude_m, const DustLayerModel& layer) {
    layer.validate();
    return layer.n0_per_m3 * size_pdf(radius_mm, altitude_m, layer);
}

double size_mode(double altitude_m, const DustLayerModel& layer) {
    const auto [mu, sigma] = lognormal_params(altitude_m, layer);
    return std::exp(mu - sigma * sigma);
}

SizeSupport integration_support(double altitude_m, const DustLayerModel& layer) {
    const auto [mu, sigma] = lognormal_params(altitude_m, layer);
    // Work in log space; exp(mu +- 8 sigma) overflows long before the clip
    // bounds matter at extrapolated altitudes.
    const double log_lo = std::max(mu - kSupportHalfWidthSigmas * sigma, std::log(kMinRadiusMm));
    const double log_hi = std::min(mu + kSupportHalfWidthSigmas * sigma, std::log(kMaxRadiusMm));
    if (!(log_lo < log_hi)) {
        throw DomainError("dust size support is empty at altitude " + std::to_string(altitude_m) + " m");
    }
    return {std::exp(log_lo), std::exp(log_hi)};
}

}  // namespace dustmie::dust
