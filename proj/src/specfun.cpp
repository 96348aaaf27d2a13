#include "dustmie/specfun.hpp"

#include <cmath>
#include <string>

#include "dustmie/error.hpp"

namespace dustmie::specfun {
namespace {

using Real = long double;

constexpr Real kRescaleAbove = 1e300L;
constexpr Real kRescaleFactor = 1e-300L;

void check_order(int n) {
    if (n < 0) {
        throw DomainError("spherical Bessel order must be non-negative, got " + std::to_string(n));
    }
    if (n > kMaxOrder) {
        throw DomainError("spherical Bessel order " + std::to_string(n) + " exceeds maximum " +
                          std::to_string(kMaxOrder));
    }
}

void check_argument(ExtComplex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("spherical Bessel argument must be finite");
    }
}

bool is_finite(ExtComplex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

ComplexValue narrow(ExtComplex v, const char* what) {
    const ComplexValue out(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) {
        throw OverflowError(std::string(what) + " is not representable in double precision");
    }
    return out;
}

// z j_{-1}(z) = cos z closes the derivative recurrence at n = 0.
ExtComplex psi_minus_one(ExtComplex z) { return std::cos(z); }

std::vector<ExtRiccatiPair> riccati_from_values(const std::vector<ExtComplex>& values, ExtComplex below,
                                                ExtComplex z) {
    std::vector<ExtRiccatiPair> out(values.size());
    for (std::size_t n = 0; n < values.size(); ++n) {
        const ExtComplex previous = n == 0 ? below : values[n - 1];
        out[n].value = values[n];
        out[n].derivative = previous - (static_cast<Real>(n) / z) * values[n];
    }
    return out;
}

// Upward recurrence on h^(1) itself, for Im z >= 0; forming j + i y instead
// cancels badly once Im z >> 1.
std::vector<ExtComplex> upper_hankel1(int n_max, ExtComplex z) {
    const ExtComplex i(0, 1);
    const ExtComplex e = std::exp(i * z);
    std::vector<ExtComplex> h(static_cast<std::size_t>(n_max) + 1);
    h[0] = -i * e / z;
    if (n_max >= 1) {
        h[1] = -e * (z + i) / (z * z);
    }
    if (!is_finite(h[0]) || (n_max >= 1 && !is_finite(h[1]))) {
        throw OverflowError("h_n^(1) starting values overflowed");
    }
    for (int n = 1; n < n_max; ++n) {
        h[n + 1] = (static_cast<Real>(2 * n + 1) / z) * h[n] - h[n - 1];
        if (!is_finite(h[n + 1])) {
            throw OverflowError("h_n^(1) upward recurrence overflowed at order " + std::to_string(n + 1));
        }
    }
    return h;
}

}  // namespace

int downward_start_order(int n_max, long double abs_z) {
    const long double base = std::max<long double>(n_max, std::ceil(abs_z));
    return static_cast<int>(base + std::ceil(10.0L + 4.0L * std::sqrt(abs_z)));
}

std::vector<ExtComplex> sph_bessel_j_sequence(int n_max, ExtComplex z) {
    check_order(n_max);
    check_argument(z);
    std::vector<ExtComplex> j(static_cast<std::size_t>(n_max) + 1, ExtComplex(0));
    if (z == ExtComplex(0)) {
        j[0] = 1;
        return j;
    }

    const int start = downward_start_order(n_max, std::abs(z));
    ExtComplex above(0);         // f_{n+1}
    ExtComplex current(1e-30L);  // f_n
    for (int n = start; n > 0; --n) {
        if (n <= n_max) {
            j[static_cast<std::size_t>(n)] = current;
        }
        const ExtComplex below = (static_cast<Real>(2 * n + 1) / z) * current - above;
        above = current;
        current = below;
        if (std::abs(current) > kRescaleAbove) {
            current *= kRescaleFactor;
            above *= kRescaleFactor;
            for (int k = n; k <= n_max; ++k) {
                j[static_cast<std::size_t>(k)] *= kRescaleFactor;
            }
        }
    }
    j[0] = current;

    // Normalise against whichever closed form is larger; j_0 and j_1 never
    // vanish together.
    const ExtComplex s = std::sin(z);
    const ExtComplex j0 = s / z;
    const ExtComplex j1 = s / (z * z) - std::cos(z) / z;
    ExtComplex scale;
    if (std::abs(j0) >= std::abs(j1) || n_max == 0) {
        scale = j0 / j[0];
    } else {
        scale = j1 / j[1];
    }
    for (auto& v : j) {
        v *= scale;
    }
    j[0] = j0;
    if (n_max >= 1 && std::abs(j0) < std::abs(j1)) {
        j[1] = j1;
    }
    for (const auto& v : j) {
        if (!is_finite(v)) {
            throw OverflowError("j_n downward recurrence overflowed");
        }
    }
    return j;
}

std::vector<ExtComplex> sph_bessel_y_sequence(int n_max, ExtComplex z) {
    check_order(n_max);
    check_argument(z);
    if (z == ExtComplex(0)) {
        throw DomainError("y_n(z) is singular at z = 0");
    }
    std::vector<ExtComplex> y(static_cast<std::size_t>(n_max) + 1);
    const ExtComplex c = std::cos(z);
    y[0] = -c / z;
    if (n_max >= 1) {
        y[1] = -c / (z * z) - std::sin(z) / z;
    }
    for (int n = 1; n < n_max; ++n) {
        y[n + 1] = (static_cast<Real>(2 * n + 1) / z) * y[n] - y[n - 1];
        if (!is_finite(y[n + 1])) {
            throw OverflowError("y_n upward recurrence overflowed at order " + std::to_string(n + 1));
        }
    }
    if (!is_finite(y[0]) || (n_max >= 1 && !is_finite(y[1]))) {
        throw OverflowError("y_n starting values overflowed");
    }
    return y;
}

std::vector<ExtRiccatiPair> riccati_psi_sequence(int n_max, ExtComplex z) {
    auto values = sph_bessel_j_sequence(n_max, z);
    for (auto& v : values) {
        v *= z;
    }
    if (z == ExtComplex(0)) {
        std::vector<ExtRiccatiPair> out(values.size(), ExtRiccatiPair{0, 0});
        out[0].derivative = 1;
        return out;
    }
    return riccati_from_values(values, psi_minus_one(z), z);
}

std::vector<ExtComplex> sph_hankel1_sequence(int n_max, ExtComplex z) {
    check_order(n_max);
    check_argument(z);
    if (z == ExtComplex(0)) {
        throw DomainError("h_n^(1)(z) is singular at z = 0");
    }
    if (z.imag() < 0) {
        // Upward recurrence amplifies the h^(2) component here; reflect
        // instead: h^(1)(z) = 2 j(z) - conj(h^(1)(conj z)).
        const auto mirrored = upper_hankel1(n_max, std::conj(z));
        auto h = sph_bessel_j_sequence(n_max, z);
        for (std::size_t n = 0; n < h.size(); ++n) {
            h[n] = Real(2) * h[n] - std::conj(mirrored[n]);
            if (!is_finite(h[n])) {
                throw OverflowError("h_n^(1) overflowed at order " + std::to_string(n));
            }
        }
        return h;
    }
    return upper_hankel1(n_max, z);
}

std::vector<ExtRiccatiPair> riccati_xi_sequence(int n_max, ExtComplex z) {
    auto values = sph_hankel1_sequence(n_max, z);
    for (auto& v : values) {
        v *= z;
    }
    // xi_{-1}(z) = cos z + i sin z.
    auto out = riccati_from_values(values, std::exp(ExtComplex(0, 1) * z), z);
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (!is_finite(out[n].value) || !is_finite(out[n].derivative)) {
            throw OverflowError("xi_n overflowed at order " + std::to_string(n));
        }
    }
    return out;
}

ComplexValue sph_bessel_j(int n, ComplexValue z) {
    check_order(n);
    return narrow(sph_bessel_j_sequence(n, ExtComplex(z))[static_cast<std::size_t>(n)], "j_n(z)");
}

ComplexValue sph_bessel_y(int n, ComplexValue z) {
    check_order(n);
    return narrow(sph_bessel_y_sequence(n, ExtComplex(z))[static_cast<std::size_t>(n)], "y_n(z)");
}

ComplexValue sph_hankel1(int n, ComplexValue z) {
    check_order(n);
    if (z == ComplexValue(0)) {
        throw DomainError("h_n^(1)(z) is singular at z = 0");
    }
    return narrow(sph_hankel1_sequence(n, ExtComplex(z))[static_cast<std::size_t>(n)], "h_n^(1)(z)");
}

RiccatiPair riccati_psi(int n, ComplexValue z) {
    check_order(n);
    const auto seq = riccati_psi_sequence(n, ExtComplex(z));
    const auto& p = seq[static_cast<std::size_t>(n)];
    return {narrow(p.value, "psi_n(z)"), narrow(p.derivative, "psi_n'(z)")};
}

RiccatiPair riccati_xi(int n, ComplexValue z) {
    check_order(n);
    const auto seq = riccati_xi_sequence(n, ExtComplex(z));
    const auto& p = seq[static_cast<std::size_t>(n)];
    return {narrow(p.value, "xi_n(z)"), narrow(p.derivative, "xi_n'(z)")};
}

}  // namespace dustmie::specfun
