#pragma once

// Spherical Bessel, spherical Hankel and Riccati-Bessel functions of integer
// order and complex argument.
//
// j_n is obtained by downward (Miller) recurrence normalised against the
// closed forms of j_0 / j_1; y_n by upward recurrence from y_0, y_1.
// h_n^(1) = j_n + i y_n. All recurrences run in long double; the public
// double-precision entry points convert on return and raise OverflowError
// when the result is not representable.

#include <complex>
#include <vector>

namespace dustmie::specfun {

using ComplexValue = std::complex<double>;
using ExtComplex = std::complex<long double>;

/// Largest order accepted by any entry point.
inline constexpr int kMaxOrder = 20000;

/// A Riccati-Bessel function value together with its first derivative.
struct RiccatiPair {
    ComplexValue value;
    ComplexValue derivative;
};

struct ExtRiccatiPair {
    ExtComplex value;
    ExtComplex derivative;
};

ComplexValue sph_bessel_j(int n, ComplexValue z);
ComplexValue sph_bessel_y(int n, ComplexValue z);
ComplexValue sph_hankel1(int n, ComplexValue z);

/// psi_n(z) = z j_n(z), psi_n'(z) = psi_{n-1}(z) - (n/z) psi_n(z).
RiccatiPair riccati_psi(int n, ComplexValue z);

/// xi_n(z) = z h_n^(1)(z), derivative by the same shifted recurrence.
RiccatiPair riccati_xi(int n, ComplexValue z);

// Sequences for orders 0..n_max in extended precision. These are what the
// Mie kernel consumes; the scalar functions above are thin wrappers.

std::vector<ExtComplex> sph_bessel_j_sequence(int n_max, ExtComplex z);
std::vector<ExtComplex> sph_bessel_y_sequence(int n_max, ExtComplex z);
std::vector<ExtComplex> sph_hankel1_sequence(int n_max, ExtComplex z);
std::vector<ExtRiccatiPair> riccati_psi_sequence(int n_max, ExtComplex z);
std::vector<ExtRiccatiPair> riccati_xi_sequence(int n_max, ExtComplex z);

/// Starting order of the downward recurrence used for j_n, n <= n_max.
int downward_start_order(int n_max, long double abs_z);

}  // namespace dustmie::specfun
