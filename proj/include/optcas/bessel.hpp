#pragma once

#include <cmath>
#include <stdexcept>

namespace optcas {

// Modified Bessel functions of the second kind, order 0..2, real z > 0.
// Backed by the standard library implementation; the recurrence
// K2(z) = K0(z) + 2 K1(z)/z holds to ~1e-15 relative and is checked in tests.

inline double bessel_k0(double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel_k0: requires z > 0");
    return std::cyl_bessel_k(0.0, z);
}

inline double bessel_k1(double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel_k1: requires z > 0");
    return std::cyl_bessel_k(1.0, z);
}

inline double bessel_k2(double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel_k2: requires z > 0");
    return std::cyl_bessel_k(2.0, z);
}

}  // namespace optcas
