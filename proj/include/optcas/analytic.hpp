#pragma once

#include <cmath>
#include <stdexcept>

#include "optcas/bessel.hpp"

namespace optcas {

struct PlateSpec {
    double a = 1.0;  // separation
    double S = 1.0;  // area
};

inline void check_plate_spec(const PlateSpec& s) {
    if (!(s.a > 0.0) || !(s.S > 0.0))
        throw std::invalid_argument("PlateSpec: a and S must be positive");
}

// Dirichlet even-reflection sum, all orders: -pi^2 S / (1440 a^3).
inline double plates_even_closed_form(const PlateSpec& s) {
    check_plate_spec(s);
    return -M_PI * M_PI * s.S / (1440.0 * s.a * s.a * s.a);
}

// Single even class of order 2k: path length 2ka, value -S/(16 pi^2 a^3 k^4).
inline double plates_even_order(const PlateSpec& s, int k) {
    check_plate_spec(s);
    if (k < 1) throw std::invalid_argument("plates_even_order: k >= 1");
    double k4 = static_cast<double>(k) * k * k * k;
    return -s.S / (16.0 * M_PI * M_PI * s.a * s.a * s.a * k4);
}

// Partial even sum over the first n_terms classes (orders 2..2*n_terms).
inline double plates_even_partial(const PlateSpec& s, int n_terms) {
    check_plate_spec(s);
    if (n_terms < 1) throw std::invalid_argument("plates_even_partial: n_terms >= 1");
    double sum = 0.0;
    for (int k = n_terms; k >= 1; --k) sum += plates_even_order(s, k);
    return sum;
}

// Single odd class pair of order n >= 3 (both starting surfaces):
// S * (1/(n-1)^3 - 1/(n+1)^3) / (6 pi^2 a^3).
inline double plates_odd_order(const PlateSpec& s, int n) {
    check_plate_spec(s);
    if (n < 3 || n % 2 == 0) throw std::invalid_argument("plates_odd_order: odd n >= 3");
    double lo = static_cast<double>(n - 1), hi = static_cast<double>(n + 1);
    return s.S * (1.0 / (lo * lo * lo) - 1.0 / (hi * hi * hi)) /
           (6.0 * M_PI * M_PI * s.a * s.a * s.a);
}

// a-dependent part of the regulated one-reflection class (both plates).
inline double plates_first_order_finite(const PlateSpec& s) {
    check_plate_spec(s);
    return -s.S / (48.0 * M_PI * M_PI * s.a * s.a * s.a);
}

// a-dependent part of the odd sum truncated at order max_order; the pairwise
// interval sums telescope, leaving -S/(48 pi^2 a^3 K^3) with K = number of
// odd orders kept.
inline double plates_odd_finite_partial(const PlateSpec& s, int max_order) {
    check_plate_spec(s);
    if (max_order < 1) throw std::invalid_argument("plates_odd_finite_partial: max_order >= 1");
    double K = static_cast<double>((max_order + 1) / 2);
    return -s.S / (48.0 * M_PI * M_PI * s.a * s.a * s.a * K * K * K);
}

// Truncated finite part: even partial sum plus the odd a-dependent remainder.
inline double plates_finite_partial(const PlateSpec& s, int max_order) {
    if (max_order < 2) throw std::invalid_argument("plates_finite_partial: max_order >= 2");
    return plates_even_partial(s, max_order / 2) + plates_odd_finite_partial(s, max_order);
}

// Leading regulated odd sum S/(8 pi eps^3). The full point-split odd sum
// over all orders equals this exactly and is a-independent: the per-order
// z-integrals tile [0, inf) in the path length.
inline double plates_odd_regulated(const PlateSpec& s, double eps) {
    check_plate_spec(s);
    if (!(eps > 0.0)) throw std::invalid_argument("plates_odd_regulated: eps > 0");
    return s.S / (8.0 * M_PI * eps * eps * eps);
}

// Massive scalar, two-reflection class: -S m^2 K2(2 m a) / (8 pi^2 a);
// the m -> 0 limit is -S/(16 pi^2 a^3), the massless class value.
inline double plates_massive_two_reflection(const PlateSpec& s, double m) {
    check_plate_spec(s);
    if (m < 0.0) throw std::invalid_argument("plates_massive_two_reflection: m >= 0");
    if (m == 0.0) return -s.S / (16.0 * M_PI * M_PI * s.a * s.a * s.a);
    return -s.S * m * m * bessel_k2(2.0 * m * s.a) / (8.0 * M_PI * M_PI * s.a);
}

}  // namespace optcas
