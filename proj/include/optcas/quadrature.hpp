#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace optcas {

// Adaptive Simpson quadrature. Error control per subinterval via the
// standard (S2 - S1)/15 estimate; tolerance is split across halves.
namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, int max_depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double h6 = (b - a) / 12.0;
    double left = h6 * (fa + 4.0 * flm + fm);
    double right = h6 * (fm + 4.0 * frm + fb);
    double s2 = left + right;
    double err = (s2 - whole) / 15.0;
    if (depth >= max_depth || std::fabs(err) <= tol) return s2 + err;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

template <class F>
double integrate_1d(const F& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("integrate_1d: requires b >= a");
    }
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 0, max_depth);
}

// Volume integral of f(r, z) over an axisymmetric region r in [0, r_max],
// z in [z_lo(r), z_hi(r)], with the 2*pi*r cylindrical weight applied here.
template <class F, class ZLo, class ZHi>
double integrate_axisymmetric(const F& f, double r_max, const ZLo& z_lo, const ZHi& z_hi,
                              double tol = 1e-9) {
    auto ring = [&](double r) -> double {
        double lo = z_lo(r), hi = z_hi(r);
        if (!(hi > lo)) return 0.0;
        auto g = [&](double z) { return f(r, z); };
        return 2.0 * M_PI * r * integrate_1d(g, lo, hi, tol / (r_max > 0 ? r_max : 1.0));
    };
    return integrate_1d(ring, 0.0, r_max, tol);
}

// Plain iterated 2d integral over [ax,bx] x [ay,by] (no weight).
template <class F>
double integrate_rect2d(const F& f, double ax, double bx, double ay, double by,
                        double tol = 1e-9) {
    auto row = [&](double x) {
        auto g = [&](double y) { return f(x, y); };
        double span = bx - ax;
        return integrate_1d(g, ay, by, tol / (span > 0 ? span : 1.0));
    };
    return integrate_1d(row, ax, bx, tol);
}

}  // namespace optcas
