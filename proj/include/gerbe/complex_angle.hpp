#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "gerbe/errors.hpp"

namespace gerbe {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reduce an angle to [0, 2pi).
inline double wrap_angle(double t) {
    t = std::fmod(t, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    return t;
}

// Argument in [0, 2pi), branch cut along the positive reals. Defined for all z != 0.
inline double ray_angle(cplx z) {
    if (z.real() == 0.0 && z.imag() == 0.0)
        fail(ErrorKind::Domain, "ray_angle: zero has no ray");
    double t = std::arg(z);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0;
    return t;
}

// x < y iff the ray of y is a proper counterclockwise rotation of the ray of x
// not passing through the positive reals.
inline bool ray_less(cplx x, cplx y) { return ray_angle(x) < ray_angle(y); }

inline bool ray_less_equal(cplx x, cplx y) { return ray_angle(x) <= ray_angle(y); }

// Distance between two angles on the circle, in [0, pi].
inline double circular_distance(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return d > pi ? two_pi - d : d;
}

// True when z avoids the closed positive real axis (the branch cut).
inline bool off_positive_reals(cplx z) {
    return !(z.imag() == 0.0 && z.real() >= 0.0);
}

} // namespace gerbe
