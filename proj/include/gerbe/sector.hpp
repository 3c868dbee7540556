#pragma once

#include <algorithm>
#include <limits>

#include "gerbe/complex_angle.hpp"
#include "gerbe/config.hpp"

namespace gerbe {

// Open annular sector {s e^{ip} : r_min < s < r_max, 0 < (p - phi_start) mod 2pi < width}.
// width == 0 encodes the empty sector.
struct Sector {
    double phi_start = 0.0; // in [0, 2pi)
    double width = 0.0;     // in [0, 2pi)
    double r_min = 0.0;
    double r_max = std::numeric_limits<double>::infinity();

    bool empty() const { return width <= 0.0 || r_min >= r_max; }
    bool bounded() const { return r_min > 0.0 && std::isfinite(r_max); }
    double phi_end() const { return wrap_angle(phi_start + width); }
};

// Sector swept counterclockwise from the ray of x to the ray of y.
inline Sector sector_between(cplx x, cplx y, double r = 0.0,
                             double R = std::numeric_limits<double>::infinity()) {
    require(r >= 0.0 && r < R, ErrorKind::Domain, "sector_between: need 0 <= r < R");
    Sector s;
    s.phi_start = ray_angle(x);
    s.width = wrap_angle(ray_angle(y) - ray_angle(x));
    s.r_min = r;
    s.r_max = R;
    return s;
}

// Symmetric variant: the sector between the two rays not crossing the positive
// reals. Both arguments must avoid the positive real axis.
inline Sector unordered_sector(cplx x, cplx y, double r = 0.0,
                               double R = std::numeric_limits<double>::infinity()) {
    require(off_positive_reals(x) && off_positive_reals(y), ErrorKind::Domain,
            "unordered_sector: arguments must avoid the positive real axis");
    return ray_angle(x) <= ray_angle(y) ? sector_between(x, y, r, R)
                                        : sector_between(y, x, r, R);
}

// Strict membership; boundary points are outside.
inline bool in_sector(const Sector& S, cplx z) {
    double s = std::abs(z);
    require(s > 0.0, ErrorKind::Domain, "in_sector: zero argument");
    if (S.empty()) return false;
    if (!(s > S.r_min && s < S.r_max)) return false;
    double off = wrap_angle(ray_angle(z) - S.phi_start);
    return off > 0.0 && off < S.width;
}

// Distance from z to the ray {s e^{i phi} : s > 0}.
inline double distance_to_ray(cplx z, double phi) {
    cplx w = z * std::polar(1.0, -phi);
    return w.real() > 0.0 ? std::fabs(w.imag()) : std::abs(z);
}

// Euclidean distance from a point to the sector boundary. For interior points
// this is the clearance available for disc placement.
inline double distance_to_sector_boundary(const Sector& S, cplx z) {
    double d = std::min(distance_to_ray(z, S.phi_start), distance_to_ray(z, S.phi_end()));
    double s = std::abs(z);
    if (S.r_min > 0.0) d = std::min(d, std::fabs(s - S.r_min));
    if (std::isfinite(S.r_max)) d = std::min(d, std::fabs(S.r_max - s));
    return d;
}

// Angular distance from the ray of z to the nearer boundary ray of S.
inline double angular_distance_to_boundary(const Sector& S, cplx z) {
    double t = ray_angle(z);
    return std::min(circular_distance(t, S.phi_start), circular_distance(t, S.phi_end()));
}

} // namespace gerbe
