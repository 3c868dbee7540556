#pragma once

#include <Eigen/Dense>

#include "gerbe/complex_angle.hpp"
#include "gerbe/errors.hpp"

namespace gerbe {

using SpherePoint = Eigen::VectorXd; // unit vector in R^{d+1}

inline double sphere_distance(const SpherePoint& a, const SpherePoint& b) {
    return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

// Geodesic interpolation from a to b; t in [0, 1].
inline SpherePoint slerp(const SpherePoint& a, const SpherePoint& b, double t) {
    double angle = sphere_distance(a, b);
    if (angle < 1e-14) return a;
    double s = std::sin(angle);
    SpherePoint out = (std::sin((1.0 - t) * angle) / s) * a + (std::sin(t * angle) / s) * b;
    return out / out.norm();
}

// Geodesic from p in unit tangent direction v (v orthogonal to p).
inline SpherePoint sphere_exp(const SpherePoint& p, const SpherePoint& v, double t) {
    SpherePoint out = std::cos(t) * p + std::sin(t) * v;
    return out / out.norm();
}

// Orthonormal tangent basis at p: Gram-Schmidt of the coordinate axes.
inline Eigen::MatrixXd tangent_basis(const SpherePoint& p) {
    const int dim = static_cast<int>(p.size());
    Eigen::MatrixXd basis(dim, dim - 1);
    int col = 0;
    for (int axis = 0; axis < dim && col < dim - 1; ++axis) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, axis);
        v -= p.dot(v) * p;
        for (int c = 0; c < col; ++c) v -= basis.col(c).dot(v) * basis.col(c);
        double n = v.norm();
        if (n < 1e-8) continue;
        basis.col(col++) = v / n;
    }
    require(col == dim - 1, ErrorKind::Domain, "tangent_basis: degenerate point");
    return basis;
}

} // namespace gerbe
