#pragma once

// Test-only oracles, independent of the code paths they check.

#include <functional>

#include "gerbe/quaternion.hpp"
#include "gerbe/sphere_quadrature.hpp"

namespace gerbe::oracles {

// Mapping degree of f: S^3 -> S^3 by quadrature of the pulled-back volume
// form; the differential is supplied analytically. Normalized so the identity
// has degree +1 under the det[p | frame] > 0 orientation.
inline double mapping_degree_s3(const std::function<Quat(const Quat&)>& f,
                                const std::function<Quat(const Quat&, const Quat&)>& df,
                                int n_polar = 24, int n_azimuth = 48) {
    double acc = 0.0;
    foreach_s3_node(n_polar, n_azimuth, [&](const SphereQuadNode& node) {
        Quat q = Quat::from_vec(node.p);
        Eigen::Matrix4d m;
        m.col(0) = f(q).vec();
        for (int c = 0; c < 3; ++c)
            m.col(c + 1) = df(q, Quat::from_vec(node.frame.col(c))).vec();
        acc += node.weight * m.determinant();
    });
    return acc / (2.0 * pi * pi);
}

inline double power_map_degree(int k, int n_polar = 24, int n_azimuth = 48) {
    return mapping_degree_s3([k](const Quat& q) { return qpow(q, k); },
                             [k](const Quat& q, const Quat& v) {
                                 return qpow_differential(q, v, k);
                             },
                             n_polar, n_azimuth);
}

} // namespace gerbe::oracles
