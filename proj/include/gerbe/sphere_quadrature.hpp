#pragma once

#include "gerbe/gauss_legendre.hpp"
#include "gerbe/sphere_geometry.hpp"

namespace gerbe {

// One node of a product quadrature on a sphere. frame holds the coordinate
// tangent vectors; weight is the parameter-space weight only, so a k-form
// integral is sum of weight * form(frame columns). The frame is positively
// oriented for the det[p | frame] > 0 convention.
struct SphereQuadNode {
    SpherePoint p;
    Eigen::MatrixXd frame; // (d+1) x d
    double weight;
};

// Hyperspherical product rule on S^3: Gauss-Legendre in the two polar angles,
// uniform in the periodic angle.
template <class F>
void foreach_s3_node(int n_polar, int n_azimuth, F&& f) {
    const GaussLegendreRule& rule = gauss_legendre(n_polar);
    for (int i = 0; i < n_polar; ++i) {
        double psi = 0.5 * pi * (rule.nodes[i] + 1.0);
        double w_psi = 0.5 * pi * rule.weights[i];
        double c1 = std::cos(psi), s1 = std::sin(psi);
        for (int j = 0; j < n_polar; ++j) {
            double theta = 0.5 * pi * (rule.nodes[j] + 1.0);
            double w_theta = 0.5 * pi * rule.weights[j];
            double c2 = std::cos(theta), s2 = std::sin(theta);
            for (int k = 0; k < n_azimuth; ++k) {
                double phi = two_pi * (k + 0.5) / n_azimuth;
                double w_phi = two_pi / n_azimuth;
                double c3 = std::cos(phi), s3 = std::sin(phi);
                SphereQuadNode node;
                node.p = Eigen::Vector4d(c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3);
                node.frame = Eigen::MatrixXd(4, 3);
                node.frame.col(0) = Eigen::Vector4d(-s1, c1 * c2, c1 * s2 * c3, c1 * s2 * s3);
                node.frame.col(1) = Eigen::Vector4d(0, -s1 * s2, s1 * c2 * c3, s1 * c2 * s3);
                node.frame.col(2) = Eigen::Vector4d(0, 0, -s1 * s2 * s3, s1 * s2 * c3);
                node.weight = w_psi * w_theta * w_phi;
                f(node);
            }
        }
    }
}

template <class F>
void foreach_s4_node(int n_polar, int n_azimuth, F&& f) {
    const GaussLegendreRule& rule = gauss_legendre(n_polar);
    for (int i = 0; i < n_polar; ++i) {
        double chi = 0.5 * pi * (rule.nodes[i] + 1.0);
        double w_chi = 0.5 * pi * rule.weights[i];
        double c0 = std::cos(chi), s0 = std::sin(chi);
        foreach_s3_node(n_polar, n_azimuth, [&](const SphereQuadNode& inner) {
            SphereQuadNode node;
            node.p = Eigen::VectorXd(5);
            node.p[0] = c0;
            node.p.tail(4) = s0 * inner.p;
            node.frame = Eigen::MatrixXd(5, 4);
            node.frame.col(0) << -s0, c0 * inner.p;
            for (int c = 0; c < 3; ++c) {
                node.frame.col(c + 1)[0] = 0.0;
                node.frame.col(c + 1).tail(4) = s0 * inner.frame.col(c);
            }
            node.weight = w_chi * inner.weight;
            f(node);
        });
    }
}

// Volume element carried by a node: |det[p | frame]|.
inline double node_jacobian(const SphereQuadNode& node) {
    const int dim = static_cast<int>(node.p.size());
    Eigen::MatrixXd m(dim, dim);
    m.col(0) = node.p;
    m.rightCols(dim - 1) = node.frame;
    return m.determinant();
}

inline double sphere_volume(int d) {
    if (d == 3) return 2.0 * pi * pi;
    if (d == 4) return 8.0 * pi * pi / 3.0;
    fail(ErrorKind::Domain, "sphere_volume: unsupported dimension");
}

// Integral of a scalar density against the round volume form.
template <class Density>
double integrate_sphere(int sphere_dim, int n_polar, int n_azimuth, Density&& density) {
    double acc = 0.0;
    if (sphere_dim == 3) {
        foreach_s3_node(n_polar, n_azimuth, [&](const SphereQuadNode& node) {
            acc += node.weight * node_jacobian(node) * density(node.p);
        });
    } else if (sphere_dim == 4) {
        foreach_s4_node(n_polar, n_azimuth, [&](const SphereQuadNode& node) {
            acc += node.weight * node_jacobian(node) * density(node.p);
        });
    } else {
        fail(ErrorKind::Domain, "integrate_sphere: unsupported dimension");
    }
    return acc;
}

} // namespace gerbe
