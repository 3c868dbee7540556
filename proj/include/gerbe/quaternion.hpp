#pragma once

#include <Eigen/Dense>

#include "gerbe/complex_angle.hpp"
#include "gerbe/errors.hpp"

namespace gerbe {

// Quaternion w + x i + y j + z k. Unit quaternions model the 3-sphere; the
// matrix embedding below identifies them with SU(2).
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static Quat from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
    Eigen::Vector4d vec() const { return {w, x, y, z}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const {
        double n = norm();
        require(n > 0.0, ErrorKind::Domain, "quaternion normalize: zero");
        return {w / n, x / n, y / n, z / n};
    }
};

inline Quat operator+(const Quat& a, const Quat& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Quat operator-(const Quat& a, const Quat& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Quat operator*(double s, const Quat& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }

inline Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat conjugate(const Quat& a) { return {a.w, -a.x, -a.y, -a.z}; }

inline Quat qpow(const Quat& q, int k) {
    require(k >= 0, ErrorKind::Domain, "qpow: negative power");
    Quat acc{1, 0, 0, 0};
    for (int i = 0; i < k; ++i) acc = acc * q;
    return acc;
}

// SU(2) embedding q = a+bi+cj+dk -> [[a+bi, c+di], [-c+di, a-bi]].
// Multiplicative: su2_matrix(pq) = su2_matrix(p) su2_matrix(q).
inline Eigen::Matrix2cd su2_matrix(const Quat& q) {
    Eigen::Matrix2cd m;
    m << cplx(q.w, q.x), cplx(q.y, q.z), cplx(-q.y, q.z), cplx(q.w, -q.x);
    return m;
}

// d(q^k)[v] = sum_j q^j v q^{k-1-j}.
inline Quat qpow_differential(const Quat& q, const Quat& v, int k) {
    Quat acc{0, 0, 0, 0};
    for (int j = 0; j < k; ++j) acc = acc + qpow(q, j) * v * qpow(q, k - 1 - j);
    return acc;
}

// A test cycle on the 3-sphere: q -> su2_matrix(q^power).
struct SphereCycle {
    int power = 1;

    Eigen::Matrix2cd value(const Quat& q) const { return su2_matrix(qpow(q, power)); }
    Eigen::Matrix2cd differential(const Quat& q, const Quat& v) const {
        return su2_matrix(qpow_differential(q, v, power));
    }
};

} // namespace gerbe
