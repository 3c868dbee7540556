#pragma once

#include "gerbe/spectral.hpp"

namespace gerbe {

// Represented element of the top exterior power of a subspace of C^n:
// coeff * (b_1 ^ ... ^ b_k) over the columns b_j of basis. Degree zero encodes
// the canonical line of the zero subspace; the element is then the scalar
// itself. Two representations (B, c) and (B T, c / det T) denote the same
// element for invertible T.
struct TopWedge {
    Matrix basis; // n x k
    cplx coeff{1.0, 0.0};

    int ambient() const { return static_cast<int>(basis.rows()); }
    int degree() const { return static_cast<int>(basis.cols()); }
    bool zero() const { return coeff == cplx(0.0, 0.0); }
};

inline TopWedge scalar_wedge(int ambient, cplx value) {
    TopWedge w;
    w.basis = Matrix(ambient, 0);
    w.coeff = value;
    return w;
}

inline TopWedge wedge_of(const SubspaceBasis& basis, cplx coeff = cplx(1.0, 0.0)) {
    TopWedge w;
    w.basis = basis.columns;
    w.coeff = coeff;
    return w;
}

inline TopWedge scaled(const TopWedge& w, cplx s) {
    TopWedge out = w;
    out.coeff *= s;
    return out;
}

// The ratio r with v = r * w. Defined only when both represent elements of the
// same determinant line, i.e. the spans agree.
inline cplx wedge_ratio(const TopWedge& v, const TopWedge& w,
                        const Tolerances& tol = default_tolerances()) {
    require(!w.zero(), ErrorKind::Domain, "wedge_ratio: zero denominator");
    require(v.ambient() == w.ambient() && v.degree() == w.degree(), ErrorKind::Domain,
            "wedge_ratio: elements live over different spaces");
    if (v.degree() == 0) return v.coeff / w.coeff;
    if (!v.zero()) {
        double angle = max_principal_angle(v.basis, w.basis);
        if (angle > tol.span_match)
            fail(ErrorKind::Domain, "wedge_ratio: span mismatch (principal angle " +
                                        std::to_string(angle) + ")");
    }
    // Least squares is exact here since the system is consistent on the span.
    Matrix T = w.basis.householderQr().solve(v.basis);
    return v.coeff * T.determinant() / w.coeff;
}

// Concatenation realizing the product line of a direct sum. Unit: any degree
// zero wedge with coeff 1.
inline TopWedge concat(const TopWedge& u, const TopWedge& v,
                       const Tolerances& tol = default_tolerances()) {
    require(u.ambient() == v.ambient(), ErrorKind::Domain, "concat: ambient mismatch");
    TopWedge out;
    out.basis = Matrix(u.ambient(), u.degree() + v.degree());
    out.basis << u.basis, v.basis;
    out.coeff = u.coeff * v.coeff;
    if (out.degree() > 0 && !out.zero()) {
        Eigen::JacobiSVD<Matrix> svd(out.basis);
        double smallest = svd.singularValues()(svd.singularValues().size() - 1);
        if (out.degree() > out.ambient() || smallest <= tol.rank)
            fail(ErrorKind::Domain, "concat: spans not transverse");
    }
    return out;
}

// The unique functional sending w to 1.
struct DualTopWedge {
    TopWedge w;
};

inline DualTopWedge dual_of(const TopWedge& w) {
    require(!w.zero(), ErrorKind::Domain, "dual_of: zero wedge has no dual");
    return {w};
}

// s * (w^dual) = (w / s)^dual.
inline DualTopWedge scaled(const DualTopWedge& a, cplx s) {
    require(s != cplx(0.0, 0.0), ErrorKind::Domain, "scaled dual: zero scalar");
    return {scaled(a.w, 1.0 / s)};
}

inline cplx pair_dual(const DualTopWedge& a, const TopWedge& v,
                      const Tolerances& tol = default_tolerances()) {
    return wedge_ratio(v, a.w, tol);
}

} // namespace gerbe
