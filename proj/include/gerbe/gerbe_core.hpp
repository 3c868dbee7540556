#pragma once

#include <functional>
#include <random>

#include "gerbe/wedge.hpp"

namespace gerbe {

// Membership in the total space over GL(n, C): z off the closed positive real
// axis and not an eigenray of A, with margin. Returns false on violations;
// only a non-square input is an error.
inline bool in_Y(const SpectrumData& spec, cplx z, const Tolerances& tol = default_tolerances()) {
    if (z == cplx(0.0, 0.0) || !off_positive_reals(z)) return false;
    double t = ray_angle(z);
    for (const auto& c : spec.clusters)
        if (circular_distance(ray_angle(c.value), t) <= tol.ang_eps) return false;
    return true;
}

inline bool in_Y(const Matrix& A, cplx z, const Tolerances& tol = default_tolerances()) {
    require(A.rows() == A.cols() && A.rows() > 0, ErrorKind::Domain, "in_Y: non-square matrix");
    if (std::abs(A.determinant()) <= tol.det_guard) return false;
    return in_Y(spectrum_with_multiplicity(A, tol), z, tol);
}

// Canonically ordered top wedge of the eigenspace sum for angles in
// (0, ray_angle(x)).
inline TopWedge lambda_basis(const Matrix& A, const SpectrumData& spec, cplx x,
                             const Tolerances& tol = default_tolerances()) {
    require(in_Y(spec, x, tol), ErrorKind::Domain, "lambda_basis: point not in Y");
    Sector S = sector_between(cplx(1.0, 0.0), x);
    return wedge_of(eigenspace_basis(A, spec, S, tol));
}

inline TopWedge lambda_basis(const Matrix& A, cplx x,
                             const Tolerances& tol = default_tolerances()) {
    return lambda_basis(A, spectrum_with_multiplicity(A, tol), x, tol);
}

// Element u (x) alpha of the line lambda(x) (x) lambda(y)^* over a fixed matrix.
struct LineFiberElement {
    Matrix A;
    cplx x, y;
    TopWedge u;         // over V_{S(1,x)}(A)
    DualTopWedge alpha; // dual over V_{S(1,y)}(A)
};

// m(u (x) alpha, v (x) beta) = alpha(v) u (x) beta. Requires a shared middle
// coordinate and the same underlying matrix.
inline LineFiberElement multiply(const LineFiberElement& p, const LineFiberElement& q,
                                 const Tolerances& tol = default_tolerances()) {
    require(p.y == q.x, ErrorKind::Domain, "multiply: fibers do not share the middle point");
    require(p.A.rows() == q.A.rows() && (p.A - q.A).norm() <= 1e-12 * (1.0 + p.A.norm()),
            ErrorKind::Domain, "multiply: fiber mismatch (different matrices)");
    LineFiberElement out;
    out.A = p.A;
    out.x = p.x;
    out.y = q.y;
    out.u = scaled(p.u, pair_dual(p.alpha, q.u, tol));
    out.alpha = q.alpha;
    return out;
}

// Ratio r with p = r * q for elements of the same fiber.
inline cplx fiber_ratio(const LineFiberElement& p, const LineFiberElement& q,
                        const Tolerances& tol = default_tolerances()) {
    require(p.x == q.x && p.y == q.y, ErrorKind::Domain, "fiber_ratio: different fibers");
    return wedge_ratio(p.u, q.u, tol) / wedge_ratio(p.alpha.w, q.alpha.w, tol);
}

// The canonical unit at (A, y, y): w (x) w^dual for any representative w.
inline LineFiberElement unit_fiber(const Matrix& A, const SpectrumData& spec, cplx y,
                                   const Tolerances& tol = default_tolerances()) {
    TopWedge w = lambda_basis(A, spec, y, tol);
    return {A, y, y, w, dual_of(w)};
}

// Dual element in the swapped fiber; multiplying with the original yields the
// canonical unit.
inline LineFiberElement swapped_dual(const LineFiberElement& p) {
    return {p.A, p.y, p.x, p.alpha.w, dual_of(p.u)};
}

enum class FiberIdentification {
    TrivialLine, // no spectrum between the rays: canonically C
    SectorWedge, // x >= y: the determinant line of the in-between eigenspaces
    DualOfSwap,  // x < y: dual of the swapped fiber
};

inline FiberIdentification canonical_identify(const SpectrumData& spec, cplx x, cplx y,
                                              const Tolerances& tol = default_tolerances()) {
    Sector S = unordered_sector(x, y);
    bool meets = false;
    for (const auto& c : spec.clusters)
        if (sector_contains_eigenvalue(S, c.value, tol)) meets = true;
    if (!meets) return FiberIdentification::TrivialLine;
    return ray_angle(x) >= ray_angle(y) ? FiberIdentification::SectorWedge
                                        : FiberIdentification::DualOfSwap;
}

// Realize a fiber element from a wedge omega over V_{S[x,y]}(A). The choice of
// lambda-representative cancels, so the result is well defined:
//   theta(x) >= theta(y):  concat(w_y, omega) (x) w_y^dual,
//   theta(x) <  theta(y):  w_x (x) concat(w_x, omega)^dual.
inline LineFiberElement fiber_from_sector_wedge(const Matrix& A, const SpectrumData& spec,
                                                cplx x, cplx y, const TopWedge& omega,
                                                const Tolerances& tol = default_tolerances()) {
    if (ray_angle(x) >= ray_angle(y)) {
        TopWedge wy = lambda_basis(A, spec, y, tol);
        return {A, x, y, concat(wy, omega, tol), dual_of(wy)};
    }
    TopWedge wx = lambda_basis(A, spec, x, tol);
    return {A, x, y, wx, dual_of(concat(wx, omega, tol))};
}

// Inverse of the above on the same fiber: the wedge over V_{S[x,y]}(A)
// corresponding to p.
inline TopWedge sector_wedge_from_fiber(const LineFiberElement& p, const SpectrumData& spec,
                                        const Tolerances& tol = default_tolerances()) {
    TopWedge omega0 = wedge_of(eigenspace_basis(p.A, spec, unordered_sector(p.x, p.y), tol));
    LineFiberElement ref = fiber_from_sector_wedge(p.A, spec, p.x, p.y, omega0, tol);
    return scaled(omega0, fiber_ratio(p, ref, tol));
}

// ---------------------------------------------------------------------------
// Projector frames: value and connection of the section A -> e_A * ref over a
// fixed disc system.

inline TopWedge projector_frame_value(const Matrix& A, const DiscSystem& discs, const Matrix& ref,
                                      const Tolerances& tol = default_tolerances()) {
    if (ref.cols() == 0) return scalar_wedge(static_cast<int>(A.rows()), cplx(1.0, 0.0));
    TopWedge w;
    w.basis = disc_projector(A, discs, tol) * ref;
    w.coeff = cplx(1.0, 0.0);
    return w;
}

// d e_A [dA] = (1/2pi i) ∮ (zI-A)^{-1} dA (zI-A)^{-1} dz over the disc system.
inline Matrix projector_derivative(const Matrix& A, const DiscSystem& discs, const Matrix& dA,
                                   const Tolerances& tol = default_tolerances()) {
    const int n = static_cast<int>(A.rows());
    const Matrix id = Matrix::Identity(n, n);
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t d = 0; d < discs.centers.size(); ++d) {
        Contour contour = circle_contour(discs.centers[d], discs.radii[d]);
        for_each_contour_node(contour, tol.nodes_per_segment, [&](cplx z, cplx scale) {
            Eigen::PartialPivLU<Matrix> lu(z * id - A);
            if (std::abs(lu.determinant()) < tol.det_guard)
                fail(ErrorKind::Conditioning, "projector_derivative: spectrum too close to contour");
            Matrix res = lu.solve(id);
            acc += scale * (res * dA * res);
        });
    }
    return acc / cplx(0.0, two_pi);
}

// Connection form of the frame wedge in direction dA: theta = tr(M) where
// F M = e_A (d e_A [dA]) ref with F = e_A ref.
inline cplx projector_frame_connection(const Matrix& A, const DiscSystem& discs, const Matrix& ref,
                                       const Matrix& dA,
                                       const Tolerances& tol = default_tolerances()) {
    if (ref.cols() == 0) return cplx(0.0, 0.0);
    Matrix e = disc_projector(A, discs, tol);
    Matrix F = e * ref;
    Eigen::JacobiSVD<Matrix> svd(F);
    require(svd.singularValues()(svd.singularValues().size() - 1) > tol.rank,
            ErrorKind::Domain, "frame connection: rank loss");
    Matrix dF = projector_derivative(A, discs, dA, tol) * ref;
    Matrix M = F.householderQr().solve(e * dF);
    return M.trace();
}

// ---------------------------------------------------------------------------
// Local trivializations.

struct Trivialization {
    Matrix A0;
    cplx x0, y0;
    DiscSystem discs; // fixed; empty system encodes the scalar frame
    Matrix ref_basis; // orthonormal basis of V_O(A0)
    double radius_A = 0.0;   // certified Frobenius radius about A0
    double radius_ang = 0.0; // certified angular radius about x0 and y0
    double certified_margin = 0.0;

    int rank() const { return static_cast<int>(ref_basis.cols()); }

    TopWedge frame(const Matrix& A, const Tolerances& tol = default_tolerances()) const {
        return projector_frame_value(A, discs, ref_basis, tol);
    }

    // |det(B0^* e_A B0)|; equals 1 at the center.
    double frame_gram(const Matrix& A, const Tolerances& tol = default_tolerances()) const {
        if (rank() == 0) return 1.0;
        Matrix e = disc_projector(A, discs, tol);
        return std::abs((ref_basis.adjoint() * e * ref_basis).determinant());
    }

    bool contains(const Matrix& A, cplx x, cplx y) const {
        return (A - A0).norm() < radius_A &&
               circular_distance(ray_angle(x), ray_angle(x0)) < radius_ang &&
               circular_distance(ray_angle(y), ray_angle(y0)) < radius_ang;
    }
};

namespace detail {

// Fixed direction sample for neighborhood certification.
inline const std::vector<Matrix>& certification_directions(int n) {
    static std::map<int, std::vector<Matrix>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::mt19937_64 rng(0x5eed0001u + static_cast<unsigned>(n));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<Matrix> dirs;
        for (int k = 0; k < 16; ++k) {
            Matrix D(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) D(r, c) = cplx(gauss(rng), gauss(rng));
            dirs.push_back(D / D.norm());
        }
        it = cache.emplace(n, std::move(dirs)).first;
    }
    return it->second;
}

} // namespace detail

// Local trivialization at (A0, x0, y0): discs around the eigenvalues between
// the rays of x0 and y0, frame = Riesz-projected reference basis. The
// neighborhood radius is shrunk until the frame Gram determinant stays above
// half its center value on a fixed direction sample.
inline Trivialization local_trivialization(const Matrix& A0, cplx x0, cplx y0,
                                           const Tolerances& tol = default_tolerances(),
                                           double disc_factor = 1.0) {
    require(disc_factor > 0.0 && disc_factor <= 1.0, ErrorKind::Domain,
            "local_trivialization: disc factor must lie in (0, 1]");
    SpectrumData spec = spectrum_with_multiplicity(A0, tol);
    require(in_Y(spec, x0, tol) && in_Y(spec, y0, tol), ErrorKind::Domain,
            "local_trivialization: base point not in Y^[2]");
    Trivialization T;
    T.A0 = A0;
    T.x0 = x0;
    T.y0 = y0;
    Sector S = unordered_sector(x0, y0);
    T.discs = sector_disc_system(spec, S, tol);
    for (double& r : T.discs.radii) r *= disc_factor;
    T.ref_basis = eigenspace_basis(A0, spec, S, tol).columns;

    // Angular clearance: stay away from every eigenray and from the cut.
    double ang = two_pi;
    for (cplx z : {x0, y0}) {
        double t = ray_angle(z);
        ang = std::min(ang, circular_distance(t, 0.0));
        for (const auto& c : spec.clusters) ang = std::min(ang, circular_distance(t, ray_angle(c.value)));
    }
    T.radius_ang = 0.5 * ang;

    if (T.rank() == 0) {
        T.radius_A = 0.25;
        T.certified_margin = 1.0;
        return T;
    }
    double radius = 0.5 * *std::min_element(T.discs.radii.begin(), T.discs.radii.end());
    const auto& dirs = detail::certification_directions(static_cast<int>(A0.rows()));
    while (radius >= 1e-6) {
        double worst = 1.0;
        for (const auto& D : dirs)
            worst = std::min(worst, T.frame_gram(A0 + radius * D, tol));
        if (worst > 0.5) {
            T.radius_A = radius;
            T.certified_margin = worst;
            return T;
        }
        radius *= 0.5;
    }
    fail(ErrorKind::Certification,
         "local_trivialization: could not certify a nonvanishing frame above minimum radius");
}

// Ratio of the two trivialization frames at a common point; nonvanishing and
// holomorphic in A.
inline cplx transition_scalar(const Trivialization& T1, const Trivialization& T2, const Matrix& A,
                              const Tolerances& tol = default_tolerances()) {
    return wedge_ratio(T1.frame(A, tol), T2.frame(A, tol), tol);
}

// ---------------------------------------------------------------------------
// Numerical Cauchy-Riemann test.

inline std::vector<Matrix> elementary_directions(int n) {
    std::vector<Matrix> dirs;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Matrix E = Matrix::Zero(n, n);
            E(r, c) = cplx(1.0, 0.0);
            dirs.push_back(E);
        }
    return dirs;
}

// Max over directions of the central-difference antiholomorphic derivative
//   (f(A+hE) - f(A-hE) + i f(A+ihE) - i f(A-ihE)) / (4h).
// Vanishes to O(h^2) for holomorphic f.
inline double cr_residual(const std::function<cplx(const Matrix&)>& f, const Matrix& A, double h,
                          const std::vector<Matrix>& directions) {
    require(h > 0.0, ErrorKind::Domain, "cr_residual: step must be positive");
    const cplx iu(0.0, 1.0);
    double worst = 0.0;
    for (const auto& E : directions) {
        cplx d = (f(A + h * E) - f(A - h * E) + iu * f(A + (iu * h) * E) -
                  iu * f(A - (iu * h) * E)) /
                 (4.0 * h);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

inline double cr_residual(const std::function<cplx(const Matrix&)>& f, const Matrix& A, double h) {
    return cr_residual(f, A, h, elementary_directions(static_cast<int>(A.rows())));
}

// Connection form of a trivialization frame in matrix direction dA.
inline cplx connection_one_form(const Trivialization& T, const Matrix& A, const Matrix& dA,
                                const Tolerances& tol = default_tolerances()) {
    return projector_frame_connection(A, T.discs, T.ref_basis, dA, tol);
}

} // namespace gerbe
