#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gerbe/contour.hpp"

namespace gerbe {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct EigenvalueCluster {
    cplx value;
    int multiplicity = 0;
};

struct SpectrumData {
    std::vector<EigenvalueCluster> clusters; // canonically ordered, see below
    int dimension = 0;
    bool clustering_ambiguous = false; // two clusters closer than twice the clustering radius

    int total_multiplicity() const {
        int m = 0;
        for (const auto& c : clusters) m += c.multiplicity;
        return m;
    }
};

// Global ordering for eigenvalue-indexed data: angle in [0, 2pi), then
// modulus, then lexicographic on (re, im). Sign conventions downstream depend
// on every module agreeing on this order.
inline bool canonical_eigenvalue_less(cplx a, cplx b) {
    double ta = ray_angle(a), tb = ray_angle(b);
    if (ta != tb) return ta < tb;
    double ra = std::abs(a), rb = std::abs(b);
    if (ra != rb) return ra < rb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Eigenvalue multiset of an invertible matrix, clustered at tol.cluster.
inline SpectrumData spectrum_with_multiplicity(const Matrix& A,
                                               const Tolerances& tol = default_tolerances()) {
    require(A.rows() == A.cols() && A.rows() > 0, ErrorKind::Domain,
            "spectrum: matrix must be square");
    const int n = static_cast<int>(A.rows());
    require(std::abs(A.determinant()) > tol.det_guard, ErrorKind::Domain,
            "spectrum: matrix is singular within guard");

    Eigen::ComplexEigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
    require(solver.info() == Eigen::Success, ErrorKind::Conditioning,
            "spectrum: eigenvalue iteration failed");
    Vector raw = solver.eigenvalues();

    // Single-linkage clustering at radius tol.cluster.
    std::vector<int> label(n, -1);
    int n_clusters = 0;
    for (int i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        label[i] = n_clusters;
        bool grew = true;
        while (grew) { // membership can cascade
            grew = false;
            for (int j = 0; j < n; ++j) {
                if (label[j] >= 0) continue;
                for (int k = 0; k < n; ++k)
                    if (label[k] == n_clusters && std::abs(raw[j] - raw[k]) <= tol.cluster) {
                        label[j] = n_clusters;
                        grew = true;
                        break;
                    }
            }
        }
        ++n_clusters;
    }

    SpectrumData spec;
    spec.dimension = n;
    spec.clusters.resize(n_clusters);
    for (int c = 0; c < n_clusters; ++c) {
        cplx mean(0.0, 0.0);
        int count = 0;
        for (int i = 0; i < n; ++i)
            if (label[i] == c) {
                mean += raw[i];
                ++count;
            }
        spec.clusters[c] = {mean / static_cast<double>(count), count};
    }
    std::sort(spec.clusters.begin(), spec.clusters.end(),
              [](const EigenvalueCluster& a, const EigenvalueCluster& b) {
                  return canonical_eigenvalue_less(a.value, b.value);
              });
    for (std::size_t i = 0; i < spec.clusters.size(); ++i)
        for (std::size_t j = i + 1; j < spec.clusters.size(); ++j)
            if (std::abs(spec.clusters[i].value - spec.clusters[j].value) < 2.0 * tol.cluster)
                spec.clustering_ambiguous = true;
    return spec;
}

// True iff the ray of z meets the spectrum of A (within the angular tolerance).
inline bool is_eigenray(const SpectrumData& spec, cplx z,
                        const Tolerances& tol = default_tolerances()) {
    double t = ray_angle(z);
    for (const auto& c : spec.clusters)
        if (circular_distance(ray_angle(c.value), t) <= tol.ang_eps) return true;
    return false;
}

inline bool is_eigenray(const Matrix& A, cplx z,
                        const Tolerances& tol = default_tolerances()) {
    return is_eigenray(spectrum_with_multiplicity(A, tol), z, tol);
}

namespace detail {

// Shared resolvent quadrature core. Accumulates (1/2pi i) ∮ (zI - A)^{-1} dz
// and its trace, guarding |det(zI - A)| at every node.
struct ResolventIntegral {
    cplx trace{0.0, 0.0};
    Matrix full;
    double min_abs_det = std::numeric_limits<double>::infinity();
};

inline ResolventIntegral resolvent_contour_integral(const Matrix& A, const Contour& contour,
                                                    bool want_full, const Tolerances& tol) {
    require(contour.closed(1e-9), ErrorKind::Domain, "resolvent integral: contour not closed");
    const int n = static_cast<int>(A.rows());
    ResolventIntegral out;
    if (want_full) out.full = Matrix::Zero(n, n);
    const Matrix id = Matrix::Identity(n, n);
    for_each_contour_node(contour, tol.nodes_per_segment, [&](cplx z, cplx scale) {
        Eigen::PartialPivLU<Matrix> lu(z * id - A);
        double abs_det = std::abs(lu.determinant());
        out.min_abs_det = std::min(out.min_abs_det, abs_det);
        if (abs_det < tol.det_guard)
            fail(ErrorKind::Conditioning, "resolvent integral: spectrum too close to contour");
        Matrix res = lu.solve(id);
        out.trace += scale * res.trace();
        if (want_full) out.full += scale * res;
    });
    const cplx norm = cplx(0.0, two_pi);
    out.trace /= norm;
    if (want_full) out.full /= norm;
    return out;
}

} // namespace detail

struct ZeroCountResult {
    long count = 0;
    double residual = 0.0; // |raw - count|
    cplx raw{0.0, 0.0};
};

// Number of eigenvalues of A enclosed by the contour, with multiplicity,
// via (1/2pi i) ∮ trace((zI - A)^{-1}) dz.
inline ZeroCountResult zero_count_detailed(const Matrix& A, const Contour& contour,
                                           const Tolerances& tol = default_tolerances()) {
    auto integral = detail::resolvent_contour_integral(A, contour, false, tol);
    ZeroCountResult result;
    result.raw = integral.trace;
    result.count = std::lround(integral.trace.real());
    result.residual = std::abs(integral.trace - cplx(static_cast<double>(result.count), 0.0));
    if (result.residual > tol.count_round)
        fail(ErrorKind::Quadrature, "zero_count: integral too far from an integer");
    return result;
}

inline long zero_count(const Matrix& A, const Contour& contour,
                       const Tolerances& tol = default_tolerances()) {
    return zero_count_detailed(A, contour, tol).count;
}

// Riesz projector (1/2pi i) ∮ (zI - A)^{-1} dz onto the generalized
// eigenspaces enclosed by the contour.
inline Matrix riesz_projector(const Matrix& A, const Contour& contour,
                              const Tolerances& tol = default_tolerances()) {
    Matrix e = detail::resolvent_contour_integral(A, contour, true, tol).full;
    double idem = (e * e - e).norm();
    double comm = (A * e - e * A).norm();
    if (idem > 1e-8 || comm > 1e-8)
        fail(ErrorKind::Quadrature, "riesz_projector: projector laws violated (idempotency "
                                    "residual " + std::to_string(idem) + ")");
    return e;
}

// Union of discs around selected eigenvalues; the frame-level stand-in for an
// eigenvalue-carrying region.
struct DiscSystem {
    std::vector<cplx> centers;
    std::vector<double> radii;
    std::vector<int> multiplicities;

    int total_multiplicity() const {
        int m = 0;
        for (int k : multiplicities) m += k;
        return m;
    }
    bool empty() const { return centers.empty(); }
};

// Eigenvalue membership under the cut-snapping convention: values within
// ang_eps of the positive reals are classified as lying on the cut ray, which
// no sector boundary splits ambiguously. Proximity to any other boundary ray
// is an error; membership there cannot be decided reliably.
inline bool sector_contains_eigenvalue(const Sector& S, cplx lambda,
                                       const Tolerances& tol = default_tolerances()) {
    if (S.empty()) return false;
    double s = std::abs(lambda);
    require(s > 0.0, ErrorKind::Domain, "sector membership: zero eigenvalue");
    if (circular_distance(ray_angle(lambda), 0.0) <= tol.ang_eps)
        return in_sector(S, cplx(s, 0.0));
    if (s > S.r_min && s < S.r_max && angular_distance_to_boundary(S, lambda) <= tol.ang_eps)
        fail(ErrorKind::Domain, "eigenvalue on sector boundary");
    return in_sector(S, lambda);
}

// Places one disc per enclosed eigenvalue cluster: radius min(gap/3,
// boundary-clearance/2). Eigenvalues within the angular tolerance of the
// sector boundary are rejected; integrating through them is never attempted.
inline DiscSystem sector_disc_system(const SpectrumData& spec, const Sector& S,
                                     const Tolerances& tol = default_tolerances()) {
    DiscSystem discs;
    if (S.empty()) return discs;
    for (std::size_t i = 0; i < spec.clusters.size(); ++i) {
        cplx lambda = spec.clusters[i].value;
        if (!sector_contains_eigenvalue(S, lambda, tol)) continue;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < spec.clusters.size(); ++j)
            if (j != i) gap = std::min(gap, std::abs(lambda - spec.clusters[j].value));
        double clearance = distance_to_sector_boundary(S, lambda);
        double radius = std::min(gap / 3.0, clearance / 2.0);
        if (!std::isfinite(radius)) radius = clearance / 2.0;
        require(radius > 0.0, ErrorKind::Conditioning, "disc placement: no clearance");
        discs.centers.push_back(lambda);
        discs.radii.push_back(radius);
        discs.multiplicities.push_back(spec.clusters[i].multiplicity);
    }
    return discs;
}

inline DiscSystem sector_disc_system(const SpectrumData& spec, const std::vector<Sector>& sectors,
                                     const Tolerances& tol = default_tolerances()) {
    DiscSystem all;
    for (const auto& S : sectors) {
        DiscSystem d = sector_disc_system(spec, S, tol);
        for (std::size_t i = 0; i < d.centers.size(); ++i) {
            all.centers.push_back(d.centers[i]);
            all.radii.push_back(d.radii[i]);
            all.multiplicities.push_back(d.multiplicities[i]);
        }
    }
    return all;
}

// Sum of per-disc Riesz projectors.
inline Matrix disc_projector(const Matrix& A, const DiscSystem& discs,
                             const Tolerances& tol = default_tolerances()) {
    const int n = static_cast<int>(A.rows());
    Matrix e = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < discs.centers.size(); ++i)
        e += riesz_projector(A, circle_contour(discs.centers[i], discs.radii[i]), tol);
    return e;
}

struct SubspaceBasis {
    Matrix columns; // n x k; orthonormal per eigenvalue block

    int dimension() const { return static_cast<int>(columns.cols()); }
    int ambient() const { return static_cast<int>(columns.rows()); }
};

namespace detail {

// Rank-revealing extraction of the image of a projector of known rank.
inline Matrix projector_image(const Matrix& e, int rank, const Tolerances& tol) {
    const int n = static_cast<int>(e.rows());
    if (rank == 0) return Matrix(n, 0);
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinU);
    auto sv = svd.singularValues();
    require(sv(rank - 1) > 0.5, ErrorKind::Quadrature,
            "projector image: rank deficiency against known multiplicity");
    if (rank < n)
        require(sv(rank) < 100.0 * tol.rank, ErrorKind::Quadrature,
                "projector image: spurious directions against known multiplicity");
    return svd.matrixU().leftCols(rank);
}

} // namespace detail

// Basis of the direct sum of generalized eigenspaces with eigenvalue in S,
// grouped per eigenvalue in canonical order. Computed from per-disc Riesz
// projectors, never by integrating over the sector boundary itself.
inline SubspaceBasis eigenspace_basis(const Matrix& A, const SpectrumData& spec, const Sector& S,
                                      const Tolerances& tol = default_tolerances()) {
    DiscSystem discs = sector_disc_system(spec, S, tol);
    const int n = static_cast<int>(A.rows());
    SubspaceBasis basis;
    basis.columns = Matrix(n, discs.total_multiplicity());
    int col = 0;
    for (std::size_t i = 0; i < discs.centers.size(); ++i) {
        Matrix e = riesz_projector(A, circle_contour(discs.centers[i], discs.radii[i]), tol);
        Matrix block = detail::projector_image(e, discs.multiplicities[i], tol);
        basis.columns.middleCols(col, discs.multiplicities[i]) = block;
        col += discs.multiplicities[i];
    }
    return basis;
}

inline SubspaceBasis eigenspace_basis(const Matrix& A, const Sector& S,
                                      const Tolerances& tol = default_tolerances()) {
    return eigenspace_basis(A, spectrum_with_multiplicity(A, tol), S, tol);
}

inline SubspaceBasis eigenspace_basis(const Matrix& A, const std::vector<Sector>& sectors,
                                      const Tolerances& tol = default_tolerances()) {
    SpectrumData spec = spectrum_with_multiplicity(A, tol);
    DiscSystem discs = sector_disc_system(spec, sectors, tol);
    const int n = static_cast<int>(A.rows());
    SubspaceBasis basis;
    basis.columns = Matrix(n, discs.total_multiplicity());
    int col = 0;
    for (std::size_t i = 0; i < discs.centers.size(); ++i) {
        Matrix e = riesz_projector(A, circle_contour(discs.centers[i], discs.radii[i]), tol);
        Matrix block = detail::projector_image(e, discs.multiplicities[i], tol);
        basis.columns.middleCols(col, discs.multiplicities[i]) = block;
        col += discs.multiplicities[i];
    }
    return basis;
}

// Principal angles between the column spans of U and V, ascending.
inline std::vector<double> principal_angles(const Matrix& U, const Matrix& V) {
    if (U.cols() == 0 && V.cols() == 0) return {};
    require(U.cols() == V.cols() && U.rows() == V.rows(), ErrorKind::Domain,
            "principal_angles: dimension mismatch");
    Eigen::HouseholderQR<Matrix> qu(U), qv(V);
    Matrix Qu = qu.householderQ() * Matrix::Identity(U.rows(), U.cols());
    Matrix Qv = qv.householderQ() * Matrix::Identity(V.rows(), V.cols());
    Eigen::JacobiSVD<Matrix> svd(Qu.adjoint() * Qv);
    std::vector<double> angles;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        double s = std::clamp(svd.singularValues()(i), 0.0, 1.0);
        angles.push_back(std::acos(s));
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

inline double max_principal_angle(const Matrix& U, const Matrix& V) {
    auto angles = principal_angles(U, V);
    return angles.empty() ? 0.0 : angles.back();
}

inline int numerical_rank(const Matrix& M, const Tolerances& tol = default_tolerances()) {
    if (M.cols() == 0 || M.rows() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol.rank) ++r;
    return r;
}

} // namespace gerbe
