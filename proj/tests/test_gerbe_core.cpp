#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gerbe/gerbe_core.hpp"
#include "gerbe/random_ensembles.hpp"

using namespace gerbe;

namespace {

Matrix diag2(cplx a, cplx b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Random fiber element over (A, x, y) built from eigenspace wedges.
LineFiberElement random_fiber(std::mt19937_64& rng, const Matrix& A, const SpectrumData& spec,
                              cplx x, cplx y) {
    std::uniform_real_distribution<double> unit(0.2, 1.8);
    cplx su(unit(rng), unit(rng) - 1.0), sa(unit(rng), unit(rng) - 1.0);
    TopWedge u = scaled(lambda_basis(A, spec, x), su);
    TopWedge w = scaled(lambda_basis(A, spec, y), sa);
    return {A, x, y, u, dual_of(w)};
}

} // namespace

TEST_CASE("membership in Y") {
    Matrix A = diag2(cplx(0, 1), cplx(-2, 0));
    CHECK(in_Y(A, std::polar(1.0, pi / 4)));
    CHECK_FALSE(in_Y(A, cplx(0, 3)));  // eigenray
    CHECK_FALSE(in_Y(A, cplx(1, 0)));  // positive reals excluded
    CHECK_FALSE(in_Y(A, cplx(0, 0)));
    CHECK_THROWS_AS(in_Y(Matrix::Zero(2, 3), cplx(0, 1)), Error);
}

TEST_CASE("lambda basis dimensions") {
    Matrix A = diag2(std::polar(1.0, pi / 2), std::polar(1.0, pi));
    SpectrumData spec = spectrum_with_multiplicity(A);

    TopWedge w = lambda_basis(A, spec, std::polar(1.0, 3 * pi / 4));
    CHECK(w.degree() == 1); // only the eigenvalue at angle pi/2 is below 3pi/4

    TopWedge none = lambda_basis(A, spec, std::polar(1.0, pi / 4));
    CHECK(none.degree() == 0);
    CHECK(none.coeff == cplx(1, 0));

    // eigenvalues on the positive reals lie in no sector from the cut
    Matrix id = Matrix::Identity(3, 3);
    TopWedge idw = lambda_basis(id, std::polar(1.0, 2.0));
    CHECK(idw.degree() == 0);
}

TEST_CASE("fiber dimension law on random samples") {
    std::mt19937_64 rng(1311);
    EnsembleOptions opt;
    opt.angle_gap = 0.05;
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 20; ++trial) {
        opt.n = dim(rng);
        SampledMatrix m = random_guarded_matrix(rng, opt);
        SpectrumData spec = spectrum_with_multiplicity(m.A);
        cplx x = random_admissible_direction(rng, m, 0.02);
        int expected = 0;
        for (const auto& c : m.truth)
            if (ray_angle(c.value) < ray_angle(x)) expected += c.multiplicity;
        CHECK(lambda_basis(m.A, spec, x).degree() == expected);
    }
}

TEST_CASE("gerbe multiplication") {
    std::mt19937_64 rng(1312);
    EnsembleOptions opt;
    opt.n = 4;
    opt.angle_gap = 0.05;
    SampledMatrix m = random_guarded_matrix(rng, opt);
    SpectrumData spec = spectrum_with_multiplicity(m.A);

    cplx x = random_admissible_direction(rng, m, 0.03);
    cplx y = random_admissible_direction(rng, m, 0.03);
    cplx z = random_admissible_direction(rng, m, 0.03);

    LineFiberElement p = random_fiber(rng, m.A, spec, x, y);
    LineFiberElement q = random_fiber(rng, m.A, spec, y, z);

    // unit on the right
    LineFiberElement unit = unit_fiber(m.A, spec, y);
    LineFiberElement pu = multiply(p, unit);
    CHECK(std::abs(fiber_ratio(pu, p) - cplx(1, 0)) < 1e-10);

    // swapped dual pairs to the unit
    LineFiberElement pd = swapped_dual(p);
    LineFiberElement prod = multiply(p, pd);
    CHECK(std::abs(fiber_ratio(prod, unit_fiber(m.A, spec, x)) - cplx(1, 0)) < 1e-10);

    // mismatched middle point
    CHECK_THROWS_AS(multiply(p, p), Error);

    // the product scalar on diagonal matrices matches the direct determinant
    Matrix D = diag2(std::polar(1.0, 1.0), std::polar(1.5, 2.5));
    SpectrumData dspec = spectrum_with_multiplicity(D);
    cplx dx = std::polar(1.0, 3.0), dy = std::polar(1.0, 2.0), dz = std::polar(1.0, 1.5);
    LineFiberElement dp = {D, dx, dy, lambda_basis(D, dspec, dx), dual_of(lambda_basis(D, dspec, dy))};
    LineFiberElement dq = {D, dy, dz, lambda_basis(D, dspec, dy), dual_of(lambda_basis(D, dspec, dz))};
    LineFiberElement dr = multiply(dp, dq);
    // alpha_p and u_q share the eigenspace of the angle-1.0 eigenvalue; their
    // pairing is 1, so the result is u_p (x) beta_q on the nose.
    CHECK(std::abs(fiber_ratio(dr, LineFiberElement{D, dx, dz, dp.u, dq.alpha}) - cplx(1, 0)) <
          1e-12);
}

TEST_CASE("associativity of the triple product") {
    std::mt19937_64 rng(1313);
    EnsembleOptions opt;
    opt.angle_gap = 0.05;
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 25; ++trial) {
        opt.n = dim(rng);
        SampledMatrix m = random_guarded_matrix(rng, opt);
        SpectrumData spec = spectrum_with_multiplicity(m.A);
        cplx x = random_admissible_direction(rng, m, 0.03);
        cplx y = random_admissible_direction(rng, m, 0.03);
        cplx z = random_admissible_direction(rng, m, 0.03);
        cplx w = random_admissible_direction(rng, m, 0.03);
        LineFiberElement p = random_fiber(rng, m.A, spec, x, y);
        LineFiberElement q = random_fiber(rng, m.A, spec, y, z);
        LineFiberElement r = random_fiber(rng, m.A, spec, z, w);
        cplx ratio = fiber_ratio(multiply(multiply(p, q), r), multiply(p, multiply(q, r)));
        CHECK(std::abs(ratio - cplx(1, 0)) < 1e-10);
    }
}

TEST_CASE("canonical identifications") {
    Matrix A = diag2(cplx(0, 1), cplx(-2, 0));
    SpectrumData spec = spectrum_with_multiplicity(A);

    cplx same = std::polar(1.0, 2.0);
    CHECK(canonical_identify(spec, same, same) == FiberIdentification::TrivialLine);

    // sector between pi/4 and 2.6 contains only the eigenvalue i; the ray of
    // x stays clear of the eigenray at pi
    cplx x = std::polar(1.0, 2.6), y = std::polar(1.0, pi / 4);
    CHECK(canonical_identify(spec, x, y) == FiberIdentification::SectorWedge);
    CHECK(canonical_identify(spec, y, x) == FiberIdentification::DualOfSwap);

    // the identification realizes a one-dimensional wedge
    TopWedge omega = wedge_of(eigenspace_basis(A, unordered_sector(x, y)), cplx(0.7, -0.2));
    CHECK(omega.degree() == 1);
    LineFiberElement p = fiber_from_sector_wedge(A, spec, x, y, omega);
    TopWedge back = sector_wedge_from_fiber(p, spec);
    CHECK(std::abs(wedge_ratio(back, omega) - cplx(1, 0)) < 1e-10);

    // swap duality: identify(A, y, x) applied to the swapped dual inverts the scalar
    LineFiberElement pd = swapped_dual(p);
    TopWedge omega_swap = sector_wedge_from_fiber(pd, spec);
    cplx forward = wedge_ratio(omega, wedge_of(eigenspace_basis(A, unordered_sector(x, y))));
    cplx backward = wedge_ratio(omega_swap, wedge_of(eigenspace_basis(A, unordered_sector(x, y))));
    CHECK(std::abs(forward * backward - cplx(1, 0)) < 1e-10);
}

TEST_CASE("local trivialization and transition scalars") {
    Matrix A0 = diag2(cplx(0, 1), cplx(-2, 0));
    cplx x0 = std::polar(1.0, 2.6), y0 = std::polar(1.0, pi / 4);

    Trivialization T = local_trivialization(A0, x0, y0);
    CHECK(T.rank() == 1);
    CHECK(T.discs.centers.size() == 1);
    CHECK(std::abs(T.discs.centers[0] - cplx(0, 1)) < 1e-8);
    CHECK(T.radius_A > 1e-6);

    // frame at the center equals the lambda-based fiber representative up to a
    // finite nonzero ratio
    SpectrumData spec = spectrum_with_multiplicity(A0);
    TopWedge sector_rep = wedge_of(eigenspace_basis(A0, spec, unordered_sector(x0, y0)));
    cplx r = wedge_ratio(T.frame(A0), sector_rep);
    CHECK(std::isfinite(std::abs(r)));
    CHECK(std::abs(r) > 1e-8);

    // trivial case: no spectrum between the rays
    Matrix B0 = diag2(std::polar(1.0, 3.0), std::polar(2.0, 3.2));
    Trivialization TB = local_trivialization(B0, std::polar(1.0, 1.0), std::polar(1.0, 1.5));
    CHECK(TB.rank() == 0);
    CHECK(TB.frame(B0).degree() == 0);
    CHECK(TB.frame(B0).coeff == cplx(1, 0));

    // identical trivializations give ratio one; different disc radii agree to
    // quadrature accuracy
    CHECK(std::abs(transition_scalar(T, T, A0) - cplx(1, 0)) < 1e-12);
    Trivialization T2 = local_trivialization(A0, x0, y0, default_tolerances(), 0.6);
    CHECK(std::abs(transition_scalar(T, T2, A0) - cplx(1, 0)) < 1e-8);
}

TEST_CASE("cauchy-riemann residual") {
    std::mt19937_64 rng(1314);
    EnsembleOptions opt;
    opt.n = 3;
    SampledMatrix m = random_guarded_matrix(rng, opt);

    auto det_fn = [](const Matrix& A) { return cplx(A.determinant()); };
    CHECK(cr_residual(det_fn, m.A, 1e-5) < 1e-9);

    // an explicitly antiholomorphic factor is detected at its analytic size
    auto bad_fn = [](const Matrix& A) { return A.determinant() * std::conj(A(0, 0)); };
    double bad = cr_residual(bad_fn, m.A, 1e-5);
    CHECK(bad == Catch::Approx(std::abs(m.A.determinant())).epsilon(1e-4));

    // O(h^2) vanishing for a holomorphic function with third-order terms
    auto cubic = [](const Matrix& A) {
        cplx t = A(0, 0);
        return std::exp(cplx(2.0, 0.0) * t) + A.determinant() * A.determinant() * t;
    };
    double res_h = cr_residual(cubic, m.A, 1e-2);
    double res_h2 = cr_residual(cubic, m.A, 5e-3);
    CHECK(res_h2 / res_h > 0.15);
    CHECK(res_h2 / res_h < 0.35);
}

TEST_CASE("connection one form") {
    // flat along the diagonal stratum: diagonal matrices, diagonal directions
    Matrix A0 = diag2(cplx(0, 1), cplx(-2, 0));
    Trivialization T = local_trivialization(A0, std::polar(1.0, 2.6), std::polar(1.0, pi / 4));
    Matrix dA = diag2(cplx(1, 0), cplx(0, 0));
    CHECK(std::abs(connection_one_form(T, A0, dA)) < 1e-10);

    // dA = 0 gives zero
    CHECK(std::abs(connection_one_form(T, A0, Matrix::Zero(2, 2))) < 1e-14);

    // at the trivialization center the form vanishes for every direction:
    // e de e = 0 pins the radial gauge
    std::mt19937_64 rng(1315);
    EnsembleOptions opt;
    opt.n = 3;
    opt.angle_gap = 0.05;
    SampledMatrix m = random_guarded_matrix(rng, opt);
    cplx x = random_admissible_direction(rng, m, 0.05);
    cplx y = random_admissible_direction(rng, m, 0.05);
    Trivialization Tm = local_trivialization(m.A, x, y);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix D(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) D(r, c) = cplx(gauss(rng), gauss(rng));
    if (Tm.rank() > 0) CHECK(std::abs(connection_one_form(Tm, m.A, D)) < 1e-8);

    // off center the form matches the finite-difference log derivative of the
    // frame ratio
    if (Tm.rank() > 0) {
        Matrix offset = 0.25 * Tm.radius_A * D / D.norm();
        Matrix A1 = m.A + offset;
        cplx theta = connection_one_form(Tm, A1, D);
        double t = 1e-6;
        Matrix e1 = disc_projector(A1, Tm.discs);
        auto projected_frame = [&](const Matrix& arg) {
            TopWedge w;
            w.basis = e1 * disc_projector(arg, Tm.discs) * Tm.ref_basis;
            w.coeff = cplx(1, 0);
            return w;
        };
        cplx rp = wedge_ratio(projected_frame(A1 + t * D), Tm.frame(A1));
        cplx rm = wedge_ratio(projected_frame(A1 - t * D), Tm.frame(A1));
        cplx fd = (std::log(rp) - std::log(rm)) / (2.0 * t);
        CHECK(std::abs(theta - fd) < 1e-6);
    }
}
