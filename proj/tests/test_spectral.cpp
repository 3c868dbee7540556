#include <catch2/catch_amalgamated.hpp>

#include "gerbe/random_ensembles.hpp"
#include "gerbe/spectral.hpp"

using namespace gerbe;

namespace {

Matrix diag2(cplx a, cplx b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Count of ground-truth eigenvalues enclosed by a disc.
long disc_membership_count(const SampledMatrix& m, cplx center, double radius) {
    long k = 0;
    for (const auto& c : m.truth)
        if (std::abs(c.value - center) < radius) k += c.multiplicity;
    return k;
}

double truth_contour_clearance(const SampledMatrix& m, const Contour& contour, int probes = 257) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : contour.segments)
        for (int i = 0; i <= probes; ++i) {
            cplx z = segment_point(seg, double(i) / probes);
            for (const auto& c : m.truth) best = std::min(best, std::abs(c.value - z));
        }
    return best;
}

} // namespace

TEST_CASE("spectrum with multiplicity") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = cplx(0, 2);
    A(1, 1) = cplx(0, 2);
    A(2, 2) = cplx(-3, 0);
    SpectrumData spec = spectrum_with_multiplicity(A);
    REQUIRE(spec.clusters.size() == 2);
    // canonical order: angle pi/2 before pi
    CHECK(std::abs(spec.clusters[0].value - cplx(0, 2)) < 1e-10);
    CHECK(spec.clusters[0].multiplicity == 2);
    CHECK(std::abs(spec.clusters[1].value - cplx(-3, 0)) < 1e-10);
    CHECK(spec.clusters[1].multiplicity == 1);

    // Jordan block at -1: characteristic polynomial (X+1)^2, one root of
    // multiplicity two.
    Matrix J(2, 2);
    J << cplx(-1, 0), cplx(1, 0), cplx(0, 0), cplx(-1, 0);
    SpectrumData jspec = spectrum_with_multiplicity(J);
    REQUIRE(jspec.clusters.size() == 1);
    CHECK(jspec.clusters[0].multiplicity == 2);
    CHECK(std::abs(jspec.clusters[0].value - cplx(-1, 0)) < 1e-6);

    SpectrumData id3 = spectrum_with_multiplicity(Matrix::Identity(3, 3));
    REQUIRE(id3.clusters.size() == 1);
    CHECK(id3.clusters[0].multiplicity == 3);

    CHECK_THROWS_AS(spectrum_with_multiplicity(Matrix::Zero(2, 2)), Error);
}

TEST_CASE("eigenray test") {
    Matrix A = diag2(cplx(0, 2), cplx(-3, 0));
    CHECK(is_eigenray(A, cplx(0, 5)));
    CHECK_FALSE(is_eigenray(A, cplx(1, 1)));
    CHECK_FALSE(is_eigenray(Matrix::Identity(2, 2), cplx(-1, 0)));
}

TEST_CASE("zero count basics") {
    CHECK(zero_count(Matrix::Identity(2, 2), circle_contour(cplx(0, 0), 2.0)) == 2);

    // annular sector enclosing only the eigenvalue 2i; -3 clears the boundary
    Matrix A = diag2(cplx(0, 2), cplx(-3, 0));
    Sector s = sector_between(std::polar(1.0, pi / 4), std::polar(1.0, 5 * pi / 6));
    CHECK(zero_count(A, sector_boundary_contour(s, 1.0, 4.0)) == 1);

    // a boundary ray through an eigenvalue trips the conditioning guard
    Sector bad = sector_between(std::polar(1.0, pi / 4), std::polar(1.0, pi));
    CHECK_THROWS_AS(zero_count(A, sector_boundary_contour(bad, 1.0, 4.0)), Error);

    Matrix J(2, 2);
    J << cplx(-1, 0), cplx(1, 0), cplx(0, 0), cplx(-1, 0);
    CHECK(zero_count(J, circle_contour(cplx(-1, 0), 0.5)) == 2);

    // a contour through part of the spectrum is rejected by the rounding guard
    Matrix B = diag2(cplx(1, 0), cplx(2, 0));
    CHECK_THROWS_AS(zero_count(B, circle_contour(cplx(0.3, 0), 0.7)), Error);
}

TEST_CASE("riesz projector basics") {
    Matrix A = diag2(cplx(1, 1), cplx(5, 0));
    Matrix e = riesz_projector(A, circle_contour(cplx(1, 1), 0.5));
    CHECK((e - diag2(cplx(1, 0), cplx(0, 0))).norm() < 1e-10);

    Matrix id = Matrix::Identity(3, 3);
    Matrix e_all = riesz_projector(id, circle_contour(cplx(1, 0), 0.3));
    CHECK((e_all - id).norm() < 1e-10);
}

TEST_CASE("argument principle against membership oracle") {
    std::mt19937_64 rng(7001);
    EnsembleOptions opt;
    opt.repeat_probability = 0.25;
    opt.jordan_probability = 0.5;
    std::uniform_int_distribution<int> dim(2, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
        opt.n = dim(rng);
        SampledMatrix m = random_guarded_matrix(rng, opt);
        std::size_t pick = std::uniform_int_distribution<std::size_t>(0, m.truth.size() - 1)(rng);
        cplx center = m.truth[pick].value + 0.05 * cplx(unit(rng) - 0.5, unit(rng) - 0.5);
        double radius = 0.1 + 0.8 * unit(rng);
        Contour c = circle_contour(center, radius);
        if (truth_contour_clearance(m, c) < 0.05) continue; // healthy margin only
        ++checked;
        auto result = zero_count_detailed(m.A, c);
        CHECK(result.count == disc_membership_count(m, center, radius));
        CHECK(result.residual < 1e-6);
    }
    CHECK(checked > 60);
}

TEST_CASE("quadrature refinement stability") {
    std::mt19937_64 rng(7002);
    EnsembleOptions opt;
    opt.n = 4;
    for (int trial = 0; trial < 10; ++trial) {
        SampledMatrix m = random_guarded_matrix(rng, opt);
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j < m.truth.size(); ++j)
            gap = std::min(gap, std::abs(m.truth[0].value - m.truth[j].value));
        Contour c = circle_contour(m.truth[0].value, std::min(0.5, 0.4 * gap));
        Tolerances coarse = default_tolerances();
        Tolerances fine = coarse;
        fine.nodes_per_segment = 2 * coarse.nodes_per_segment;
        cplx raw_coarse = zero_count_detailed(m.A, c, coarse).raw;
        cplx raw_fine = zero_count_detailed(m.A, c, fine).raw;
        CHECK(std::abs(raw_coarse - raw_fine) < 1e-9);
    }
}

TEST_CASE("projector laws on random samples") {
    std::mt19937_64 rng(7003);
    EnsembleOptions opt;
    opt.repeat_probability = 0.3;
    opt.jordan_probability = 0.5;
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 40; ++trial) {
        opt.n = dim(rng);
        SampledMatrix m = random_guarded_matrix(rng, opt);
        std::size_t pick = std::uniform_int_distribution<std::size_t>(0, m.truth.size() - 1)(rng);
        cplx lambda = m.truth[pick].value;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.truth.size(); ++j)
            if (j != pick) gap = std::min(gap, std::abs(lambda - m.truth[j].value));
        double radius = std::min(0.5, gap / 3.0);
        Matrix e = riesz_projector(m.A, circle_contour(lambda, radius));
        CHECK((e * e - e).norm() < 1e-8);
        CHECK((m.A * e - e * m.A).norm() < 1e-8);
        CHECK(numerical_rank(e) == m.truth[pick].multiplicity);

        Matrix oracle = truth_eigenspace(m, [&](cplx v) { return std::abs(v - lambda) < radius; });
        Matrix image = detail::projector_image(e, m.truth[pick].multiplicity, default_tolerances());
        CHECK(max_principal_angle(image, oracle) < 1e-6);
    }
}

TEST_CASE("eigenspace basis from sectors") {
    Matrix A = diag2(cplx(0, 2), cplx(-3, 0));
    SubspaceBasis b = eigenspace_basis(A, sector_between(cplx(1, 0), std::polar(1.0, 3 * pi / 4)));
    REQUIRE(b.dimension() == 1);
    Matrix e1(2, 1);
    e1 << cplx(1, 0), cplx(0, 0);
    CHECK(max_principal_angle(b.columns, e1) < 1e-8);

    CHECK(eigenspace_basis(A, Sector{}).dimension() == 0);

    // a sector covering all eigenrays of a guarded matrix has full rank
    Sector wide;
    wide.phi_start = 1e-4;
    wide.width = two_pi - 2e-4;
    CHECK(eigenspace_basis(A, wide).dimension() == 2);

    // boundary eigenvalue is rejected
    CHECK_THROWS_AS(eigenspace_basis(A, sector_between(cplx(0, 1), cplx(-1, 0))), Error);
}

TEST_CASE("direct sum of adjacent sectors") {
    std::mt19937_64 rng(7004);
    EnsembleOptions opt;
    opt.angle_gap = 0.05;
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 30; ++trial) {
        opt.n = dim(rng);
        SampledMatrix m = random_guarded_matrix(rng, opt);
        cplx a = random_admissible_direction(rng, m, 0.02);
        cplx b = random_admissible_direction(rng, m, 0.02);
        cplx c = random_admissible_direction(rng, m, 0.02);
        std::array<double, 3> t{ray_angle(a), ray_angle(b), ray_angle(c)};
        std::sort(t.begin(), t.end());
        Sector S = sector_between(std::polar(1.0, t[0]), std::polar(1.0, t[1]));
        Sector T = sector_between(std::polar(1.0, t[1]), std::polar(1.0, t[2]));
        Sector R = sector_between(std::polar(1.0, t[0]), std::polar(1.0, t[2]));

        SubspaceBasis bs = eigenspace_basis(m.A, S);
        SubspaceBasis bt = eigenspace_basis(m.A, T);
        SubspaceBasis br = eigenspace_basis(m.A, R);
        REQUIRE(bs.dimension() + bt.dimension() == br.dimension());
        if (br.dimension() == 0) continue;
        Matrix joint(m.A.rows(), br.dimension());
        joint << bs.columns, bt.columns;
        CHECK(numerical_rank(joint) == br.dimension());
        CHECK(max_principal_angle(joint, br.columns) < 1e-6);
    }
}
