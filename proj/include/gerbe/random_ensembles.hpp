#pragma once

#include <random>

#include "gerbe/gerbe_core.hpp"

namespace gerbe {

// Generic-position sampling for randomized suites. The guards quantify the
// margins needed for desk-scale verification: clearance from the positive-real
// cut, pairwise eigenvalue separation, and optionally pairwise angular
// separation of the eigenrays.
struct EnsembleOptions {
    int n = 3;
    double cut_margin = 1e-3; // min angular distance of eigenrays to the positive reals
    double gap_min = 1e-3;    // min pairwise eigenvalue distance
    double angle_gap = 0.0;   // min pairwise eigenray separation (0 disables)
    double radius_lo = 0.5;
    double radius_hi = 2.0;
    double shear = 0.3;             // strength of the non-normal similarity
    double repeat_probability = 0.0; // chance of multiplicity >= 2 blocks
    double jordan_probability = 0.0; // chance a repeated block is a Jordan block
};

// A sampled matrix together with its construction ground truth.
struct SampledMatrix {
    Matrix A;
    std::vector<EigenvalueCluster> truth; // canonically ordered
    Matrix eigvec;                        // generalized eigenvector frames, per truth entry
    std::vector<int> block_start;         // first eigvec column per truth entry
};

namespace detail {

inline Matrix random_complex_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix G(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) G(r, c) = cplx(gauss(rng), gauss(rng));
    return G;
}

} // namespace detail

inline SampledMatrix random_guarded_matrix(std::mt19937_64& rng, const EnsembleOptions& opt) {
    std::uniform_real_distribution<double> angle(opt.cut_margin, two_pi - opt.cut_margin);
    std::uniform_real_distribution<double> radius(opt.radius_lo, opt.radius_hi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // multiplicities
    std::vector<int> mult;
    int left = opt.n;
    while (left > 0) {
        int m = 1;
        if (left > 1 && unit(rng) < opt.repeat_probability) m = 2;
        mult.push_back(m);
        left -= m;
    }

    // eigenvalues with separation guards
    std::vector<cplx> values;
    for (int attempt = 0; attempt < 10000 && values.size() < mult.size(); ++attempt) {
        cplx candidate = std::polar(radius(rng), angle(rng));
        bool ok = true;
        for (cplx v : values) {
            if (std::abs(candidate - v) < opt.gap_min) ok = false;
            if (opt.angle_gap > 0.0 &&
                circular_distance(ray_angle(candidate), ray_angle(v)) < opt.angle_gap)
                ok = false;
        }
        if (ok) values.push_back(candidate);
    }
    require(values.size() == mult.size(), ErrorKind::Conditioning,
            "random_guarded_matrix: could not satisfy separation guards");

    SampledMatrix out;
    const int n = opt.n;
    Matrix D = Matrix::Zero(n, n);
    int col = 0;
    for (std::size_t j = 0; j < mult.size(); ++j) {
        for (int k = 0; k < mult[j]; ++k) {
            D(col + k, col + k) = values[j];
            if (k > 0 && unit(rng) < opt.jordan_probability) D(col + k - 1, col + k) = 1.0;
        }
        out.truth.push_back({values[j], mult[j]});
        out.block_start.push_back(col);
        col += mult[j];
    }

    Matrix P = Matrix::Identity(n, n) + opt.shear * detail::random_complex_matrix(rng, n);
    Eigen::PartialPivLU<Matrix> lu(P);
    out.A = P * D * lu.inverse();
    out.eigvec = P;

    // canonical order of the ground truth
    std::vector<std::size_t> order(out.truth.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return canonical_eigenvalue_less(out.truth[a].value, out.truth[b].value);
    });
    std::vector<EigenvalueCluster> truth_sorted;
    std::vector<int> start_sorted;
    Matrix vec_sorted(n, n);
    int c2 = 0;
    for (std::size_t i : order) {
        truth_sorted.push_back(out.truth[i]);
        start_sorted.push_back(c2);
        vec_sorted.middleCols(c2, out.truth[i].multiplicity) =
            out.eigvec.middleCols(out.block_start[i], out.truth[i].multiplicity);
        c2 += out.truth[i].multiplicity;
    }
    out.truth = std::move(truth_sorted);
    out.block_start = std::move(start_sorted);
    out.eigvec = std::move(vec_sorted);
    return out;
}

// Ground-truth generalized eigenspace for the truth entries inside a region.
template <class Predicate>
inline Matrix truth_eigenspace(const SampledMatrix& m, Predicate&& inside) {
    int k = 0;
    for (const auto& c : m.truth)
        if (inside(c.value)) k += c.multiplicity;
    Matrix span(m.A.rows(), k);
    int col = 0;
    for (std::size_t j = 0; j < m.truth.size(); ++j)
        if (inside(m.truth[j].value)) {
            span.middleCols(col, m.truth[j].multiplicity) =
                m.eigvec.middleCols(m.block_start[j], m.truth[j].multiplicity);
            col += m.truth[j].multiplicity;
        }
    return span;
}

// An angle whose ray clears every eigenray of the sample by at least margin,
// and clears the positive reals. Rejection sampled.
inline cplx random_admissible_direction(std::mt19937_64& rng, const SampledMatrix& m,
                                        double margin) {
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        double t = angle(rng);
        if (circular_distance(t, 0.0) <= margin) continue;
        bool ok = true;
        for (const auto& c : m.truth)
            if (circular_distance(t, ray_angle(c.value)) <= margin) ok = false;
        if (ok) return std::polar(1.0, t);
    }
    fail(ErrorKind::Conditioning, "random_admissible_direction: rejection sampling exhausted");
}

} // namespace gerbe
