#pragma once

#include <array>
#include <map>
#include <random>
#include <vector>

#include "gerbe/config.hpp"
#include "gerbe/sphere_geometry.hpp"
#include "gerbe/sphere_quadrature.hpp"

namespace gerbe {

using SimplexKey = std::vector<int>; // sorted ball indices

struct SimplexInfo {
    SimplexKey idx;
    SpherePoint base_point;              // normalized centroid of the участating centers
    std::vector<SpherePoint> samples;    // deterministic points inside the overlap, base first
    double margin = 0.0;                 // radius minus max distance of base point to centers
};

// Geodesic-ball cover of a model sphere together with the simplicial data the
// cocycle machinery works on: overlap simplices with base points and samples,
// and an oriented fundamental cycle of top simplices.
struct GoodCover {
    int sphere_dim = 3;
    std::vector<SpherePoint> centers;
    double radius = 0.0;
    std::map<SimplexKey, SimplexInfo> simplices;
    std::vector<std::pair<SimplexKey, int>> fundamental_cycle;
    double covering_margin = 0.0;
    std::string profile;           // "simplex" or "600cell"
    std::string orientation_note;
    int samples_per_simplex = 0;

    const SimplexInfo& simplex(const SimplexKey& key) const {
        auto it = simplices.find(key);
        require(it != simplices.end(), ErrorKind::Domain, "cover: unknown simplex");
        return it->second;
    }

    int ball_count() const { return static_cast<int>(centers.size()); }
};

namespace detail {

// Vertices of the regular (d+1)-simplex inscribed in S^d, built recursively;
// the first vertex is the first coordinate axis. Pairwise dot products are
// -1/(d+1).
inline std::vector<Eigen::VectorXd> regular_simplex_vertices(int d) {
    if (d == 0) {
        Eigen::VectorXd plus(1), minus(1);
        plus << 1.0;
        minus << -1.0;
        return {plus, minus};
    }
    std::vector<Eigen::VectorXd> lower = regular_simplex_vertices(d - 1);
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd first = Eigen::VectorXd::Zero(d + 1);
    first[0] = 1.0;
    out.push_back(first);
    double a = -1.0 / (d + 1);
    double b = std::sqrt(1.0 - a * a);
    for (const auto& t : lower) {
        Eigen::VectorXd v(d + 1);
        v[0] = a;
        v.tail(d) = b * t;
        out.push_back(v);
    }
    return out;
}

inline unsigned simplex_hash(const SimplexKey& key) {
    unsigned h = 0x9e3779b9u;
    for (int i : key) h = h * 131u + static_cast<unsigned>(i) + 1u;
    return h;
}

// Deterministic samples in the geodesic ball of the given radius around the
// base point.
inline std::vector<SpherePoint> simplex_samples(const SpherePoint& base, double ball_radius,
                                                int count, unsigned seed) {
    std::vector<SpherePoint> samples{base};
    if (count <= 0) return samples;
    Eigen::MatrixXd basis = tangent_basis(base);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.15, 1.0);
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd dir(basis.cols());
        for (int c = 0; c < dir.size(); ++c) dir[c] = gauss(rng);
        dir.normalize();
        samples.push_back(sphere_exp(base, basis * dir, ball_radius * unit(rng)));
    }
    return samples;
}

inline void add_simplex(GoodCover& cover, SimplexKey key, unsigned seed_base) {
    SimplexInfo info;
    info.idx = key;
    SpherePoint centroid = Eigen::VectorXd::Zero(cover.centers[0].size());
    for (int i : key) centroid += cover.centers[i];
    require(centroid.norm() > 1e-9, ErrorKind::Certification, "cover: degenerate centroid");
    info.base_point = centroid / centroid.norm();
    double worst = 0.0;
    for (int i : key) worst = std::max(worst, sphere_distance(info.base_point, cover.centers[i]));
    info.margin = cover.radius - worst;
    require(info.margin > 0.0, ErrorKind::Certification,
            "cover: base point escapes a participating ball");
    info.samples = simplex_samples(info.base_point, 0.8 * info.margin, cover.samples_per_simplex,
                                   seed_base ^ simplex_hash(key));
    // certificate: every sample lies in all participating balls
    for (const auto& p : info.samples)
        for (int i : key)
            require(sphere_distance(p, cover.centers[i]) < cover.radius, ErrorKind::Certification,
                    "cover: sample escapes a participating ball");
    cover.simplices.emplace(std::move(key), std::move(info));
}

// Covering certificate over a dense deterministic sample of the sphere.
inline double covering_margin_estimate(const GoodCover& cover) {
    double worst = 0.0;
    auto visit = [&](const SphereQuadNode& node) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : cover.centers) best = std::min(best, sphere_distance(node.p, c));
        worst = std::max(worst, best);
    };
    if (cover.sphere_dim == 3)
        foreach_s3_node(24, 48, visit);
    else
        foreach_s4_node(12, 24, visit);
    return cover.radius - worst;
}

// Certificate that no point lies in every ball simultaneously.
inline double disjointness_margin_estimate(const GoodCover& cover) {
    double worst = std::numeric_limits<double>::infinity();
    auto visit = [&](const SphereQuadNode& node) {
        double farthest = 0.0;
        for (const auto& c : cover.centers)
            farthest = std::max(farthest, sphere_distance(node.p, c));
        worst = std::min(worst, farthest);
    };
    if (cover.sphere_dim == 3)
        foreach_s3_node(24, 48, visit);
    else
        foreach_s4_node(12, 24, visit);
    return worst - cover.radius;
}

} // namespace detail

struct CoverOptions {
    int samples_per_simplex = 6;
    unsigned sample_seed = 1u;
    double covering_margin_required = 0.05;
};

// Cover of S^d by d+2 geodesic balls at regular-simplex vertices; the nerve is
// the boundary of the full simplex on the ball indices, certified by base
// points (every proper subset) and an emptiness margin (the full set). The
// fundamental cycle is the alternating sum over the top faces, in construction
// order of the centers.
inline GoodCover build_simplex_cover(int sphere_dim, double radius,
                                     const CoverOptions& opt = CoverOptions{}) {
    require(sphere_dim == 3 || sphere_dim == 4, ErrorKind::Domain,
            "build_simplex_cover: unsupported dimension");
    require(radius < pi / 2.0, ErrorKind::Domain,
            "build_simplex_cover: radius must stay below pi/2 for convex overlaps");
    GoodCover cover;
    cover.sphere_dim = sphere_dim;
    cover.radius = radius;
    cover.profile = "simplex";
    cover.samples_per_simplex = opt.samples_per_simplex;
    for (auto& v : detail::regular_simplex_vertices(sphere_dim)) cover.centers.push_back(v);
    const int K = cover.ball_count();

    // all proper nonempty subsets are nerve simplices
    for (unsigned mask = 1; mask < (1u << K); ++mask) {
        if (mask == (1u << K) - 1) continue; // the full intersection is empty
        SimplexKey key;
        for (int i = 0; i < K; ++i)
            if (mask & (1u << i)) key.push_back(i);
        detail::add_simplex(cover, key, opt.sample_seed);
    }

    cover.covering_margin = detail::covering_margin_estimate(cover);
    require(cover.covering_margin > opt.covering_margin_required, ErrorKind::Certification,
            "build_simplex_cover: covering certificate failed");
    require(detail::disjointness_margin_estimate(cover) > 0.05, ErrorKind::Certification,
            "build_simplex_cover: full intersection not certified empty");

    for (int skip = 0; skip < K; ++skip) {
        SimplexKey key;
        for (int i = 0; i < K; ++i)
            if (i != skip) key.push_back(i);
        cover.fundamental_cycle.emplace_back(std::move(key), (skip % 2 == 0) ? 1 : -1);
    }
    cover.orientation_note = "alternating boundary cycle over centers in construction order; "
                             "model sphere oriented by det[p | frame] > 0";
    return cover;
}

namespace detail {

// The 120 unit quaternions of the binary icosahedral group: 8 axis units, 16
// half-integer units, 96 even permutations of (+-phi, +-1, +-1/phi, 0)/2.
inline std::vector<Eigen::Vector4d> cell600_vertices() {
    std::vector<Eigen::Vector4d> out;
    for (int axis = 0; axis < 4; ++axis)
        for (double s : {1.0, -1.0}) {
            Eigen::Vector4d v = Eigen::Vector4d::Zero();
            v[axis] = s;
            out.push_back(v);
        }
    for (int mask = 0; mask < 16; ++mask) {
        Eigen::Vector4d v;
        for (int i = 0; i < 4; ++i) v[i] = (mask & (1 << i)) ? -0.5 : 0.5;
        out.push_back(v);
    }
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::array<std::array<int, 4>, 12> even_perms{{{0, 1, 2, 3},
                                                         {0, 2, 3, 1},
                                                         {0, 3, 1, 2},
                                                         {1, 0, 3, 2},
                                                         {1, 2, 0, 3},
                                                         {1, 3, 2, 0},
                                                         {2, 0, 1, 3},
                                                         {2, 1, 3, 0},
                                                         {2, 3, 0, 1},
                                                         {3, 0, 2, 1},
                                                         {3, 1, 0, 2},
                                                         {3, 2, 1, 0}}};
    for (const auto& perm : even_perms)
        for (int s0 : {1, -1})
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) {
                    Eigen::Vector4d base(s0 * phi / 2.0, s1 * 0.5, s2 / (2.0 * phi), 0.0);
                    Eigen::Vector4d v;
                    for (int i = 0; i < 4; ++i) v[perm[i]] = base[i];
                    out.push_back(v);
                }
    return out;
}

} // namespace detail

// Refined cover of the 3-sphere: 120 balls at the vertices of the 600-cell.
// The stored complex is the 600-cell itself (every simplex is certified by its
// base point); the fundamental cycle is its boundary with outward determinant
// orientation, checked to be closed in exact integer arithmetic.
inline GoodCover build_600cell_cover(double radius = 0.44,
                                     const CoverOptions& opt = CoverOptions{}) {
    require(radius < pi / 2.0, ErrorKind::Domain, "build_600cell_cover: radius must stay below pi/2");
    GoodCover cover;
    cover.sphere_dim = 3;
    cover.radius = radius;
    cover.profile = "600cell";
    cover.samples_per_simplex = opt.samples_per_simplex;
    for (auto& v : detail::cell600_vertices()) cover.centers.push_back(v);
    const int K = cover.ball_count();
    const double edge_dot = (1.0 + std::sqrt(5.0)) / 4.0; // cos 36 degrees

    std::vector<std::vector<int>> neighbors(K);
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j)
            if (std::fabs(cover.centers[i].dot(cover.centers[j]) - edge_dot) < 1e-9) {
                neighbors[i].push_back(j);
                neighbors[j].push_back(i);
            }

    // cells = 4-cliques of the nearest-neighbor graph
    std::vector<SimplexKey> cells;
    for (int a = 0; a < K; ++a)
        for (std::size_t bi = 0; bi < neighbors[a].size(); ++bi)
            for (std::size_t ci = bi + 1; ci < neighbors[a].size(); ++ci)
                for (std::size_t di = ci + 1; di < neighbors[a].size(); ++di) {
                    int b = neighbors[a][bi], c = neighbors[a][ci], d = neighbors[a][di];
                    if (b < a) continue;
                    auto adjacent = [&](int u, int v) {
                        return std::fabs(cover.centers[u].dot(cover.centers[v]) - edge_dot) < 1e-9;
                    };
                    if (adjacent(b, c) && adjacent(b, d) && adjacent(c, d))
                        cells.push_back({a, b, c, d});
                }
    require(cells.size() == 600, ErrorKind::Certification,
            "build_600cell_cover: expected 600 cells, found " + std::to_string(cells.size()));

    for (const auto& cell : cells) {
        for (unsigned mask = 1; mask < 16; ++mask) {
            SimplexKey key;
            for (int i = 0; i < 4; ++i)
                if (mask & (1u << i)) key.push_back(cell[i]);
            if (!cover.simplices.count(key)) detail::add_simplex(cover, key, opt.sample_seed);
        }
        Eigen::Matrix4d m;
        for (int i = 0; i < 4; ++i) m.row(i) = cover.centers[cell[i]].transpose();
        int sign = m.determinant() > 0.0 ? 1 : -1;
        cover.fundamental_cycle.emplace_back(cell, sign);
    }

    // exact closedness of the fundamental cycle
    std::map<SimplexKey, long> boundary;
    for (const auto& [cell, sign] : cover.fundamental_cycle)
        for (int j = 0; j < 4; ++j) {
            SimplexKey face;
            for (int i = 0; i < 4; ++i)
                if (i != j) face.push_back(cell[i]);
            boundary[face] += sign * (j % 2 == 0 ? 1 : -1);
        }
    for (const auto& [face, coeff] : boundary)
        require(coeff == 0, ErrorKind::Certification,
                "build_600cell_cover: fundamental cycle is not closed");

    cover.covering_margin = detail::covering_margin_estimate(cover);
    require(cover.covering_margin > 0.03, ErrorKind::Certification,
            "build_600cell_cover: covering certificate failed");
    cover.orientation_note = "outward determinant orientation of the 600-cell boundary; "
                             "model sphere oriented by det[p | frame] > 0";
    return cover;
}

// The default profile: five balls on the 3-sphere. Larger requests use the
// refined 600-cell profile, which keeps eigenvalue swings per ball small
// enough for section search on composed power cycles.
inline GoodCover build_su2_cover(int K = 5, const CoverOptions& opt = CoverOptions{}) {
    require(K >= 5, ErrorKind::Domain, "build_su2_cover: need at least 5 balls");
    if (K == 5) return build_simplex_cover(3, 1.45, opt);
    return build_600cell_cover(0.44, opt);
}

inline GoodCover build_s4_cover(const CoverOptions& opt = CoverOptions{}) {
    return build_simplex_cover(4, 1.43, opt);
}

} // namespace gerbe
