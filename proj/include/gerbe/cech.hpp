#pragma once

#include <functional>
#include <optional>

#include "gerbe/gerbe_core.hpp"
#include "gerbe/quaternion.hpp"
#include "gerbe/sphere_cover.hpp"

namespace gerbe {

// ---------------------------------------------------------------------------
// Sections: one constant direction per ball, clear of every eigenray of every
// sampled matrix in the ball.

struct SectionChoice {
    std::vector<cplx> z;          // per ball
    std::vector<int> grid_index;  // chosen candidate index per ball
    std::vector<double> margins;  // certified angular clearance per ball
};

namespace detail {

// Sample points of a ball: the stored vertex-simplex samples plus the extreme
// points of the geodesic through the ball center and the identity, where the
// distance-to-identity (hence every power-映 eigenangle) attains its range.
inline std::vector<SpherePoint> ball_probe_points(const GoodCover& cover, int ball,
                                                  int line_samples = 33) {
    const SpherePoint& c = cover.centers[ball];
    std::vector<SpherePoint> pts = cover.simplex({ball}).samples;
    SpherePoint one = Eigen::VectorXd::Zero(c.size());
    one[0] = 1.0;
    double phi_c = sphere_distance(c, one);
    SpherePoint dir;
    if (phi_c < 1e-9 || pi - phi_c < 1e-9) {
        dir = Eigen::VectorXd::Zero(c.size());
        dir[1] = 1.0; // any tangent direction: the distance sweep is symmetric
    } else {
        dir = (c - std::cos(phi_c) * one);
        dir /= dir.norm();
    }
    double lo = std::max(0.0, phi_c - cover.radius);
    double hi = std::min(pi, phi_c + cover.radius);
    for (int i = 0; i < line_samples; ++i) {
        double phi = lo + (hi - lo) * i / (line_samples - 1);
        pts.push_back(std::cos(phi) * one + std::sin(phi) * dir);
    }
    return pts;
}

} // namespace detail

// Fixed candidate grid of section angles.
inline std::vector<double> section_candidate_angles(int count = 16) {
    std::vector<double> angles;
    for (int k = 0; k < count; ++k) angles.push_back(pi * (2.0 * k + 1.0) / count);
    return angles;
}

// For each ball, the first candidate angle (offset-rotated) whose ray clears
// every eigenray of every probed matrix by more than the section margin.
inline SectionChoice choose_sections(const GoodCover& cover, const SphereCycle& cycle,
                                     const Tolerances& tol = default_tolerances(),
                                     int candidate_count = 16, int selection_offset = 0) {
    SectionChoice choice;
    std::vector<double> candidates = section_candidate_angles(candidate_count);
    for (int ball = 0; ball < cover.ball_count(); ++ball) {
        std::vector<double> eigen_angles;
        for (const auto& p : detail::ball_probe_points(cover, ball)) {
            Matrix M = cycle.value(Quat::from_vec(p));
            for (const auto& c : spectrum_with_multiplicity(M, tol).clusters)
                eigen_angles.push_back(ray_angle(c.value));
        }
        int found = -1;
        double found_margin = 0.0;
        for (int k = 0; k < candidate_count && found < 0; ++k) {
            int idx = (k + selection_offset) % candidate_count;
            double t = candidates[idx];
            double margin = circular_distance(t, 0.0);
            for (double e : eigen_angles) margin = std::min(margin, circular_distance(t, e));
            if (margin > tol.section_margin) {
                found = idx;
                found_margin = margin;
            }
        }
        if (found < 0) {
            double lo = *std::min_element(eigen_angles.begin(), eigen_angles.end());
            double hi = *std::max_element(eigen_angles.begin(), eigen_angles.end());
            fail(ErrorKind::Certification,
                 "section search failed for ball " + std::to_string(ball) +
                     " (eigenray angles span [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "])");
        }
        choice.z.push_back(std::polar(1.0, candidates[found]));
        choice.grid_index.push_back(found);
        choice.margins.push_back(found_margin);
    }
    return choice;
}

// ---------------------------------------------------------------------------
// Edge trivializations and the cocycle.

// Smooth gauge factor applied to an edge frame; identity when absent.
using EdgeGauge = std::function<cplx(int a, int b, const SpherePoint&)>;

class CechComplex {
public:
    CechComplex(const GoodCover& cover, SphereCycle cycle, SectionChoice sections,
                const Tolerances& tol = default_tolerances())
        : cover_(&cover), cycle_(cycle), sections_(std::move(sections)), tol_(tol) {
        for (const auto& [key, info] : cover.simplices)
            if (key.size() == 2) prepare_edge(key, info);
    }

    const GoodCover& cover() const { return *cover_; }
    const SectionChoice& sections() const { return sections_; }
    const Tolerances& tolerances() const { return tol_; }
    const SphereCycle& cycle() const { return cycle_; }

    void set_gauge(EdgeGauge gauge) { gauge_ = std::move(gauge); }

    int edge_rank(int a, int b) const { return edges_.at(edge_key(a, b)).rank; }

    // Per-point context: shared spectral data for the three sigma evaluations
    // of a cocycle value.
    struct PointContext {
        SpherePoint p;
        Matrix M;
        SpectrumData spec;
        std::map<int, TopWedge> lambda; // per ball index
    };

    PointContext context(const SpherePoint& p) const {
        PointContext ctx;
        ctx.p = p;
        ctx.M = cycle_.value(Quat::from_vec(p));
        ctx.spec = spectrum_with_multiplicity(ctx.M, tol_);
        return ctx;
    }

    const TopWedge& lambda_of(PointContext& ctx, int ball) const {
        auto it = ctx.lambda.find(ball);
        if (it == ctx.lambda.end())
            it = ctx.lambda.emplace(ball, lambda_basis(ctx.M, ctx.spec, sections_.z[ball], tol_))
                     .first;
        return it->second;
    }

    // Frame of L over the edge (a, b) at the context point, a < b.
    LineFiberElement sigma(PointContext& ctx, int a, int b) const {
        require(a < b, ErrorKind::Domain, "sigma: edge indices must be ordered");
        const EdgeData& edge = edges_.at(edge_key(a, b));
        cplx za = sections_.z[a], zb = sections_.z[b];
        TopWedge omega = edge_wedge(ctx, edge, a, b);
        if (ray_angle(za) >= ray_angle(zb)) {
            const TopWedge& wb = lambda_of(ctx, b);
            return {ctx.M, za, zb, concat(wb, omega, tol_), dual_of(wb)};
        }
        const TopWedge& wa = lambda_of(ctx, a);
        return {ctx.M, za, zb, wa, dual_of(concat(wa, omega, tol_))};
    }

    // g_{abc} at a point of the triple overlap, a < b < c.
    cplx cocycle_value(int a, int b, int c, const SpherePoint& p) const {
        PointContext ctx = context(p);
        return cocycle_value(ctx, a, b, c);
    }

    cplx cocycle_value(PointContext& ctx, int a, int b, int c) const {
        require(a < b && b < c, ErrorKind::Domain, "cocycle_value: indices must be ordered");
        LineFiberElement ab = sigma(ctx, a, b);
        LineFiberElement bc = sigma(ctx, b, c);
        LineFiberElement ac = sigma(ctx, a, c);
        return fiber_ratio(multiply(ab, bc, tol_), ac, tol_);
    }

    // Connection form of the edge frame along a tangent direction of the cycle.
    cplx connection_edge(int a, int b, const SpherePoint& p, const SpherePoint& tangent) const {
        require(a < b, ErrorKind::Domain, "connection_edge: edge indices must be ordered");
        const EdgeData& edge = edges_.at(edge_key(a, b));
        if (edge.rank == 0) return gauge_term(a, b, p, tangent);
        PointContext ctx = context(p);
        Sector S = unordered_sector(sections_.z[a], sections_.z[b]);
        DiscSystem discs = sector_disc_system(ctx.spec, S, tol_);
        Matrix dM = cycle_.differential(Quat::from_vec(p), Quat::from_vec(tangent));
        return projector_frame_connection(ctx.M, discs, edge.ref, dM, tol_) +
               gauge_term(a, b, p, tangent);
    }

private:
    struct EdgeData {
        int rank = 0;
        Matrix ref; // fixed reference basis over the whole overlap
    };

    static SimplexKey edge_key(int a, int b) { return {a, b}; }

    TopWedge edge_wedge(PointContext& ctx, const EdgeData& edge, int a, int b) const {
        cplx g(1.0, 0.0);
        if (gauge_) g = gauge_(a, b, ctx.p);
        if (edge.rank == 0) return scalar_wedge(static_cast<int>(ctx.M.rows()), g);
        Sector S = unordered_sector(sections_.z[a], sections_.z[b]);
        DiscSystem discs = sector_disc_system(ctx.spec, S, tol_);
        require(discs.total_multiplicity() == edge.rank, ErrorKind::Certification,
                "edge frame: enclosed multiplicity drifted across the overlap");
        return scaled(projector_frame_value(ctx.M, discs, edge.ref, tol_), g);
    }

    // d log of the gauge factor along the tangent, by central differences on
    // the sphere.
    cplx gauge_term(int a, int b, const SpherePoint& p, const SpherePoint& tangent) const {
        if (!gauge_) return cplx(0.0, 0.0);
        const double h = 1e-6;
        cplx gp = gauge_(a, b, sphere_exp(p, tangent, h));
        cplx gm = gauge_(a, b, sphere_exp(p, tangent, -h));
        return std::log(gp / gm) / (2.0 * h);
    }

    // Candidate reference bases; tried in order until the frame clears the
    // margin on every stored sample of every simplex containing the edge.
    void prepare_edge(const SimplexKey& key, const SimplexInfo& info) {
        EdgeData edge;
        PointContext base_ctx = context(info.base_point);
        Sector S = unordered_sector(sections_.z[key[0]], sections_.z[key[1]]);
        DiscSystem base_discs = sector_disc_system(base_ctx.spec, S, tol_);
        edge.rank = base_discs.total_multiplicity();
        const int n = static_cast<int>(base_ctx.M.rows());
        if (edge.rank == 0) {
            edges_.emplace(key, std::move(edge));
            return;
        }

        std::vector<SpherePoint> probes;
        for (const auto& [skey, sinfo] : cover_->simplices)
            if (std::includes(skey.begin(), skey.end(), key.begin(), key.end()))
                probes.insert(probes.end(), sinfo.samples.begin(), sinfo.samples.end());

        for (int candidate = 0; candidate < 8; ++candidate) {
            edge.ref = candidate_reference(n, edge.rank, candidate);
            double worst = std::numeric_limits<double>::infinity();
            try {
                for (const auto& p : probes) {
                    PointContext ctx = context(p);
                    DiscSystem discs = sector_disc_system(ctx.spec, S, tol_);
                    if (discs.total_multiplicity() != edge.rank)
                        fail(ErrorKind::Certification,
                             "edge frame: enclosed multiplicity drifted across the overlap");
                    Matrix F = disc_projector(ctx.M, discs, tol_) * edge.ref;
                    Eigen::JacobiSVD<Matrix> svd(F);
                    worst = std::min(worst,
                                     svd.singularValues()(svd.singularValues().size() - 1));
                }
            } catch (const Error&) {
                continue;
            }
            if (worst > tol_.frame_margin) {
                edges_.emplace(key, std::move(edge));
                return;
            }
        }
        fail(ErrorKind::Certification, "edge frame: no reference basis clears the margin on edge (" +
                                           std::to_string(key[0]) + "," + std::to_string(key[1]) +
                                           ")");
    }

    static Matrix candidate_reference(int n, int rank, int candidate) {
        if (rank == n) return Matrix::Identity(n, n);
        std::mt19937_64 rng(0xfeedbeefu + 977u * static_cast<unsigned>(candidate));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix G(n, rank);
        if (candidate == 0) return Matrix::Identity(n, n).leftCols(rank);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < rank; ++c) G(r, c) = cplx(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<Matrix> qr(G);
        return qr.householderQ() * Matrix::Identity(n, rank);
    }

    const GoodCover* cover_;
    SphereCycle cycle_;
    SectionChoice sections_;
    Tolerances tol_;
    EdgeGauge gauge_;
    std::map<SimplexKey, EdgeData> edges_;
};

// Max |delta g - 1| over the stored samples of every top-simplex overlap.
inline double cocycle_closure_residual(const CechComplex& cech) {
    double worst = 0.0;
    for (const auto& [key, sign] : cech.cover().fundamental_cycle) {
        const SimplexInfo& info = cech.cover().simplex(key);
        for (const auto& p : info.samples) {
            CechComplex::PointContext ctx = cech.context(p);
            cplx delta(1.0, 0.0);
            for (std::size_t j = 0; j < key.size(); ++j) {
                SimplexKey face;
                for (std::size_t i = 0; i < key.size(); ++i)
                    if (i != j) face.push_back(key[i]);
                cplx g = cech.cocycle_value(ctx, face[0], face[1], face[2]);
                delta *= (j % 2 == 0) ? g : 1.0 / g;
            }
            worst = std::max(worst, std::abs(delta - cplx(1.0, 0.0)));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Integer extraction: continued logarithms and the pairing with the
// fundamental cycle.

// A degree-q cochain as an evaluatable family: simplex is the sorted index
// set of the carrying overlap.
using SimplexFunction = std::function<cplx(const SimplexKey&, const SpherePoint&)>;

struct DDOptions {
    int path_steps = 48;       // sampling density of each continuation path
    bool reverse_orientation = false;
    double step_guard = pi / 2.0;
};

// Branch-continuous log of g(simplex, .) from the simplex base point to the
// target, along the geodesic (contained in the overlap by convexity).
inline cplx continued_log(const SimplexFunction& g, const SimplexKey& simplex,
                          const SpherePoint& from, const SpherePoint& to, const DDOptions& opt) {
    cplx v0 = g(simplex, from);
    require(std::abs(v0) > 0.0, ErrorKind::Data, "continued_log: nonvanishing violated");
    double phase = std::arg(v0);
    cplx prev = v0;
    for (int s = 1; s <= opt.path_steps; ++s) {
        SpherePoint p = slerp(from, to, double(s) / opt.path_steps);
        cplx v = g(simplex, p);
        require(std::abs(v) > 0.0, ErrorKind::Data, "continued_log: nonvanishing violated");
        double step = std::arg(v / prev);
        require(std::fabs(step) <= opt.step_guard, ErrorKind::Quadrature,
                "continued_log: sampling too coarse (phase step " + std::to_string(step) + ")");
        phase += step;
        prev = v;
    }
    return cplx(std::log(std::abs(prev)), phase);
}

struct DDResult {
    long value = 0;
    double max_integer_residual = 0.0; // worst |cochain - nearest integer|
    std::vector<long> top_cochain;     // per fundamental-cycle entry
};

// Pairs the log-branch integer cochain of g with the fundamental cycle: for
// every top simplex T, c_T = (delta log g)(T) / 2 pi i evaluated at the base
// point of T with face logs continued from their own base points.
inline DDResult dd_pairing(const GoodCover& cover, const SimplexFunction& g,
                           const DDOptions& opt = DDOptions{},
                           const Tolerances& tol = default_tolerances()) {
    DDResult result;
    for (const auto& [key, sign] : cover.fundamental_cycle) {
        const SimplexInfo& info = cover.simplex(key);
        cplx delta_log(0.0, 0.0);
        for (std::size_t j = 0; j < key.size(); ++j) {
            SimplexKey face;
            for (std::size_t i = 0; i < key.size(); ++i)
                if (i != j) face.push_back(key[i]);
            cplx log_val =
                continued_log(g, face, cover.simplex(face).base_point, info.base_point, opt);
            delta_log += (j % 2 == 0 ? 1.0 : -1.0) * log_val;
        }
        cplx c = delta_log / cplx(0.0, two_pi);
        long rounded = std::lround(c.real());
        double residual = std::abs(c - cplx(double(rounded), 0.0));
        result.max_integer_residual = std::max(result.max_integer_residual, residual);
        if (residual > tol.cocycle_round)
            fail(ErrorKind::Quadrature,
                 "dd_pairing: cochain value too far from an integer (residual " +
                     std::to_string(residual) + ")");
        result.top_cochain.push_back(rounded);
        int orient = opt.reverse_orientation ? -sign : sign;
        result.value += orient * rounded;
    }
    return result;
}

// The gerbe cocycle as a SimplexFunction.
inline SimplexFunction cech_cocycle_function(const CechComplex& cech) {
    return [&cech](const SimplexKey& simplex, const SpherePoint& p) {
        require(simplex.size() == 3, ErrorKind::Domain, "cech cocycle: expected a triple");
        return cech.cocycle_value(simplex[0], simplex[1], simplex[2], p);
    };
}

inline DDResult dd_integer(const CechComplex& cech, const DDOptions& opt = DDOptions{}) {
    return dd_pairing(cech.cover(), cech_cocycle_function(cech), opt, cech.tolerances());
}

// ---------------------------------------------------------------------------
// Connection cochain and the refinement identity.

struct ConnectionResiduals {
    double identity = 0.0;     // |d log g - (A_bc - A_ac + A_ab)|
    double antisymmetry = 0.0; // |A_ba + A_ab|
};

// Checks d log g_{abc} = A_{bc} - A_{ac} + A_{ab} along tangent directions at
// the stored triangle samples; d log g by central differences along the
// geodesic flow, the edge forms by the analytic resolvent formula.
inline ConnectionResiduals connection_cochain_residuals(const CechComplex& cech,
                                                        double fd_step = 1e-5) {
    ConnectionResiduals out;
    const GoodCover& cover = cech.cover();
    for (const auto& [key, info] : cover.simplices) {
        if (key.size() != 3) continue;
        int a = key[0], b = key[1], c = key[2];
        for (const auto& p : info.samples) {
            Eigen::MatrixXd basis = tangent_basis(p);
            for (int dir = 0; dir < basis.cols(); ++dir) {
                SpherePoint v = basis.col(dir);
                cplx gp = cech.cocycle_value(a, b, c, sphere_exp(p, v, fd_step));
                cplx gm = cech.cocycle_value(a, b, c, sphere_exp(p, v, -fd_step));
                cplx dlog = std::log(gp / gm) / (2.0 * fd_step);
                cplx rhs = cech.connection_edge(b, c, p, v) - cech.connection_edge(a, c, p, v) +
                           cech.connection_edge(a, b, p, v);
                out.identity = std::max(out.identity, std::abs(dlog - rhs));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthesis of cocycles with prescribed class.

// Smooth bump partition of unity subordinate to the cover.
inline double cover_bump(double t) { return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

inline std::vector<double> partition_of_unity(const GoodCover& cover, const SpherePoint& p) {
    std::vector<double> rho(cover.ball_count(), 0.0);
    double total = 0.0;
    for (int i = 0; i < cover.ball_count(); ++i) {
        rho[i] = cover_bump(sphere_distance(p, cover.centers[i]) / cover.radius);
        total += rho[i];
    }
    require(total > 0.0, ErrorKind::Certification, "partition of unity: point not covered");
    for (double& r : rho) r /= total;
    return rho;
}

// A nonvanishing degree-q cocycle with prescribed integer pairing, built by
// contracting an integer top cochain against the partition of unity and
// exponentiating.
struct SynthesizedCocycle {
    const GoodCover* cover = nullptr;
    int degree = 2;                        // q: carried on (q+1)-fold overlaps
    std::map<SimplexKey, long> top_chain;  // integer cochain on (q+2)-index sets

    // alternating evaluation of the integer cochain on (ball, simplex)
    long extended(int ball, const SimplexKey& simplex) const {
        SimplexKey key = simplex;
        int position = 0;
        for (int v : simplex) {
            if (v == ball) return 0;
            if (v < ball) ++position;
        }
        key.insert(key.begin() + position, ball);
        auto it = top_chain.find(key);
        if (it == top_chain.end()) return 0;
        return (position % 2 == 0 ? 1 : -1) * it->second;
    }

    cplx value(const SimplexKey& simplex, const SpherePoint& p) const {
        std::vector<double> rho = partition_of_unity(*cover, p);
        double b = 0.0;
        for (int ball = 0; ball < cover->ball_count(); ++ball)
            if (rho[ball] > 0.0) b += rho[ball] * double(extended(ball, simplex));
        return std::exp(cplx(0.0, two_pi * b));
    }

    SimplexFunction as_function() const {
        return [this](const SimplexKey& s, const SpherePoint& p) { return value(s, p); };
    }
};

// Synthesizes a cocycle of the requested degree whose dd pairing equals the
// (integral) period of the density against the round volume form.
inline SynthesizedCocycle collate_form_to_cocycle(
    const GoodCover& cover, const std::function<double(const SpherePoint&)>& density, int degree,
    const Tolerances& tol = default_tolerances()) {
    require(cover.profile == "simplex", ErrorKind::Domain,
            "collate_form_to_cocycle: requires the simplex cover profile");
    require(degree == cover.sphere_dim - 1, ErrorKind::Domain,
            "collate_form_to_cocycle: degree must match the cycle dimension");
    double period = integrate_sphere(cover.sphere_dim, 32, 64, density);
    double rounded = std::round(period);
    require(std::fabs(period - rounded) < 1e-6, ErrorKind::Domain,
            "collate_form_to_cocycle: non-integral period " + std::to_string(period));
    SynthesizedCocycle out;
    out.cover = &cover;
    out.degree = degree;
    long k = std::lround(rounded);
    if (k != 0) {
        for (const auto& [key, sign] : cover.fundamental_cycle)
            if (sign > 0) {
                out.top_chain[key] = k;
                break;
            }
    }
    return out;
}

} // namespace gerbe
