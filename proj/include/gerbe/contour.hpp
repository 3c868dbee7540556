#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "gerbe/gauss_legendre.hpp"
#include "gerbe/sector.hpp"

namespace gerbe {

struct LineSegment {
    cplx from, to;
};

// Traversed from angle phi0 to phi1 about center; counterclockwise when
// phi1 > phi0. Angles are not wrapped so full or reversed arcs are expressible.
struct CircularArc {
    cplx center;
    double radius = 0.0;
    double phi0 = 0.0, phi1 = 0.0;
};

using ContourSegment = std::variant<LineSegment, CircularArc>;

inline cplx segment_point(const ContourSegment& seg, double t) {
    if (const auto* line = std::get_if<LineSegment>(&seg))
        return line->from + t * (line->to - line->from);
    const auto& arc = std::get<CircularArc>(seg);
    return arc.center + std::polar(arc.radius, arc.phi0 + t * (arc.phi1 - arc.phi0));
}

inline cplx segment_velocity(const ContourSegment& seg, double t) {
    if (const auto* line = std::get_if<LineSegment>(&seg))
        return line->to - line->from;
    const auto& arc = std::get<CircularArc>(seg);
    double span = arc.phi1 - arc.phi0;
    return cplx(0.0, 1.0) * span * std::polar(arc.radius, arc.phi0 + t * span);
}

// Closed oriented piecewise-smooth curve.
struct Contour {
    std::vector<ContourSegment> segments;

    bool closed(double tol = 1e-12) const {
        if (segments.empty()) return false;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            cplx end = segment_point(segments[i], 1.0);
            cplx next = segment_point(segments[(i + 1) % segments.size()], 0.0);
            if (std::abs(end - next) > tol) return false;
        }
        return true;
    }
};

// Counterclockwise circle as four quarter arcs, one quadrature panel each.
inline Contour circle_contour(cplx center, double radius) {
    require(radius > 0.0, ErrorKind::Domain, "circle_contour: radius must be positive");
    Contour c;
    for (int q = 0; q < 4; ++q)
        c.segments.push_back(CircularArc{center, radius, q * pi / 2.0, (q + 1) * pi / 2.0});
    return c;
}

// Counterclockwise boundary of the bounded annular sector: radial segment out,
// outer arc, radial segment in, inner arc back.
inline Contour sector_boundary_contour(const Sector& S, double r, double R) {
    require(S.width > 0.0, ErrorKind::Domain, "sector_boundary_contour: empty sector");
    require(r > 0.0 && r < R && std::isfinite(R), ErrorKind::Domain,
            "sector_boundary_contour: need 0 < r < R < infinity");
    const double a = S.phi_start;
    const double b = S.phi_start + S.width; // unwrapped
    Contour c;
    c.segments.push_back(LineSegment{std::polar(r, a), std::polar(R, a)});
    c.segments.push_back(CircularArc{cplx(0.0, 0.0), R, a, b});
    c.segments.push_back(LineSegment{std::polar(R, b), std::polar(r, b)});
    c.segments.push_back(CircularArc{cplx(0.0, 0.0), r, b, a});
    return c;
}

// Number of quadrature panels for a segment. Long arcs and radial runs are
// split so the per-panel Gauss rule keeps its exponential rate for poles at
// moderate distance.
inline int segment_panel_count(const ContourSegment& seg) {
    if (std::holds_alternative<LineSegment>(seg)) return 6;
    const auto& arc = std::get<CircularArc>(seg);
    return std::max(1, static_cast<int>(std::ceil(std::fabs(arc.phi1 - arc.phi0) / (pi / 8.0))));
}

// Visits every quadrature node of the contour: callback(point, weight * velocity).
template <class F>
void for_each_contour_node(const Contour& contour, int nodes_per_segment, F&& callback) {
    const GaussLegendreRule& rule = gauss_legendre(nodes_per_segment);
    for (const auto& seg : contour.segments) {
        const int panels = segment_panel_count(seg);
        for (int p = 0; p < panels; ++p) {
            double lo = double(p) / panels, hi = double(p + 1) / panels;
            for (int i = 0; i < nodes_per_segment; ++i) {
                double t = lo + (hi - lo) * 0.5 * (rule.nodes[i] + 1.0);
                cplx scale = (hi - lo) * 0.5 * rule.weights[i] * segment_velocity(seg, t);
                callback(segment_point(seg, t), scale);
            }
        }
    }
}

// Contour integral of f via per-segment Gauss-Legendre quadrature.
template <class F>
cplx contour_integral(const Contour& contour, F&& f, int nodes_per_segment = 64) {
    cplx acc(0.0, 0.0);
    for_each_contour_node(contour, nodes_per_segment,
                          [&](cplx z, cplx scale) { acc += scale * f(z); });
    return acc;
}

inline cplx winding_number(const Contour& contour, cplx z0, int nodes_per_segment = 64) {
    cplx integral = contour_integral(
        contour, [&](cplx z) { return 1.0 / (z - z0); }, nodes_per_segment);
    return integral / cplx(0.0, two_pi);
}

} // namespace gerbe
