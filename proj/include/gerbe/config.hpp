#pragma once

namespace gerbe {

// Central knob set. Every numeric guard used by the library lives here so a
// run can be reproduced from the values echoed in its report.
struct Tolerances {
    double ang_eps = 1e-10;       // angular tolerance classifying "same ray"
    double section_margin = 0.05; // min angular clearance of a section angle to any eigenray
    double cluster = 1e-6;        // eigenvalue clustering radius
    double rank = 1e-8;           // smallest admissible singular value of a basis
    double det_guard = 1e-12;     // reject contours where min |det(A - z I)| drops below this
    double contour_gap = 1e-6;    // min admissible distance from spectrum to a contour
    double count_round = 1e-4;    // max |integral - nearest integer| in zero counting
    double span_match = 1e-6;     // principal-angle tolerance for span equality
    double cocycle_round = 1e-4;  // max distance of an extracted cochain value from an integer
    double frame_margin = 1e-3;   // min frame magnitude over certified samples
    int nodes_per_segment = 64;   // Gauss-Legendre nodes per contour segment
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace gerbe
