#pragma once

#include <array>
#include <limits>

#include "core.hpp"
#include "types.hpp"

namespace exeff::binary {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// inf / sup of the likelihood ratio treatment(x) / control(x) over the
// support. Bins empty in both variants are skipped; control = 0 with
// treatment > 0 pushes ratio_max to +inf; treatment = 0 with control > 0
// pushes ratio_min to 0.
struct BinaryBounds {
    double ratio_min = 0.0;  // in [0, 1)
    double ratio_max = 0.0;  // in (1, +inf]
};

BinaryBounds compute_bounds(const Distribution& control, const Distribution& treatment);

// The extreme corner of the alpha > 0 feasible quadrangle: the mixture
// coefficients of the first latent state under each variant, their
// difference alpha, and the relative difference beta = alpha / p_control.
struct BinaryExtreme {
    double p_control = 0.0;
    double p_treatment = 0.0;
    double alpha = 0.0;        // p_treatment - p_control, >= 0
    double beta = 0.0;         // ratio_max - 1; +inf when ratio_max is
};

BinaryExtreme extreme_coefficients(const BinaryBounds& b);

// Vertices of the two feasible quadrangles in the (p_A, p_B) unit square.
// quadrangle_pos is the alpha > 0 branch bounded below by the lines
// p_B = ratio_max * p_A and p_B = 1 - ratio_min * (1 - p_A); its vertices
// run (0,1), (0, 1-ratio_min), extreme corner, (1/ratio_max, 1).
// quadrangle_neg is the central reflection about (1/2, 1/2). With
// ratio_max = +inf the quadrangle collapses onto the p_A = 0 edge and
// `degenerate` is set.
struct FeasibleRegion2D {
    using Point = std::array<double, 2>;
    std::array<Point, 4> quadrangle_pos;
    std::array<Point, 4> quadrangle_neg;
    bool degenerate = false;
};

FeasibleRegion2D feasible_region(const BinaryBounds& b);

struct BinaryResult {
    Decomposition decomposition;  // canonicalized
    BinaryBounds bounds;
    BinaryExtreme extreme;
    bool mirrored = false;            // extreme state is column 1 of the canonical matrix
    bool no_detectable_effect = false;
};

// Closed-form extreme decomposition for two variants. Identical inputs
// (max entry-wise difference <= 1e-12) yield the flagged trivial
// decomposition instead of an error.
BinaryResult solve_binary(const Distribution& control, const Distribution& treatment,
                          double feas_tol = tol::feasibility);
BinaryResult solve_binary(const SourceDistributions& src, double feas_tol = tol::feasibility);

}  // namespace exeff::binary
