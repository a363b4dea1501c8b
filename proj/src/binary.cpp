#include "binary.hpp"

#include <cmath>

namespace exeff::binary {

namespace {

bool effectively_identical(const Distribution& a, const Distribution& b) {
    double max_diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        max_diff = std::max(max_diff, std::abs(a[i] - b[i]));
    return max_diff <= 1e-12;
}

MixtureMatrix matrix_from_coefficients(double p_control, double p_treatment) {
    linalg::Mat m(2, 2);
    m(0, 0) = p_control;
    m(0, 1) = 1.0 - p_control;
    m(1, 0) = p_treatment;
    m(1, 1) = 1.0 - p_treatment;
    return MixtureMatrix(std::move(m));
}

}  // namespace

BinaryBounds compute_bounds(const Distribution& control, const Distribution& treatment) {
    if (!(*control.support() == *treatment.support()))
        fail(Errc::support_mismatch, "distributions use different supports");
    if (effectively_identical(control, treatment))
        fail(Errc::identical_distributions, "distributions agree within 1e-12 per entry");
    BinaryBounds b{kInf, 0.0};
    for (std::size_t i = 0; i < control.size(); ++i) {
        const double da = control[i];
        const double db = treatment[i];
        if (da == 0.0 && db == 0.0) continue;
        const double ratio = (da == 0.0) ? kInf : db / da;
        b.ratio_min = std::min(b.ratio_min, ratio);
        b.ratio_max = std::max(b.ratio_max, ratio);
    }
    return b;
}

BinaryExtreme extreme_coefficients(const BinaryBounds& b) {
    const double m = b.ratio_min;
    const double big = b.ratio_max;
    if (!(big - m > 1e-12)) fail(Errc::degenerate_bounds, "ratio bounds collapse");
    if (!(m < 1.0) || !(big > 1.0))
        fail(Errc::degenerate_bounds, "ratio bounds must straddle 1");
    BinaryExtreme e;
    if (std::isinf(big)) {
        e.p_control = 0.0;
        e.p_treatment = 1.0 - m;
        e.alpha = 1.0 - m;
        e.beta = kInf;
    } else {
        e.p_control = (1.0 - m) / (big - m);
        e.p_treatment = big * e.p_control;
        e.alpha = e.p_treatment - e.p_control;
        e.beta = big - 1.0;
    }
    return e;
}

FeasibleRegion2D feasible_region(const BinaryBounds& b) {
    const double m = b.ratio_min;
    const double big = b.ratio_max;
    if (!(big - m > 1e-12) || !(m < 1.0) || !(big > 1.0))
        fail(Errc::degenerate_bounds, "ratio bounds collapse");
    const auto e = extreme_coefficients(b);
    FeasibleRegion2D region;
    region.degenerate = std::isinf(big);
    const double top_x = region.degenerate ? 0.0 : 1.0 / big;
    region.quadrangle_pos = {{{0.0, 1.0},
                              {0.0, 1.0 - m},
                              {e.p_control, e.p_treatment},
                              {top_x, 1.0}}};
    for (std::size_t i = 0; i < 4; ++i) {
        region.quadrangle_neg[i] = {1.0 - region.quadrangle_pos[i][0],
                                    1.0 - region.quadrangle_pos[i][1]};
    }
    return region;
}

BinaryResult solve_binary(const Distribution& control, const Distribution& treatment,
                          double feas_tol) {
    SourceDistributions src({"A", "B"}, {control, treatment});
    return solve_binary(src, feas_tol);
}

BinaryResult solve_binary(const SourceDistributions& src, double feas_tol) {
    if (src.k() != 2) fail(Errc::invalid_argument, "binary solver needs exactly 2 variants");
    const Distribution& control = src.dist(0);
    const Distribution& treatment = src.dist(1);

    if (effectively_identical(control, treatment)) {
        BinaryResult out{core::trivial_decomposition(src),
                         BinaryBounds{1.0, 1.0},
                         BinaryExtreme{1.0, 1.0, 0.0, 0.0},
                         false,
                         true};
        return out;
    }

    BinaryResult out;
    out.bounds = compute_bounds(control, treatment);
    out.extreme = extreme_coefficients(out.bounds);
    const auto p = matrix_from_coefficients(out.extreme.p_control, out.extreme.p_treatment);
    out.decomposition = core::canonicalize(core::make_decomposition(p, src, feas_tol));
    // After canonical reordering the extreme state (the one whose share
    // grows under treatment) may sit in column 1; flag that as mirrored.
    const auto& pm = out.decomposition.matrix;
    out.mirrored = (pm(1, 0) - pm(0, 0)) < 0.0;
    return out;
}

}  // namespace exeff::binary
