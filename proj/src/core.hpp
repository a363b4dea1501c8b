#pragma once

#include "types.hpp"

namespace exeff::core {

struct IndependenceReport {
    std::size_t rank = 0;
    bool independent = false;
};

// Numerical rank of the stacked K x N probability matrix; singular values
// below rel_tol * (largest singular value) do not count.
IndependenceReport linear_independence_report(const SourceDistributions& src,
                                              double rel_tol = tol::rank_rel);

// f(x) = P^-1 d(x) column-wise; row j of the result is the raw basis
// vector f_j over the support. No non-negativity enforcement.
linalg::Mat basis_from_matrix(const MixtureMatrix& p, const SourceDistributions& src);
linalg::Mat basis_from_matrix(const linalg::Mat& p, const linalg::Mat& stacked_src);

struct Feasibility {
    bool feasible = false;
    double worst_slack = 0.0;  // min over basis entries
};

Feasibility is_feasible(const MixtureMatrix& p, const SourceDistributions& src,
                        double feas_tol = tol::feasibility);
Feasibility is_feasible(const linalg::Mat& p, const linalg::Mat& stacked_src, double feas_tol);

// P * f column-wise; rows line up with the source variants.
linalg::Mat reconstruct(const Decomposition& dec);

// Packages (P, src) into a Decomposition: derives the basis, clamps
// components in [-feas_tol, 0) to zero, records the pre-clamp minimum as
// feasibility_slack and the reconstruction error as residual.
Decomposition make_decomposition(const MixtureMatrix& p, const SourceDistributions& src,
                                 double feas_tol = tol::feasibility);

// Trivial decomposition: identity matrix, sources as basis.
Decomposition trivial_decomposition(const SourceDistributions& src);

// New basis j = old basis perm[j]; matrix columns move the same way, so
// the reconstruction is unchanged. det_abs and residual carry over.
Decomposition apply_permutation(const Decomposition& dec, const std::vector<std::size_t>& perm);

// Deterministic representative of the K!-fold permutation orbit: basis
// states ordered by non-decreasing mean support index, ties broken
// lexicographically on the probability vector.
Decomposition canonicalize(const Decomposition& dec);

}  // namespace exeff::core
