#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binary.hpp"
#include "core.hpp"
#include "types.hpp"

namespace exeff::solver {

struct SolverConfig {
    double feasibility_tol = tol::feasibility;
    int starts = 64;
    int max_iters = 2000;
    double step_init = 0.1;
    double step_shrink = 0.5;
    double min_step = 1e-7;
    std::uint64_t seed = 0;
    double det_tol = tol::det_singular;
    // Test hooks. force_general bypasses the binary and square-support
    // shortcuts; record_trace keeps the incumbent objective per iteration.
    bool force_general = false;
    bool record_trace = false;
};

void validate(const SolverConfig& cfg);

struct BinaryInfo {
    binary::BinaryBounds bounds;
    binary::BinaryExtreme extreme;
    bool mirrored = false;
    bool no_detectable_effect = false;
};

struct SolverResult {
    Decomposition decomposition;  // canonicalized
    double objective = 1.0;       // |det P|
    std::string branch_note;      // general | binary | square-support | degenerate
    int starts_converged = 0;
    int best_start_index = -1;
    bool degenerate = false;
    std::optional<BinaryInfo> binary_info;  // present on the binary branch (and for degenerate K=2)
    std::vector<std::vector<double>> traces;  // per start, when cfg.record_trace
};

// |det P| by elimination with partial pivoting.
double objective(const MixtureMatrix& p);

// Theorem-of-the-square-support branch: when the support has exactly K
// points, the stacked source matrix itself is the extreme mixture matrix
// and the basis is the point masses.
SolverResult square_support_shortcut(const SourceDistributions& src,
                                     double det_tol = tol::det_singular);

// Extreme decomposition for any K: dispatches to the degenerate, binary or
// square-support branch when one applies, otherwise runs a seeded
// multi-start local search over feasible stochastic matrices.
SolverResult solve_extreme(const SourceDistributions& src, const SolverConfig& cfg = {});

struct VerifyReport {
    bool matrix_rows_stochastic = false;
    bool matrix_entries_nonnegative = false;
    bool basis_nonnegative = false;
    bool basis_sums_to_one = false;
    bool residual_ok = false;
    bool det_consistent = false;
    bool objective_in_range = false;

    bool all_ok() const {
        return matrix_rows_stochastic && matrix_entries_nonnegative && basis_nonnegative &&
               basis_sums_to_one && residual_ok && det_consistent && objective_in_range;
    }
};

// Re-checks the decomposition conditions from scratch on raw matrices.
VerifyReport verify_solution(const linalg::Mat& p, const linalg::Mat& basis,
                             const SourceDistributions& src, double stored_det_abs);
VerifyReport verify_solution(const SolverResult& res, const SourceDistributions& src,
                             const SolverConfig& cfg = {});

}  // namespace exeff::solver
