#pragma once

#include "core.hpp"
#include "types.hpp"

namespace exeff::oracle {

struct GridSpec {
    int steps = 50;  // each matrix entry is a multiple of 1/steps
    double feasibility_tol = tol::feasibility;
    std::size_t row_cap = 1'000'000;       // max simplex grid points per row
    double matrix_cap = 1e9;               // max candidate matrices scanned
};

// All compositions of `steps` into K non-negative parts, scaled by
// 1/steps, in lexicographic order. C(steps + K - 1, K - 1) vectors.
std::vector<std::vector<double>> enumerate_simplex(std::size_t k, int steps,
                                                   std::size_t cap = 1'000'000);

struct OracleResult {
    Decomposition decomposition;  // canonicalized, built from the best matrix
    linalg::Mat best_matrix;      // raw grid matrix, pre-canonicalization
    double objective = 0.0;
    std::size_t scanned = 0;      // candidate matrices visited
};

// Exhaustive reference: scans every K-tuple of grid rows, skips singular
// candidates, keeps the feasible one with minimal |det| (ties resolved
// toward the lexicographically smaller entry sequence).
OracleResult brute_force_min_det(const SourceDistributions& src, const GridSpec& grid);

}  // namespace exeff::oracle
