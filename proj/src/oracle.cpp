#include "oracle.hpp"

#include <algorithm>
#include <cmath>

namespace exeff::oracle {

using linalg::Mat;

namespace {

double composition_count(std::size_t k, int steps) {
    // C(steps + k - 1, k - 1), evaluated in floating point: only compared
    // against caps well below 2^53.
    double c = 1.0;
    for (std::size_t i = 1; i < k; ++i)
        c *= static_cast<double>(steps + static_cast<int>(i)) / static_cast<double>(i);
    return c;
}

void emit_compositions(std::size_t k, int remaining, std::vector<int>& parts,
                       std::vector<std::vector<double>>& out, int steps) {
    if (parts.size() + 1 == k) {
        std::vector<double> v(k);
        for (std::size_t i = 0; i < parts.size(); ++i)
            v[i] = static_cast<double>(parts[i]) / static_cast<double>(steps);
        v[k - 1] = static_cast<double>(remaining) / static_cast<double>(steps);
        out.push_back(std::move(v));
        return;
    }
    for (int c = 0; c <= remaining; ++c) {
        parts.push_back(c);
        emit_compositions(k, remaining - c, parts, out, steps);
        parts.pop_back();
    }
}

double quick_det(const double* const* rows, std::size_t k, const Mat& scratch_unused) {
    (void)scratch_unused;
    if (k == 2) return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
    if (k == 3)
        return rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1]) -
               rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0]) +
               rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
    Mat m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = rows[i][j];
    return linalg::det(m);
}

}  // namespace

std::vector<std::vector<double>> enumerate_simplex(std::size_t k, int steps, std::size_t cap) {
    if (k < 2) fail(Errc::invalid_argument, "simplex dimension must be >= 2");
    if (steps < 2) fail(Errc::invalid_argument, "steps must be >= 2");
    const double count = composition_count(k, steps);
    if (count > static_cast<double>(cap))
        fail(Errc::size_overflow, "grid would hold " + std::to_string(count) + " rows, cap " +
                                      std::to_string(cap));
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> parts;
    emit_compositions(k, steps, parts, out, steps);
    return out;
}

OracleResult brute_force_min_det(const SourceDistributions& src, const GridSpec& grid) {
    if (grid.steps < 2) fail(Errc::invalid_argument, "steps must be >= 2");
    if (grid.feasibility_tol <= 0.0) fail(Errc::invalid_argument, "feasibility_tol must be positive");
    const std::size_t k = src.k();
    const auto rows = enumerate_simplex(k, grid.steps, grid.row_cap);
    const double total = std::pow(static_cast<double>(rows.size()), static_cast<double>(k));
    if (total > grid.matrix_cap)
        fail(Errc::size_overflow,
             "grid would scan " + std::to_string(total) + " matrices, cap " +
                 std::to_string(grid.matrix_cap));

    const Mat stacked = src.stacked();
    std::vector<std::size_t> idx(k, 0);
    std::vector<const double*> row_ptrs(k);
    Mat candidate(k, k);
    Mat scratch;

    bool found = false;
    double best_obj = 0.0;
    std::vector<std::size_t> best_idx;
    std::size_t scanned = 0;

    bool more = true;
    while (more) {
        ++scanned;
        for (std::size_t i = 0; i < k; ++i) row_ptrs[i] = rows[idx[i]].data();
        const double det = quick_det(row_ptrs.data(), k, scratch);
        const double det_abs = std::abs(det);
        if (det_abs > tol::det_singular && (!found || det_abs < best_obj)) {
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) candidate(i, j) = row_ptrs[i][j];
            const auto fac = linalg::lu_factor(candidate);
            if (!fac.singular) {
                const auto basis = linalg::lu_solve(fac, stacked);
                const double worst = *std::min_element(basis.a.begin(), basis.a.end());
                if (worst >= -grid.feasibility_tol) {
                    found = true;
                    best_obj = det_abs;
                    best_idx = idx;
                }
            }
        }
        // odometer over row tuples; innermost index spins fastest, so the
        // scan order is lexicographic over concatenated entries
        more = false;
        for (std::size_t pos = k; pos-- > 0;) {
            if (++idx[pos] < rows.size()) {
                more = true;
                break;
            }
            idx[pos] = 0;
        }
    }
    if (!found)
        fail(Errc::no_feasible_point,
             "no feasible grid matrix; permutation rows should always qualify");

    Mat best(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) best(i, j) = rows[best_idx[i]][j];
    OracleResult res;
    res.best_matrix = best;
    res.scanned = scanned;
    res.decomposition =
        core::canonicalize(core::make_decomposition(MixtureMatrix(best), src, grid.feasibility_tol));
    res.objective = res.decomposition.det_abs;
    return res;
}

}  // namespace exeff::oracle
