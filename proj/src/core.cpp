#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace exeff::core {

IndependenceReport linear_independence_report(const SourceDistributions& src, double rel_tol) {
    const auto sv = linalg::singular_values(src.stacked());
    IndependenceReport rep;
    const double cutoff = rel_tol * sv.front();
    for (double s : sv)
        if (s > cutoff) ++rep.rank;
    rep.independent = (rep.rank == src.k());
    return rep;
}

linalg::Mat basis_from_matrix(const linalg::Mat& p, const linalg::Mat& stacked_src) {
    const auto fac = linalg::lu_factor(p);
    if (fac.singular || std::abs(fac.det) <= tol::det_singular)
        fail(Errc::singular_matrix, "|det P| <= " + std::to_string(tol::det_singular));
    return linalg::lu_solve(fac, stacked_src);
}

linalg::Mat basis_from_matrix(const MixtureMatrix& p, const SourceDistributions& src) {
    if (p.k() != src.k()) fail(Errc::length_mismatch, "matrix size does not match variant count");
    return basis_from_matrix(p.entries(), src.stacked());
}

Feasibility is_feasible(const linalg::Mat& p, const linalg::Mat& stacked_src, double feas_tol) {
    const auto basis = basis_from_matrix(p, stacked_src);
    Feasibility f;
    f.worst_slack = *std::min_element(basis.a.begin(), basis.a.end());
    f.feasible = (f.worst_slack >= -feas_tol);
    return f;
}

Feasibility is_feasible(const MixtureMatrix& p, const SourceDistributions& src, double feas_tol) {
    if (p.k() != src.k()) fail(Errc::length_mismatch, "matrix size does not match variant count");
    return is_feasible(p.entries(), src.stacked(), feas_tol);
}

linalg::Mat reconstruct(const Decomposition& dec) {
    const std::size_t k = dec.matrix.k();
    const std::size_t n = dec.basis.front().size();
    linalg::Mat f(k, n);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t x = 0; x < n; ++x) f(j, x) = dec.basis[j][x];
    return linalg::matmul(dec.matrix.entries(), f);
}

Decomposition make_decomposition(const MixtureMatrix& p, const SourceDistributions& src,
                                 double feas_tol) {
    auto raw = basis_from_matrix(p, src);
    double slack = *std::min_element(raw.a.begin(), raw.a.end());
    for (double& v : raw.a) {
        if (v < 0.0 && v >= -feas_tol) v = 0.0;
    }
    std::vector<Distribution> basis;
    basis.reserve(src.k());
    for (std::size_t j = 0; j < src.k(); ++j) {
        std::vector<double> row(raw.cols);
        for (std::size_t x = 0; x < raw.cols; ++x) row[x] = raw(j, x);
        basis.emplace_back(src.support(), std::move(row));
    }
    Decomposition dec{p, std::move(basis), std::abs(linalg::det(p.entries())), 0.0,
                      std::min(slack, 0.0)};
    const auto rebuilt = reconstruct(dec);
    const auto target = src.stacked();
    double residual = 0.0;
    for (std::size_t i = 0; i < rebuilt.a.size(); ++i)
        residual = std::max(residual, std::abs(rebuilt.a[i] - target.a[i]));
    dec.residual = residual;
    return dec;
}

Decomposition trivial_decomposition(const SourceDistributions& src) {
    Decomposition dec{MixtureMatrix::identity(src.k()), src.dists(), 1.0, 0.0, 0.0};
    return dec;
}

Decomposition apply_permutation(const Decomposition& dec, const std::vector<std::size_t>& perm) {
    const std::size_t k = dec.matrix.k();
    if (perm.size() != k) fail(Errc::bad_permutation, "permutation length does not match K");
    std::vector<bool> hit(k, false);
    for (std::size_t v : perm) {
        if (v >= k || hit[v]) fail(Errc::bad_permutation, "not a permutation of 0..K-1");
        hit[v] = true;
    }
    linalg::Mat m(k, k);
    std::vector<Distribution> basis;
    basis.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) m(i, j) = dec.matrix(i, perm[j]);
        basis.push_back(dec.basis[perm[j]]);
    }
    return Decomposition{MixtureMatrix(std::move(m)), std::move(basis), dec.det_abs, dec.residual,
                         dec.feasibility_slack};
}

Decomposition canonicalize(const Decomposition& dec) {
    const std::size_t k = dec.matrix.k();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = dec.basis[a].mean_index();
        const double mb = dec.basis[b].mean_index();
        if (ma != mb) return ma < mb;
        return std::lexicographical_compare(dec.basis[a].probs().begin(), dec.basis[a].probs().end(),
                                            dec.basis[b].probs().begin(), dec.basis[b].probs().end());
    });
    const bool already = std::is_sorted(order.begin(), order.end());
    if (already) return dec;
    return apply_permutation(dec, order);
}

}  // namespace exeff::core
