#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace exeff::solver {

using linalg::Mat;
using linalg::Rng;

void validate(const SolverConfig& cfg) {
    if (cfg.feasibility_tol <= 0.0 || cfg.det_tol <= 0.0 || cfg.step_init <= 0.0 ||
        cfg.min_step <= 0.0)
        fail(Errc::invalid_argument, "solver tolerances must be positive");
    if (cfg.starts < 1) fail(Errc::invalid_argument, "starts must be >= 1");
    if (cfg.max_iters < 1) fail(Errc::invalid_argument, "max_iters must be >= 1");
    if (cfg.step_shrink <= 0.0 || cfg.step_shrink >= 1.0)
        fail(Errc::invalid_argument, "step_shrink must be in (0, 1)");
}

double objective(const MixtureMatrix& p) { return std::abs(linalg::det(p.entries())); }

namespace {

struct Candidate {
    bool usable = false;  // nonsingular and feasible
    double det_abs = 0.0;
};

Candidate evaluate(const Mat& p, const Mat& stacked, double feas_tol, double det_tol) {
    const auto fac = linalg::lu_factor(p);
    if (fac.singular || std::abs(fac.det) <= det_tol) return {};
    const auto basis = linalg::lu_solve(fac, stacked);
    const double worst = *std::min_element(basis.a.begin(), basis.a.end());
    if (worst < -feas_tol) return {false, std::abs(fac.det)};
    return {true, std::abs(fac.det)};
}

void center_rows(Mat& d) {
    for (std::size_t i = 0; i < d.rows; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < d.cols; ++j) mean += d(i, j);
        mean /= static_cast<double>(d.cols);
        for (std::size_t j = 0; j < d.cols; ++j) d(i, j) -= mean;
    }
}

// Scales so the largest row 2-norm is 1; returns false for a null direction.
bool normalize_direction(Mat& d) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d.rows; ++i) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < d.cols; ++j) norm2 += d(i, j) * d(i, j);
        worst = std::max(worst, norm2);
    }
    if (worst < 1e-28) return false;
    const double inv = 1.0 / std::sqrt(worst);
    for (double& v : d.a) v *= inv;
    return true;
}

Mat random_direction(Rng& rng, std::size_t k) {
    Mat d(k, k);
    for (double& v : d.a) v = rng.normal();
    center_rows(d);
    return d;
}

Mat single_row_direction(Rng& rng, std::size_t k, std::size_t row) {
    Mat d(k, k);
    for (std::size_t j = 0; j < k; ++j) d(row, j) = rng.normal();
    center_rows(d);
    return d;
}

Mat transfer_direction(std::size_t k, std::size_t row, std::size_t from, std::size_t to) {
    Mat d(k, k);
    d(row, from) = -1.0;
    d(row, to) = 1.0;
    return d;
}

// Steepest-descent direction of |det| restricted to row-sum-zero moves.
Mat det_descent_direction(const Mat& p) {
    const auto fac = linalg::lu_factor(p);
    if (fac.singular) return Mat(p.rows, p.cols);
    const auto inv = linalg::inverse(fac);
    Mat d(p.rows, p.cols);
    for (std::size_t a = 0; a < p.rows; ++a)
        for (std::size_t b = 0; b < p.cols; ++b) d(a, b) = -inv(b, a);
    center_rows(d);
    return d;
}

// Gradients of near-zero basis entries, row-centered; moving orthogonally
// to them slides along the active feasibility boundary.
std::vector<Mat> active_constraint_gradients(const Mat& p_inv, const Mat& basis,
                                             double activation) {
    const std::size_t k = p_inv.rows;
    std::vector<Mat> grads;
    const std::size_t cap = k * (k - 1);
    for (std::size_t j = 0; j < basis.rows && grads.size() < cap; ++j) {
        for (std::size_t x = 0; x < basis.cols && grads.size() < cap; ++x) {
            if (basis(j, x) > activation) continue;
            Mat g(k, k);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b) g(a, b) = -p_inv(j, a) * basis(b, x);
            center_rows(g);
            grads.push_back(std::move(g));
        }
    }
    // Orthonormalize, dropping directions already spanned.
    std::vector<Mat> ortho;
    for (auto& g : grads) {
        for (const auto& q : ortho) {
            const double dot = std::inner_product(g.a.begin(), g.a.end(), q.a.begin(), 0.0);
            for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] -= dot * q.a[i];
        }
        const double norm2 = std::inner_product(g.a.begin(), g.a.end(), g.a.begin(), 0.0);
        if (norm2 > 1e-20) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& v : g.a) v *= inv;
            ortho.push_back(std::move(g));
        }
    }
    return ortho;
}

void project_out(Mat& d, const std::vector<Mat>& ortho) {
    for (const auto& q : ortho) {
        const double dot = std::inner_product(d.a.begin(), d.a.end(), q.a.begin(), 0.0);
        for (std::size_t i = 0; i < d.a.size(); ++i) d.a[i] -= dot * q.a[i];
    }
}

Mat step_candidate(const Mat& p, const Mat& dir, double t) {
    Mat cand = p;
    for (std::size_t i = 0; i < cand.a.size(); ++i) cand.a[i] += t * dir.a[i];
    std::vector<double> row(cand.cols);
    for (std::size_t i = 0; i < cand.rows; ++i) {
        for (std::size_t j = 0; j < cand.cols; ++j) row[j] = cand(i, j);
        linalg::project_to_simplex(row);
        for (std::size_t j = 0; j < cand.cols; ++j) cand(i, j) = row[j];
    }
    return cand;
}

bool materially_different(const Mat& a, const Mat& b) {
    for (std::size_t i = 0; i < a.a.size(); ++i)
        if (std::abs(a.a[i] - b.a[i]) > 1e-15) return true;
    return false;
}

std::vector<std::size_t> nth_permutation(std::size_t k, std::size_t index) {
    std::vector<std::size_t> pool(k);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> fact(k, 1);
    for (std::size_t i = 1; i < k; ++i) fact[i] = fact[i - 1] * i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t slot = k; slot-- > 0;) {
        const std::size_t pick = (index / fact[slot]) % (slot + 1);
        out.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        index %= fact[slot];
    }
    return out;
}

Mat permutation_mat(const std::vector<std::size_t>& perm) {
    Mat m(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) m(i, perm[i]) = 1.0;
    return m;
}

Mat random_stochastic(Rng& rng, std::size_t k) {
    Mat m(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            m(i, j) = -std::log(u);
            sum += m(i, j);
        }
        for (std::size_t j = 0; j < k; ++j) m(i, j) /= sum;
    }
    return m;
}

// Feasible perturbation of the start-th permutation anchor. Anchors cycle
// through all K! permutations so every trivial solution gets covered.
Mat start_matrix(std::size_t k, std::size_t start, Rng& rng, const Mat& stacked, double feas_tol,
                 double det_tol) {
    std::size_t fact = 1;
    bool enumerable = true;
    for (std::size_t i = 2; i <= k; ++i) {
        fact *= i;
        if (fact > (1u << 20)) {
            enumerable = false;
            break;
        }
    }
    Mat anchor;
    if (enumerable) {
        anchor = permutation_mat(nth_permutation(k, start % fact));
    } else {
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = k; i-- > 1;) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
        anchor = permutation_mat(perm);
    }
    const auto noise = random_stochastic(rng, k);
    double mix = 0.3 * rng.uniform();
    for (int shrink = 0; shrink < 40; ++shrink) {
        Mat p(k, k);
        for (std::size_t i = 0; i < p.a.size(); ++i)
            p.a[i] = (1.0 - mix) * anchor.a[i] + mix * noise.a[i];
        if (evaluate(p, stacked, feas_tol, det_tol).usable) return p;
        mix *= 0.5;
        if (mix < 1e-12) break;
    }
    return anchor;
}

struct StartOutcome {
    Mat p;
    double obj = 1.0;
    bool converged = false;
    std::vector<double> trace;
};

StartOutcome local_search(Mat p, Rng& rng, const Mat& stacked, const SolverConfig& cfg) {
    StartOutcome out;
    out.obj = evaluate(p, stacked, cfg.feasibility_tol, cfg.det_tol).det_abs;
    double step = cfg.step_init;
    std::optional<Mat> momentum;
    const double activation = 1e-5;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // Direction pool for this sweep. Momentum first: a direction that
        // just worked tends to keep working along a boundary.
        std::vector<Mat> pool;
        if (momentum) pool.push_back(*momentum);

        const auto fac = linalg::lu_factor(p);
        const auto p_inv = linalg::inverse(fac);
        const auto basis = linalg::lu_solve(fac, stacked);
        Mat grad = det_descent_direction(p);
        if (normalize_direction(grad)) pool.push_back(grad);

        const auto active = active_constraint_gradients(p_inv, basis, activation);
        if (!active.empty()) {
            Mat slide = grad;
            project_out(slide, active);
            if (normalize_direction(slide)) pool.push_back(slide);
        }
        for (int r = 0; r < 4; ++r) {
            Mat d = random_direction(rng, p.rows);
            if (!active.empty() && (r % 2 == 1)) project_out(d, active);
            if (normalize_direction(d)) pool.push_back(std::move(d));
        }
        for (std::size_t row = 0; row < p.rows; ++row) {
            Mat d = single_row_direction(rng, p.rows, row);
            if (normalize_direction(d)) pool.push_back(std::move(d));
        }
        for (int t = 0; t < 2; ++t) {
            const std::size_t row = rng.uniform_index(p.rows);
            std::size_t from = rng.uniform_index(p.cols);
            std::size_t to = rng.uniform_index(p.cols);
            if (from == to) to = (to + 1) % p.cols;
            pool.push_back(transfer_direction(p.rows, row, from, to));
        }

        bool accepted = false;
        for (const auto& dir : pool) {
            for (double t : {step, step * 0.5, step * 0.25}) {
                const Mat cand = step_candidate(p, dir, t);
                if (!materially_different(cand, p)) continue;
                const auto ev = evaluate(cand, stacked, cfg.feasibility_tol, cfg.det_tol);
                if (!ev.usable) continue;
                if (ev.det_abs < out.obj * (1.0 - 1e-12)) {
                    p = cand;
                    out.obj = ev.det_abs;
                    momentum = dir;
                    accepted = true;
                    step = std::min(step * 1.25, cfg.step_init);
                    break;
                }
            }
            if (accepted) break;
        }
        if (cfg.record_trace) out.trace.push_back(out.obj);
        if (!accepted) {
            momentum.reset();
            step *= cfg.step_shrink;
            if (step < cfg.min_step) {
                out.converged = true;
                break;
            }
        }
    }
    out.p = std::move(p);
    return out;
}

SolverResult degenerate_result(const SourceDistributions& src) {
    SolverResult res;
    res.decomposition = core::canonicalize(core::trivial_decomposition(src));
    res.objective = 1.0;
    res.branch_note = "degenerate";
    res.degenerate = true;
    if (src.k() == 2) {
        BinaryInfo info;
        info.bounds = {1.0, 1.0};
        info.extreme = {1.0, 1.0, 0.0, 0.0};
        info.no_detectable_effect = true;
        res.binary_info = info;
    }
    return res;
}

SolverResult from_binary(const binary::BinaryResult& br) {
    SolverResult res;
    res.decomposition = br.decomposition;
    res.objective = br.decomposition.det_abs;
    res.branch_note = br.no_detectable_effect ? "degenerate" : "binary";
    res.degenerate = br.no_detectable_effect;
    res.binary_info = BinaryInfo{br.bounds, br.extreme, br.mirrored, br.no_detectable_effect};
    return res;
}

}  // namespace

SolverResult square_support_shortcut(const SourceDistributions& src, double det_tol) {
    if (src.support_size() != src.k())
        fail(Errc::invalid_argument, "square-support branch needs |X| = K");
    const Mat d = src.stacked();
    const double det = linalg::det(d);
    if (std::abs(det) <= det_tol) {
        // SingularD: the stacked sources are not invertible, fall back to
        // the degenerate handling.
        return degenerate_result(src);
    }
    std::vector<Distribution> basis;
    basis.reserve(src.k());
    for (std::size_t j = 0; j < src.k(); ++j) {
        std::vector<double> point(src.k(), 0.0);
        point[j] = 1.0;
        basis.emplace_back(src.support(), std::move(point));
    }
    Decomposition dec{MixtureMatrix(d), std::move(basis), std::abs(det), 0.0, 0.0};
    SolverResult res;
    res.decomposition = core::canonicalize(dec);
    res.objective = std::abs(det);
    res.branch_note = "square-support";
    return res;
}

SolverResult solve_extreme(const SourceDistributions& src, const SolverConfig& cfg) {
    validate(cfg);
    if (src.support_size() < 2) fail(Errc::empty_support, "support too small");

    const auto indep = core::linear_independence_report(src);
    if (!indep.independent) return degenerate_result(src);

    if (!cfg.force_general) {
        if (src.k() == 2) return from_binary(binary::solve_binary(src, cfg.feasibility_tol));
        if (src.support_size() == src.k()) return square_support_shortcut(src, cfg.det_tol);
    }

    const Mat stacked = src.stacked();
    SolverResult res;
    res.branch_note = "general";
    double best_obj = 2.0;
    Mat best_p;
    for (int s = 0; s < cfg.starts; ++s) {
        Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(s)));
        Mat p0 = start_matrix(src.k(), static_cast<std::size_t>(s), rng, stacked,
                              cfg.feasibility_tol, cfg.det_tol);
        auto outcome = local_search(std::move(p0), rng, stacked, cfg);
        if (outcome.converged) ++res.starts_converged;
        if (cfg.record_trace) res.traces.push_back(std::move(outcome.trace));
        if (outcome.obj < best_obj) {
            best_obj = outcome.obj;
            best_p = std::move(outcome.p);
            res.best_start_index = s;
        }
    }
    res.decomposition =
        core::canonicalize(core::make_decomposition(MixtureMatrix(best_p), src, cfg.feasibility_tol));
    res.objective = res.decomposition.det_abs;
    return res;
}

VerifyReport verify_solution(const linalg::Mat& p, const linalg::Mat& basis,
                             const SourceDistributions& src, double stored_det_abs) {
    VerifyReport rep;
    rep.matrix_rows_stochastic = true;
    rep.matrix_entries_nonnegative = true;
    for (std::size_t i = 0; i < p.rows; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < p.cols; ++j) {
            if (p(i, j) < -tol::entry_negative) rep.matrix_entries_nonnegative = false;
            row_sum += p(i, j);
        }
        if (std::abs(row_sum - 1.0) > 1e-9) rep.matrix_rows_stochastic = false;
    }

    rep.basis_nonnegative = true;
    rep.basis_sums_to_one = true;
    for (std::size_t j = 0; j < basis.rows; ++j) {
        double sum = 0.0;
        for (std::size_t x = 0; x < basis.cols; ++x) {
            if (basis(j, x) < -tol::entry_negative) rep.basis_nonnegative = false;
            sum += basis(j, x);
        }
        if (std::abs(sum - 1.0) > 1e-9) rep.basis_sums_to_one = false;
    }

    const auto rebuilt = linalg::matmul(p, basis);
    const auto target = src.stacked();
    double residual = 0.0;
    for (std::size_t i = 0; i < rebuilt.a.size(); ++i)
        residual = std::max(residual, std::abs(rebuilt.a[i] - target.a[i]));
    rep.residual_ok = residual <= tol::reconstruction;

    const double det_abs = std::abs(linalg::det(p));
    rep.det_consistent = std::abs(det_abs - stored_det_abs) <= 1e-10;
    rep.objective_in_range = det_abs <= 1.0 + 1e-10;
    return rep;
}

VerifyReport verify_solution(const SolverResult& res, const SourceDistributions& src,
                             const SolverConfig&) {
    const auto& dec = res.decomposition;
    linalg::Mat basis(dec.basis.size(), dec.basis.front().size());
    for (std::size_t j = 0; j < basis.rows; ++j)
        for (std::size_t x = 0; x < basis.cols; ++x) basis(j, x) = dec.basis[j][x];
    return verify_solution(dec.matrix.entries(), basis, src, dec.det_abs);
}

}  // namespace exeff::solver
