// Acceptance suite: one checked criterion per function, one PASS/FAIL line
// per criterion on stdout. Run with no arguments for the full battery or
// with criterion numbers (e.g. `acceptance 3 5`) for a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "binary.hpp"
#include "core.hpp"
#include "ingest.hpp"
#include "oracle.hpp"
#include "serialize.hpp"
#include "solver.hpp"
#include "synth.hpp"
#include "test_helpers.hpp"

using namespace exeff;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

// ---------------------------------------------------------------------
// 1. Published-table structural cross-check: invert the closed form from
//    the reported mixture coefficients, feed the bounds back in, compare.
Check criterion1() {
    Check c;
    struct Row {
        double p_a, p_b, alpha, beta;
    };
    const Row rows[] = {{0.5617, 0.5805, 0.0188, 0.0336},
                        {0.3862, 0.4131, 0.0269, 0.0696}};
    for (const auto& row : rows) {
        // independent inversion: p_b = M p_a and 1 - p_b = m (1 - p_a)
        const double ratio_max = row.p_b / row.p_a;
        const double ratio_min = (1.0 - row.p_b) / (1.0 - row.p_a);
        const auto e = binary::extreme_coefficients({ratio_min, ratio_max});
        c.expect(std::abs(e.p_control - row.p_a) <= 2e-3, "p_control drifted");
        c.expect(std::abs(e.p_treatment - row.p_b) <= 2e-3, "p_treatment drifted");
        c.expect(std::abs(e.alpha - row.alpha) <= 5e-4, "alpha mismatch");
        c.expect(std::abs(e.beta - row.beta) <= 5e-4, "beta mismatch");
    }
    return c;
}

// ---------------------------------------------------------------------
// 2. Closed-form fixtures reproduce exactly.
Check criterion2() {
    Check c;
    const auto s2 = indexed_support(2);
    const SourceDistributions first(
        {"A", "B"}, {Distribution(s2, {0.5, 0.5}), Distribution(s2, {0.25, 0.75})});
    const auto r1 = binary::solve_binary(first);
    c.expect(std::abs(r1.extreme.alpha - 0.25) <= 1e-10, "fixture1 alpha");
    c.expect(std::abs(r1.extreme.beta - 0.5) <= 1e-10, "fixture1 beta");
    c.expect(std::abs(r1.decomposition.det_abs - 0.25) <= 1e-10, "fixture1 |det|");
    // basis is the two point masses, in canonical order
    c.expect(std::abs(r1.decomposition.basis[0][0] - 1.0) <= 1e-10 &&
                 std::abs(r1.decomposition.basis[1][1] - 1.0) <= 1e-10,
             "fixture1 basis");

    const auto s3 = indexed_support(3);
    const SourceDistributions second(
        {"A", "B"}, {Distribution(s3, {0.2, 0.3, 0.5}), Distribution(s3, {0.3, 0.3, 0.4})});
    const auto r2 = binary::solve_binary(second);
    const double p[2][2] = {{2.0 / 7, 5.0 / 7}, {3.0 / 7, 4.0 / 7}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c.expect(std::abs(r2.decomposition.matrix(i, j) - p[i][j]) <= 1e-10, "fixture2 P");
    c.expect(std::abs(r2.decomposition.det_abs - 1.0 / 7) <= 1e-10, "fixture2 objective");
    c.expect(testutil::max_abs_diff(r2.decomposition.basis[0].probs(), {0.7, 0.3, 0.0}) <= 1e-10,
             "fixture2 f_0");
    c.expect(testutil::max_abs_diff(r2.decomposition.basis[1].probs(), {0.0, 0.3, 0.7}) <= 1e-10,
             "fixture2 f_1");
    return c;
}

// ---------------------------------------------------------------------
// 3. General search vs the binary closed form on 100 random pairs.
Check criterion3() {
    Check c;
    solver::SolverConfig cfg;
    cfg.force_general = true;
    cfg.starts = 16;
    cfg.seed = 1234;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t n = 3 + i * 61 % 62;  // spreads over {3..64}
        const auto src = testutil::random_pair(i * 7919 + 1, n);
        const auto closed = binary::solve_binary(src).decomposition.det_abs;
        const auto general = solver::solve_extreme(src, cfg).objective;
        c.expect(std::abs(general - closed) <= 1e-4,
                 "pair " + std::to_string(i) + ": general " + std::to_string(general) +
                     " vs closed " + std::to_string(closed));
        if (!c.ok) break;
    }
    return c;
}

// ---------------------------------------------------------------------
// 4. Square-support recovery through the general path.
Check criterion4() {
    Check c;
    linalg::Rng rng(555);
    solver::SolverConfig cfg;
    cfg.force_general = true;
    cfg.starts = 24;
    cfg.seed = 4321;
    for (std::size_t k = 2; k <= 4 && c.ok; ++k) {
        for (int trial = 0; trial < 20 && c.ok; ++trial) {
            const auto d = testutil::random_nondegenerate_stochastic(rng, k, 0.1);
            const auto src = testutil::sources_from_rows(d);
            const auto res = solver::solve_extreme(src, cfg);
            const double want = std::abs(linalg::det(d));
            c.expect(std::abs(res.objective - want) <= 1e-3,
                     "K=" + std::to_string(k) + " trial " + std::to_string(trial) + ": objective " +
                         std::to_string(res.objective) + " vs |det D| " + std::to_string(want));
            // min over column permutations of the max-norm gap to D*Q
            std::vector<std::size_t> perm(k);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            double best_gap = 1e300;
            do {
                double gap = 0.0;
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                        gap = std::max(gap, std::abs(res.decomposition.matrix(i, j) - d(i, perm[j])));
                best_gap = std::min(best_gap, gap);
            } while (std::next_permutation(perm.begin(), perm.end()));
            c.expect(best_gap <= 1e-2, "K=" + std::to_string(k) + " trial " +
                                            std::to_string(trial) + ": matrix gap " +
                                            std::to_string(best_gap));
        }
    }
    return c;
}

// ---------------------------------------------------------------------
// 5. Solver vs the exhaustive grid oracle.
Check criterion5() {
    Check c;
    solver::SolverConfig cfg;
    cfg.seed = 777;
    for (std::uint64_t i = 0; i < 10 && c.ok; ++i) {
        const auto src = testutil::random_pair(i * 271 + 11, 3 + i % 6);
        const auto solved = solver::solve_extreme(src, cfg).objective;
        oracle::GridSpec grid;
        grid.steps = 200;
        const auto grid_obj = oracle::brute_force_min_det(src, grid).objective;
        c.expect(solved <= grid_obj + 1e-9, "K=2 #" + std::to_string(i) + ": solver above grid");
        c.expect(grid_obj <= solved + 2.0 / grid.steps,
                 "K=2 #" + std::to_string(i) + ": grid " + std::to_string(grid_obj) +
                     " above solver " + std::to_string(solved) + " + 2/steps");
    }
    for (std::uint64_t i = 0; i < 5 && c.ok; ++i) {
        synth::PlantSpec spec;
        spec.k = 3;
        spec.n = 4 + i % 3;
        spec.seed = 900 + i;
        spec.min_det = 0.15;
        spec.basis_concentration = 2.0;
        const auto inst = synth::plant(spec);
        const auto solved = solver::solve_extreme(inst.src, cfg).objective;
        oracle::GridSpec grid;
        grid.steps = 20;
        const auto grid_obj = oracle::brute_force_min_det(inst.src, grid).objective;
        c.expect(solved <= grid_obj + 1e-9, "K=3 #" + std::to_string(i) + ": solver " +
                                                std::to_string(solved) + " above grid " +
                                                std::to_string(grid_obj));
        c.expect(grid_obj <= solved + 2.0 / grid.steps,
                 "K=3 #" + std::to_string(i) + ": grid " + std::to_string(grid_obj) +
                     " above solver " + std::to_string(solved) + " + 2/steps");
    }
    return c;
}

// ---------------------------------------------------------------------
// 6. Planted instances: the solver never does worse than the plant.
Check criterion6() {
    Check c;
    solver::SolverConfig cfg;
    cfg.seed = 31337;
    for (std::uint64_t i = 0; i < 50 && c.ok; ++i) {
        synth::PlantSpec spec;
        spec.k = 2 + i % 2;
        spec.n = spec.k + (i * 13) % (33 - spec.k);
        spec.seed = i;
        const auto inst = synth::plant(spec);
        const auto res = solver::solve_extreme(inst.src, cfg);
        c.expect(res.objective <= inst.matrix.det_abs() + 1e-6,
                 "#" + std::to_string(i) + " (K=" + std::to_string(spec.k) + ", N=" +
                     std::to_string(spec.n) + "): objective " + std::to_string(res.objective) +
                     " vs planted " + std::to_string(inst.matrix.det_abs()));
        c.expect(res.decomposition.residual <= 1e-8,
                 "#" + std::to_string(i) + ": residual " + std::to_string(res.decomposition.residual));
    }
    return c;
}

// ---------------------------------------------------------------------
// 7. Property suites: determinant bound, permutation closure,
//    canonicalize invariance, feasible-region grid, basis row sums.
Check criterion7() {
    Check c;
    linalg::Rng rng(2718);

    // |det| <= 1 on 10^4 random stochastic matrices; near-1 determinants
    // only at near-permutations
    for (int i = 0; i < 10000 && c.ok; ++i) {
        const std::size_t k = 2 + i % 3;
        const auto m = testutil::random_stochastic(rng, k);
        const double det_abs = std::abs(linalg::det(m));
        c.expect(det_abs <= 1.0 + 1e-10, "|det| above 1");
        if (det_abs >= 1.0 - 1e-10) {
            for (std::size_t r = 0; r < k; ++r) {
                double top = 0.0;
                for (std::size_t j = 0; j < k; ++j) top = std::max(top, m(r, j));
                c.expect(top >= 1.0 - 1e-8, "near-unit det without permutation structure");
            }
        }
    }

    // permutation closure + canonicalize invariance on random feasible
    // decompositions
    for (int i = 0; i < 200 && c.ok; ++i) {
        const std::size_t k = 2 + i % 3;
        auto src = testutil::sources_from_rows(testutil::random_stochastic(rng, k));
        auto dec = core::trivial_decomposition(src);
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t j = k; j-- > 1;) std::swap(perm[j], perm[rng.uniform_index(j + 1)]);
        const auto permuted = core::apply_permutation(dec, perm);
        c.expect(std::abs(permuted.det_abs - dec.det_abs) <= 1e-12, "permutation changed |det|");
        const auto feas = core::is_feasible(permuted.matrix, src, 1e-9);
        c.expect(feas.feasible, "permutation broke feasibility");
        const auto ca = core::canonicalize(dec);
        const auto cb = core::canonicalize(permuted);
        c.expect(testutil::max_abs_diff(ca.matrix.entries().a, cb.matrix.entries().a) <= 1e-15,
                 "canonicalize not permutation-invariant");
    }

    // feasible-region consistency on the 101x101 grid
    {
        const auto s2 = indexed_support(2);
        const SourceDistributions src(
            {"A", "B"}, {Distribution(s2, {0.5, 0.5}), Distribution(s2, {0.25, 0.75})});
        const auto stacked = src.stacked();
        const double m = 0.5, M = 1.5;
        const auto extreme = binary::extreme_coefficients({m, M});
        for (int i = 0; i <= 100 && c.ok; ++i) {
            for (int j = 0; j <= 100; ++j) {
                const double pa = i / 100.0, pb = j / 100.0;
                const double pos1 = pb - M * pa, pos2 = pb - (1.0 - m * (1.0 - pa));
                const double neg1 = m * pa - pb, neg2 = (1.0 - M * (1.0 - pa)) - pb;
                const double margin = 1e-6;
                const bool inside =
                    (pos1 > margin && pos2 > margin) || (neg1 > margin && neg2 > margin);
                const bool outside =
                    (pos1 < -margin || pos2 < -margin) && (neg1 < -margin || neg2 < -margin);
                if (!inside && !outside) continue;
                linalg::Mat p(2, 2);
                p(0, 0) = pa;  p(0, 1) = 1.0 - pa;
                p(1, 0) = pb;  p(1, 1) = 1.0 - pb;
                if (std::abs(linalg::det(p)) <= 1e-12) continue;
                const auto feas = core::is_feasible(p, stacked, 1e-9);
                c.expect(feas.feasible == inside,
                         "grid point (" + std::to_string(pa) + ", " + std::to_string(pb) +
                             ") disagrees with the half-planes");
                // optimality of the extreme corner on the alpha > 0 branch
                if (feas.feasible && pb >= pa)
                    c.expect(pb - pa >= extreme.alpha - 1e-6,
                             "feasible point beats the extreme corner");
                if (!c.ok) break;
            }
        }
    }

    // basis row sums are preserved for random invertible stochastic P
    for (int i = 0; i < 200 && c.ok; ++i) {
        const std::size_t k = 2 + i % 3;
        const std::size_t n = k + i % 13;
        const auto p = testutil::random_nondegenerate_stochastic(rng, k, 0.02);
        linalg::Mat rows(k, n);
        for (std::size_t r = 0; r < k; ++r) {
            const auto probs = testutil::random_probs(rng, n);
            for (std::size_t x = 0; x < n; ++x) rows(r, x) = probs[x];
        }
        const auto f = core::basis_from_matrix(p, rows);
        for (std::size_t r = 0; r < k; ++r) {
            double sum = 0.0;
            for (std::size_t x = 0; x < n; ++x) sum += f(r, x);
            c.expect(std::abs(sum - 1.0) <= 1e-9, "basis row sum drifted");
        }
    }
    return c;
}

// ---------------------------------------------------------------------
// 8. End-to-end pipeline: plant, sample a million units per variant,
//    ingest, solve, compare with the planted effect; A/A raises the
//    no-effect path.
Check criterion8() {
    Check c;
    synth::PlantSpec spec;
    spec.k = 2;
    spec.n = 6;
    spec.seed = 424242;
    spec.min_det = 0.1;
    spec.basis_concentration = 2.0;
    const auto inst = synth::plant(spec);
    const auto planted = binary::solve_binary(inst.src);

    const auto recs = synth::sample_observations(inst.src, 1000000, 99);
    ingest::BinningConfig bc;
    bc.transform = ingest::Transform::none;
    bc.strategy = ingest::BinStrategy::fixed_width;
    bc.n_bins = static_cast<int>(spec.n);
    const auto emp = ingest::empirical_distributions(recs, bc);
    const auto ds = serialize::dataset_from_empirical(emp);
    const auto res = solver::solve_extreme(ds.src);
    const auto rep = serialize::build_report(ds, res);

    c.expect(rep.alpha.has_value(), "pipeline lost the binary quantities");
    if (rep.alpha) {
        c.expect(std::abs(*rep.alpha - planted.extreme.alpha) <= 0.01,
                 "recovered alpha " + std::to_string(*rep.alpha) + " vs planted " +
                     std::to_string(planted.extreme.alpha));
        c.expect(std::abs(*rep.beta - planted.extreme.beta) <= 0.02,
                 "recovered beta " + std::to_string(*rep.beta) + " vs planted " +
                     std::to_string(planted.extreme.beta));
    }
    c.expect(!rep.no_detectable_effect, "true effect flagged as noise");

    // A/A: both variants sampled from the same planted control distribution
    const SourceDistributions aa({"A", "B"}, {inst.src.dist(0), inst.src.dist(0)});
    const auto aa_recs = synth::sample_observations(aa, 100000, 7);
    const auto aa_emp = ingest::empirical_distributions(aa_recs, bc);
    const auto aa_ds = serialize::dataset_from_empirical(aa_emp);
    const auto aa_res = solver::solve_extreme(aa_ds.src);
    const auto aa_rep = serialize::build_report(aa_ds, aa_res);
    c.expect(aa_rep.no_detectable_effect, "A/A run not flagged; alpha = " +
                                              std::to_string(aa_rep.alpha.value_or(-1.0)));
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    using Clock = std::chrono::steady_clock;
    const std::vector<std::pair<int, std::function<Check()>>> all = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& [num, fn] : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), num) == wanted.end())
            continue;
        const auto t0 = Clock::now();
        const Check c = fn();
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.ok) {
            std::printf("PASS criterion %d (%.1fs)\n", num, secs);
        } else {
            std::printf("FAIL criterion %d (%.1fs): %s\n", num, secs, c.detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
