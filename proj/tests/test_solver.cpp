#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "solver.hpp"
#include "synth.hpp"
#include "test_helpers.hpp"

using namespace exeff;
using testutil::max_abs_diff;

namespace {

SourceDistributions fixture_k2n3() {
    const auto s = indexed_support(3);
    return SourceDistributions({"A", "B"},
                               {Distribution(s, {0.2, 0.3, 0.5}), Distribution(s, {0.3, 0.3, 0.4})});
}

}  // namespace

TEST_CASE("objective") {
    CHECK(solver::objective(MixtureMatrix::identity(3)) == doctest::Approx(1.0));
    linalg::Mat m(2, 2);
    m(0, 0) = 0.5;  m(0, 1) = 0.5;
    m(1, 0) = 0.75; m(1, 1) = 0.25;
    CHECK(solver::objective(MixtureMatrix(m)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(solver::objective(MixtureMatrix::permutation({2, 0, 1})) == doctest::Approx(1.0));
}

TEST_CASE("solve_extreme dispatch") {
    SUBCASE("binary branch on K=2") {
        const auto res = solver::solve_extreme(fixture_k2n3());
        CHECK(res.branch_note == "binary");
        CHECK(res.objective == doctest::Approx(1.0 / 7).epsilon(1e-12));
        CHECK(res.decomposition.matrix(0, 0) == doctest::Approx(2.0 / 7).epsilon(1e-12));
        REQUIRE(res.binary_info.has_value());
        CHECK(res.binary_info->extreme.beta == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("square-support branch on N=K") {
        linalg::Rng rng(3);
        const auto d = testutil::random_nondegenerate_stochastic(rng, 3, 0.1);
        const auto src = testutil::sources_from_rows(d);
        const auto res = solver::solve_extreme(src);
        CHECK(res.branch_note == "square-support");
        CHECK(res.objective == doctest::Approx(std::abs(linalg::det(d))).epsilon(1e-12));
        CHECK(res.decomposition.residual == 0.0);
    }
    SUBCASE("dependent sources give the flagged trivial result") {
        const auto s = indexed_support(4);
        const Distribution a(s, {0.7, 0.1, 0.1, 0.1});
        const Distribution b(s, {0.1, 0.1, 0.1, 0.7});
        std::vector<double> mid(4);
        for (std::size_t i = 0; i < 4; ++i) mid[i] = 0.5 * (a[i] + b[i]);
        SourceDistributions src({"A", "B", "C"}, {a, b, Distribution(s, mid)});
        const auto res = solver::solve_extreme(src);
        CHECK(res.degenerate);
        CHECK(res.branch_note == "degenerate");
        CHECK(res.objective == doctest::Approx(1.0));
        CHECK(res.decomposition.residual == 0.0);
    }
    SUBCASE("invalid config is rejected") {
        solver::SolverConfig cfg;
        cfg.starts = 0;
        CHECK_THROWS_AS(solver::solve_extreme(fixture_k2n3(), cfg), Error);
    }
}

TEST_CASE("square_support_shortcut") {
    SUBCASE("2x2 fixture equals the stacked sources") {
        linalg::Mat d(2, 2);
        d(0, 0) = 0.5;  d(0, 1) = 0.5;
        d(1, 0) = 0.25; d(1, 1) = 0.75;
        const auto res = solver::square_support_shortcut(testutil::sources_from_rows(d));
        CHECK(res.objective == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(max_abs_diff(res.decomposition.matrix.entries().a, d.a) <= 1e-15);
        CHECK(res.decomposition.basis[0][0] == doctest::Approx(1.0));
        CHECK(res.decomposition.basis[1][1] == doctest::Approx(1.0));
    }
    SUBCASE("identity sources") {
        const auto res = solver::square_support_shortcut(
            testutil::sources_from_rows(linalg::Mat::identity(2)));
        CHECK(res.objective == doctest::Approx(1.0));
    }
    SUBCASE("binary closed form agrees after canonicalization") {
        linalg::Mat d(2, 2);
        d(0, 0) = 0.5;  d(0, 1) = 0.5;
        d(1, 0) = 0.25; d(1, 1) = 0.75;
        const auto src = testutil::sources_from_rows(d);
        const auto square = solver::square_support_shortcut(src);
        const auto bin = binary::solve_binary(src);
        CHECK(max_abs_diff(square.decomposition.matrix.entries().a,
                           bin.decomposition.matrix.entries().a) <= 1e-12);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(max_abs_diff(square.decomposition.basis[j].probs(),
                               bin.decomposition.basis[j].probs()) <= 1e-12);
    }
    SUBCASE("exact residual for random K=3 sources") {
        linalg::Rng rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            const auto d = testutil::random_nondegenerate_stochastic(rng, 3, 0.05);
            const auto res = solver::square_support_shortcut(testutil::sources_from_rows(d));
            CHECK(res.decomposition.residual == 0.0);
        }
    }
}

TEST_CASE("general path matches the binary closed form") {
    solver::SolverConfig cfg;
    cfg.force_general = true;
    cfg.starts = 12;
    cfg.seed = 99;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto src = testutil::random_pair(seed * 31 + 7, 3 + seed % 14);
        const auto closed = binary::solve_binary(src);
        const auto general = solver::solve_extreme(src, cfg);
        CHECK(general.branch_note == "general");
        CHECK(std::abs(general.objective - closed.decomposition.det_abs) <= 1e-4);
    }
}

TEST_CASE("general path is monotone and deterministic") {
    solver::SolverConfig cfg;
    cfg.force_general = true;
    cfg.starts = 4;
    cfg.seed = 7;
    cfg.record_trace = true;
    const auto src = testutil::random_pair(12345, 6);
    const auto a = solver::solve_extreme(src, cfg);
    const auto b = solver::solve_extreme(src, cfg);
    CHECK(a.objective == b.objective);
    CHECK(max_abs_diff(a.decomposition.matrix.entries().a, b.decomposition.matrix.entries().a) == 0.0);
    CHECK(a.best_start_index == b.best_start_index);
    REQUIRE(a.traces.size() == 4);
    for (const auto& trace : a.traces) {
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
    }
    CHECK(a.objective <= 1.0 + 1e-10);
    CHECK(a.objective > 0.0);
}

TEST_CASE("permutation equivariance on the analytic paths") {
    // swapping the variants mirrors the matrix rows but keeps the basis
    const auto src = fixture_k2n3();
    const auto s = src.support();
    SourceDistributions swapped({"B", "A"}, {src.dist(1), src.dist(0)});
    const auto res_a = solver::solve_extreme(src);
    const auto res_b = solver::solve_extreme(swapped);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(max_abs_diff(res_a.decomposition.basis[j].probs(),
                           res_b.decomposition.basis[j].probs()) <= 1e-6);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(res_a.decomposition.matrix(0, j) - res_b.decomposition.matrix(1, j)) <= 1e-9);
        CHECK(std::abs(res_a.decomposition.matrix(1, j) - res_b.decomposition.matrix(0, j)) <= 1e-9);
    }
    CHECK(std::abs(res_a.objective - res_b.objective) <= 1e-12);
}

TEST_CASE("planted instances bound the solver objective") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        synth::PlantSpec spec;
        spec.k = 2 + seed % 2;
        spec.n = spec.k + 2 + seed % 6;
        spec.seed = seed;
        const auto planted = synth::plant(spec);
        solver::SolverConfig cfg;
        cfg.seed = seed;
        const auto res = solver::solve_extreme(planted.src, cfg);
        CHECK(res.objective <= planted.matrix.det_abs() + 1e-6);
        CHECK(res.decomposition.residual <= 1e-8);
    }
}

TEST_CASE("verify_solution") {
    const auto src = fixture_k2n3();
    SUBCASE("solver output passes every check") {
        const auto res = solver::solve_extreme(src);
        const auto rep = solver::verify_solution(res, src);
        CHECK(rep.all_ok());
    }
    SUBCASE("trivial decomposition passes with zero residual") {
        solver::SolverResult res;
        res.decomposition = core::trivial_decomposition(src);
        res.objective = 1.0;
        const auto rep = solver::verify_solution(res, src);
        CHECK(rep.all_ok());
    }
    SUBCASE("corrupted basis entry fails the non-negativity check") {
        const auto res = solver::solve_extreme(src);
        linalg::Mat basis(2, 3);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t x = 0; x < 3; ++x) basis(j, x) = res.decomposition.basis[j][x];
        basis(0, 2) = -0.01;
        const auto rep = solver::verify_solution(res.decomposition.matrix.entries(), basis, src,
                                                 res.decomposition.det_abs);
        CHECK_FALSE(rep.basis_nonnegative);
        CHECK_FALSE(rep.all_ok());
    }
}
