#include <doctest.h>

#include <numeric>

#include "linalg.hpp"
#include "test_helpers.hpp"

using namespace exeff::linalg;

TEST_CASE("lu determinant matches closed forms") {
    Mat m(2, 2);
    m(0, 0) = 0.5;
    m(0, 1) = 0.5;
    m(1, 0) = 0.75;
    m(1, 1) = 0.25;
    CHECK(det(m) == doctest::Approx(-0.25).epsilon(1e-14));

    CHECK(det(Mat::identity(4)) == doctest::Approx(1.0));

    Mat t(3, 3);
    t(0, 0) = 2;  t(0, 1) = 1; t(0, 2) = 0;
    t(1, 0) = 1;  t(1, 1) = 3; t(1, 2) = 1;
    t(2, 0) = 0;  t(2, 1) = 1; t(2, 2) = 2;
    // cofactor expansion by hand: 2*(6-1) - 1*(2-0) + 0 = 8
    CHECK(det(t) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("lu solve and inverse round-trip") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + trial % 3;
        auto m = testutil::random_nondegenerate_stochastic(rng, k, 0.05);
        const auto fac = lu_factor(m);
        REQUIRE_FALSE(fac.singular);
        const auto inv = inverse(fac);
        const auto prod = matmul(m, inv);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    }
}

TEST_CASE("lu flags singular input") {
    Mat m(2, 2);
    m(0, 0) = 0.5;
    m(0, 1) = 0.5;
    m(1, 0) = 0.5;
    m(1, 1) = 0.5;
    const auto fac = lu_factor(m);
    CHECK(fac.det == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("singular values of stacked rows") {
    // rank-1 pair: identical rows
    Mat m(2, 2);
    m(0, 0) = 0.5;  m(0, 1) = 0.5;
    m(1, 0) = 0.5;  m(1, 1) = 0.5;
    auto sv = singular_values(m);
    CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sv[1] == doctest::Approx(0.0).epsilon(1e-12));

    // orthogonal rows keep both values at 1
    Mat e(2, 2);
    e(0, 0) = 1.0;
    e(1, 1) = 1.0;
    sv = singular_values(e);
    CHECK(sv[0] == doctest::Approx(1.0));
    CHECK(sv[1] == doctest::Approx(1.0));
}

TEST_CASE("simplex projection") {
    SUBCASE("already on the simplex is untouched") {
        std::vector<double> v{0.2, 0.3, 0.5};
        project_to_simplex(v);
        CHECK(testutil::max_abs_diff(v, {0.2, 0.3, 0.5}) < 1e-12);
    }
    SUBCASE("negative coordinates clip to zero") {
        std::vector<double> v{1.2, -0.1, -0.1};
        project_to_simplex(v);
        CHECK(v[0] == doctest::Approx(1.0));
        CHECK(v[1] == doctest::Approx(0.0));
        CHECK(v[2] == doctest::Approx(0.0));
    }
    SUBCASE("random vectors land on the simplex") {
        Rng rng(3);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(4);
            for (double& x : v) x = 2.0 * rng.normal();
            project_to_simplex(v);
            double sum = std::accumulate(v.begin(), v.end(), 0.0);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            for (double x : v) CHECK(x >= 0.0);
        }
    }
}

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(Rng::derive(42, 0) != Rng::derive(42, 1));

    Rng c(Rng::derive(42, 0));
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) mean += c.uniform();
    CHECK(mean / 10000.0 == doctest::Approx(0.5).epsilon(0.02));
}
