#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Small dense kernels for K x K mixture matrices and K x N distribution
// stacks. K stays tiny (2..8), so plain row-major storage with partial
// pivoting is both fast enough and easy to audit.

namespace exeff::linalg {

struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Mat matmul(const Mat& lhs, const Mat& rhs);

// LU factorization with partial pivoting. `singular` is set when a pivot
// column collapses to zero; det is still the (possibly zero) product.
struct Lu {
    Mat lu;
    std::vector<std::size_t> perm;
    double det = 0.0;
    bool singular = false;
};

Lu lu_factor(const Mat& square);

// Determinant via lu_factor.
double det(const Mat& square);

// Solves A * X = B for X (B has any number of columns). A must be square
// and nonsingular per lu_factor.
Mat lu_solve(const Lu& fac, const Mat& rhs);

Mat inverse(const Lu& fac);

// Singular values of a rows x cols matrix (rows <= cols), descending.
// One-sided Jacobi on the rows: accurate for small singular values, which
// matters because rank tests threshold at 1e-8 relative.
std::vector<double> singular_values(const Mat& m);

// Euclidean projection of an arbitrary vector onto the probability simplex.
void project_to_simplex(std::vector<double>& v);

// Deterministic 64-bit generator (splitmix64). The standard distributions
// are implementation-defined, so sampling helpers are spelled out here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform();                   // [0, 1)
    double normal();                    // standard Gaussian (Box-Muller)
    std::size_t uniform_index(std::size_t n);  // {0, .., n-1}

    // Derives an independent stream, e.g. per solver start.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace exeff::linalg
