#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace exeff::linalg {

Mat matmul(const Mat& lhs, const Mat& rhs) {
    Mat out(lhs.rows, rhs.cols);
    for (std::size_t i = 0; i < lhs.rows; ++i) {
        for (std::size_t k = 0; k < lhs.cols; ++k) {
            const double v = lhs(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols; ++j) out(i, j) += v * rhs(k, j);
        }
    }
    return out;
}

Lu lu_factor(const Mat& square) {
    const std::size_t n = square.rows;
    Lu fac;
    fac.lu = square;
    fac.perm.resize(n);
    std::iota(fac.perm.begin(), fac.perm.end(), std::size_t{0});

    double sign = 1.0;
    Mat& m = fac.lu;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double cand = std::abs(m(r, col));
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (best == 0.0) {
            fac.singular = true;
            fac.det = 0.0;
            return fac;
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(pivot, j));
            std::swap(fac.perm[col], fac.perm[pivot]);
            sign = -sign;
        }
        const double inv_pivot = 1.0 / m(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = m(r, col) * inv_pivot;
            m(r, col) = factor;
            if (factor == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) m(r, j) -= factor * m(col, j);
        }
    }
    double d = sign;
    for (std::size_t i = 0; i < n; ++i) d *= m(i, i);
    fac.det = d;
    return fac;
}

double det(const Mat& square) { return lu_factor(square).det; }

Mat lu_solve(const Lu& fac, const Mat& rhs) {
    const std::size_t n = fac.lu.rows;
    Mat x(n, rhs.cols);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < rhs.cols; ++j) x(i, j) = rhs(fac.perm[i], j);

    // forward, unit lower triangle
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) {
            const double f = fac.lu(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols; ++j) x(i, j) -= f * x(k, j);
        }
    // backward
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) {
            const double f = fac.lu(ii, k);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols; ++j) x(ii, j) -= f * x(k, j);
        }
        const double inv = 1.0 / fac.lu(ii, ii);
        for (std::size_t j = 0; j < rhs.cols; ++j) x(ii, j) *= inv;
    }
    return x;
}

Mat inverse(const Lu& fac) { return lu_solve(fac, Mat::identity(fac.lu.rows)); }

std::vector<double> singular_values(const Mat& m) {
    // Work on a copy; rotate row pairs until all pairs are orthogonal.
    Mat w = m;
    const std::size_t k = w.rows, n = w.cols;
    const double eps = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    app += w(p, j) * w(p, j);
                    aqq += w(q, j) * w(q, j);
                    apq += w(p, j) * w(q, j);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t j = 0; j < n; ++j) {
                    const double vp = w(p, j), vq = w(q, j);
                    w(p, j) = c * vp - s * vq;
                    w(q, j) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sv(k);
    for (std::size_t i = 0; i < k; ++i) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) norm2 += w(i, j) * w(i, j);
        sv[i] = std::sqrt(norm2);
    }
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

void project_to_simplex(std::vector<double>& v) {
    // Held-Wolfe-Crowder projection: shift by a common offset, clip at zero.
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumsum += u[i];
        const double cand = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - cand > 0.0) {
            theta = cand;
            support = i + 1;
        }
    }
    (void)support;
    for (double& x : v) x = std::max(0.0, x - theta);
    // Remove the residual drift so rows stay stochastic to machine precision.
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    if (s > 0.0)
        for (double& x : v) x /= s;
}

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::size_t Rng::uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t stream) {
    Rng mixer(seed ^ (0xa0761d6478bd642fULL * (stream + 1)));
    mixer.next_u64();
    return mixer.next_u64();
}

}  // namespace exeff::linalg
