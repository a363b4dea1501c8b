#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "core.hpp"

namespace exeff::synth {

using linalg::Mat;
using linalg::Rng;

namespace {

std::vector<std::string> letter_variants(std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) {
        std::string name(1, static_cast<char>('A' + i % 26));
        if (i >= 26) name += std::to_string(i / 26);
        out.push_back(std::move(name));
    }
    return out;
}

std::vector<double> peaked_vector(Rng& rng, std::size_t n, double concentration) {
    std::vector<double> v(n);
    double best = -1e300;
    for (double& x : v) {
        x = concentration * rng.normal();
        best = std::max(best, x);
    }
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - best);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
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

Mat random_permutation_mat(Rng& rng, std::size_t k) {
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = i;
    for (std::size_t i = k; i-- > 1;) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    Mat m(k, k);
    for (std::size_t i = 0; i < k; ++i) m(i, perm[i]) = 1.0;
    return m;
}

}  // namespace

SourceDistributions compose(const MixtureMatrix& p, const std::vector<Distribution>& basis,
                            std::vector<std::string> variants) {
    const std::size_t k = p.k();
    if (basis.size() != k) fail(Errc::length_mismatch, "basis size does not match matrix");
    if (variants.empty()) variants = letter_variants(k);
    const auto support = basis.front().support();
    std::vector<Distribution> dists;
    dists.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> row(support->size(), 0.0);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t x = 0; x < row.size(); ++x) row[x] += p(i, j) * basis[j][x];
        dists.emplace_back(support, std::move(row));
    }
    return SourceDistributions(std::move(variants), std::move(dists));
}

PlantedInstance plant(const PlantSpec& spec) {
    if (spec.k < 2 || spec.n < spec.k)
        fail(Errc::invalid_argument, "need N >= K >= 2");
    if (!(spec.min_det > 0.0) || spec.min_det > 1.0)
        fail(Errc::invalid_argument, "min_det must be in (0, 1]");
    if (!(spec.basis_concentration > 0.0))
        fail(Errc::invalid_argument, "basis_concentration must be positive");

    Rng rng(Rng::derive(spec.seed, 0x706c616eULL));
    const auto support = indexed_support(spec.n);
    constexpr double kMinPairwiseTv = 0.2;

    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::vector<double>> rows;
        rows.reserve(spec.k);
        bool distinct = true;
        for (std::size_t j = 0; j < spec.k; ++j) {
            auto v = peaked_vector(rng, spec.n, spec.basis_concentration);
            for (const auto& prev : rows)
                if (total_variation(prev, v) < kMinPairwiseTv) distinct = false;
            rows.push_back(std::move(v));
            if (!distinct) break;
        }
        if (!distinct) continue;

        const double mix = rng.uniform();
        const Mat anchor = random_permutation_mat(rng, spec.k);
        const Mat noise = random_stochastic(rng, spec.k);
        Mat p(spec.k, spec.k);
        for (std::size_t i = 0; i < p.a.size(); ++i)
            p.a[i] = (1.0 - mix) * anchor.a[i] + mix * noise.a[i];
        if (std::abs(linalg::det(p)) < spec.min_det) continue;

        std::vector<Distribution> basis;
        basis.reserve(spec.k);
        for (auto& row : rows) basis.emplace_back(support, std::move(row));
        MixtureMatrix matrix(std::move(p));
        auto src = compose(matrix, basis);
        if (!core::linear_independence_report(src).independent) continue;
        return PlantedInstance{std::move(matrix), std::move(basis), std::move(src)};
    }
    fail(Errc::rejection_exhausted, "1000 draws failed min_det / distinctness constraints");
}

std::vector<ingest::ObservationRecord> sample_observations(const SourceDistributions& src,
                                                           std::size_t n_per_variant,
                                                           std::uint64_t seed) {
    if (n_per_variant < 1) fail(Errc::invalid_argument, "n_per_variant must be >= 1");
    Rng rng(Rng::derive(seed, 0x73616d70ULL));
    std::vector<ingest::ObservationRecord> records;
    records.reserve(src.k() * n_per_variant);
    std::size_t unit = 0;
    for (std::size_t i = 0; i < src.k(); ++i) {
        std::vector<double> cdf(src.support_size());
        double acc = 0.0;
        for (std::size_t x = 0; x < cdf.size(); ++x) {
            acc += src.dist(i)[x];
            cdf[x] = acc;
        }
        cdf.back() = 1.0;
        for (std::size_t r = 0; r < n_per_variant; ++r) {
            const double u = rng.uniform();
            const std::size_t bin = static_cast<std::size_t>(
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            records.push_back({"u" + std::to_string(++unit), src.variants()[i],
                               static_cast<double>(std::min(bin, cdf.size() - 1))});
        }
    }
    return records;
}

void write_observations_csv(const std::vector<ingest::ObservationRecord>& records,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
    out << "unit_id,variant,value\n";
    for (const auto& rec : records) {
        out << rec.unit_id << ',' << rec.variant << ',' << rec.value << '\n';
    }
    if (!out) fail(Errc::io_error, "write failed for '" + path + "'");
}

}  // namespace exeff::synth
