#include "types.hpp"

#include <cmath>
#include <numeric>
#include <unordered_set>

namespace exeff {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::negative_mass: return "NegativeMass";
        case Errc::bad_total: return "BadTotal";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::singular_matrix: return "SingularMatrix";
        case Errc::bad_permutation: return "BadPermutation";
        case Errc::identical_distributions: return "IdenticalDistributions";
        case Errc::degenerate_bounds: return "DegenerateBounds";
        case Errc::empty_support: return "EmptySupport";
        case Errc::size_overflow: return "SizeOverflow";
        case Errc::no_feasible_point: return "NoFeasiblePoint";
        case Errc::rejection_exhausted: return "RejectionExhausted";
        case Errc::parse_error: return "ParseError";
        case Errc::unknown_header: return "UnknownHeader";
        case Errc::empty_dataset: return "EmptyDataset";
        case Errc::empty_variant: return "EmptyVariant";
        case Errc::degenerate_bins: return "DegenerateBins";
        case Errc::duplicate_assignment: return "DuplicateAssignment";
        case Errc::support_mismatch: return "SupportMismatch";
        case Errc::schema_error: return "SchemaError";
        case Errc::io_error: return "IoError";
        case Errc::internal: return "Internal";
    }
    return "Unknown";
}

void fail(Errc code, const std::string& message) {
    throw Error(code, std::string(errc_name(code)) + ": " + message);
}

Support::Support(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) fail(Errc::empty_support, "support needs at least 2 outcome labels");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_)
        if (!seen.insert(l).second) fail(Errc::invalid_argument, "duplicate support label '" + l + "'");
}

SupportPtr make_support(std::vector<std::string> labels) {
    return std::make_shared<const Support>(std::move(labels));
}

SupportPtr indexed_support(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i + 1));
    return make_support(std::move(labels));
}

Distribution::Distribution(SupportPtr support, std::vector<double> probs, ValidationNote* note)
    : support_(std::move(support)), probs_(std::move(probs)) {
    if (!support_) fail(Errc::invalid_argument, "distribution without a support");
    if (probs_.size() != support_->size())
        fail(Errc::length_mismatch, "expected " + std::to_string(support_->size()) + " probabilities, got " +
                                        std::to_string(probs_.size()));
    for (double& p : probs_) {
        if (!std::isfinite(p)) fail(Errc::invalid_argument, "non-finite probability");
        if (p < -tol::entry_negative) fail(Errc::negative_mass, "probability " + std::to_string(p) + " < 0");
        if (p < 0.0) p = 0.0;
    }
    const double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
    const double drift = std::abs(sum - 1.0);
    if (drift > tol::prob_drift)
        fail(Errc::bad_total, "probabilities sum to " + std::to_string(sum) + ", not 1");
    if (drift > 0.0) {
        for (double& p : probs_) p /= sum;
        if (note && drift > tol::prob_sum) {
            note->renormalized = true;
            note->drift = drift;
        }
    }
}

double Distribution::mean_index() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) m += static_cast<double>(i) * probs_[i];
    return m;
}

Distribution validate_distribution(const std::vector<double>& raw, const SupportPtr& support,
                                   ValidationNote* note) {
    return Distribution(support, raw, note);
}

SourceDistributions::SourceDistributions(std::vector<std::string> variants, std::vector<Distribution> dists)
    : variants_(std::move(variants)), dists_(std::move(dists)) {
    if (dists_.size() < 2) fail(Errc::empty_variant, "need at least 2 variants");
    if (variants_.size() != dists_.size())
        fail(Errc::length_mismatch, "variant label count does not match distribution count");
    std::unordered_set<std::string> seen;
    for (const auto& v : variants_)
        if (!seen.insert(v).second) fail(Errc::invalid_argument, "duplicate variant label '" + v + "'");
    support_ = dists_.front().support();
    for (const auto& d : dists_)
        if (!(*d.support() == *support_)) fail(Errc::support_mismatch, "variants use different supports");
}

linalg::Mat SourceDistributions::stacked() const {
    linalg::Mat m(k(), support_size());
    for (std::size_t i = 0; i < k(); ++i)
        for (std::size_t j = 0; j < support_size(); ++j) m(i, j) = dists_[i][j];
    return m;
}

MixtureMatrix::MixtureMatrix(linalg::Mat entries) : entries_(std::move(entries)) {
    if (entries_.rows != entries_.cols || entries_.rows < 2)
        fail(Errc::invalid_argument, "mixture matrix must be square, K >= 2");
    for (std::size_t i = 0; i < entries_.rows; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < entries_.cols; ++j) {
            double& e = entries_(i, j);
            if (!std::isfinite(e)) fail(Errc::invalid_argument, "non-finite mixture entry");
            if (e < -tol::entry_negative)
                fail(Errc::invalid_argument, "negative mixture entry " + std::to_string(e));
            if (e < 0.0) e = 0.0;
            row_sum += e;
        }
        if (std::abs(row_sum - 1.0) > tol::prob_sum)
            fail(Errc::invalid_argument, "mixture row " + std::to_string(i) + " sums to " +
                                             std::to_string(row_sum) + ", not 1");
    }
}

double MixtureMatrix::det_abs() const { return std::abs(linalg::det(entries_)); }

MixtureMatrix MixtureMatrix::identity(std::size_t k) { return MixtureMatrix(linalg::Mat::identity(k)); }

MixtureMatrix MixtureMatrix::permutation(const std::vector<std::size_t>& perm) {
    const std::size_t k = perm.size();
    linalg::Mat m(k, k);
    std::vector<bool> hit(k, false);
    for (std::size_t i = 0; i < k; ++i) {
        if (perm[i] >= k || hit[perm[i]]) fail(Errc::bad_permutation, "not a permutation");
        hit[perm[i]] = true;
        m(i, perm[i]) = 1.0;
    }
    return MixtureMatrix(std::move(m));
}

}  // namespace exeff
