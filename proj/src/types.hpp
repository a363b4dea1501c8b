#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace exeff {

enum class Errc {
    invalid_argument,
    negative_mass,
    bad_total,
    length_mismatch,
    singular_matrix,
    bad_permutation,
    identical_distributions,
    degenerate_bounds,
    empty_support,
    size_overflow,
    no_feasible_point,
    rejection_exhausted,
    parse_error,
    unknown_header,
    empty_dataset,
    empty_variant,
    degenerate_bins,
    duplicate_assignment,
    support_mismatch,
    schema_error,
    io_error,
    internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

// Shared tolerances. Values are part of the library contract and are fixed
// here rather than threaded through every call.
namespace tol {
inline constexpr double prob_sum = 1e-12;        // stored distributions sum to 1 this tightly
inline constexpr double prob_drift = 1e-9;       // inputs off by no more than this are renormalized
inline constexpr double entry_negative = 1e-12;  // how far below zero an entry may sit
inline constexpr double det_singular = 1e-12;    // |det| at or below this counts as singular
inline constexpr double feasibility = 1e-9;      // default basis non-negativity slack
inline constexpr double rank_rel = 1e-8;         // relative singular-value cutoff for rank
inline constexpr double reconstruction = 1e-8;   // max-norm residual allowed for solver output
}  // namespace tol

// Ordered outcome labels shared by every distribution of one problem
// instance. Immutable; passed around via shared_ptr.
class Support {
  public:
    explicit Support(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_[i]; }

    bool operator==(const Support& other) const { return labels_ == other.labels_; }

  private:
    std::vector<std::string> labels_;
};

using SupportPtr = std::shared_ptr<const Support>;

SupportPtr make_support(std::vector<std::string> labels);

// Convenience: labels "x1".."xN".
SupportPtr indexed_support(std::size_t n);

struct ValidationNote {
    bool renormalized = false;
    double drift = 0.0;  // observed |sum - 1| before renormalization
};

// A probability vector over a Support. Always normalized on construction.
class Distribution {
  public:
    Distribution(SupportPtr support, std::vector<double> probs, ValidationNote* note = nullptr);

    const SupportPtr& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::size_t size() const { return probs_.size(); }

    // Mean 0-based support index; the canonical ordering key.
    double mean_index() const;

  private:
    SupportPtr support_;
    std::vector<double> probs_;
};

Distribution validate_distribution(const std::vector<double>& raw, const SupportPtr& support,
                                   ValidationNote* note = nullptr);

// The K observed per-variant distributions over one shared support.
class SourceDistributions {
  public:
    SourceDistributions(std::vector<std::string> variants, std::vector<Distribution> dists);

    std::size_t k() const { return dists_.size(); }
    std::size_t support_size() const { return support_->size(); }
    const SupportPtr& support() const { return support_; }
    const std::vector<std::string>& variants() const { return variants_; }
    const std::vector<Distribution>& dists() const { return dists_; }
    const Distribution& dist(std::size_t i) const { return dists_[i]; }

    // K x N matrix with row i = probabilities of variant i.
    linalg::Mat stacked() const;

  private:
    std::vector<std::string> variants_;
    std::vector<Distribution> dists_;
    SupportPtr support_;
};

// Row-stochastic K x K matrix; entry (i, j) = P(Y = j | V = i).
class MixtureMatrix {
  public:
    MixtureMatrix() = default;  // empty placeholder, assign before use
    explicit MixtureMatrix(linalg::Mat entries);

    std::size_t k() const { return entries_.rows; }
    const linalg::Mat& entries() const { return entries_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    double det_abs() const;

    static MixtureMatrix identity(std::size_t k);
    static MixtureMatrix permutation(const std::vector<std::size_t>& perm);

  private:
    linalg::Mat entries_;
};

// A (P, f) pair with diagnostics, the solution object shared by all solvers.
struct Decomposition {
    MixtureMatrix matrix;
    std::vector<Distribution> basis;
    double det_abs = 0.0;
    double residual = 0.0;           // max-norm of P*f - d
    double feasibility_slack = 0.0;  // most negative basis component before clamping
};

}  // namespace exeff
