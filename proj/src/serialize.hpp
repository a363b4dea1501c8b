#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ingest.hpp"
#include "solver.hpp"
#include "types.hpp"

namespace exeff::serialize {

struct BinningEcho {
    std::string transform;
    std::string strategy;
    std::string reference;
    int n_bins_requested = 0;
    bool drop_empty_shared_bins = true;
    std::vector<double> edges;  // transformed scale
};

// The aggregate the CLI and C API pass around: sources plus, when the data
// came from raw observations, per-variant means/counts and the effective
// binning.
struct Dataset {
    SourceDistributions src;
    std::vector<double> means;
    std::vector<std::size_t> counts;
    std::optional<BinningEcho> binning;

    bool has_means() const { return !means.empty(); }
};

Dataset dataset_from_empirical(const ingest::EmpiricalResult& er);

nlohmann::json dataset_to_json(const Dataset& ds);
// Schema violations fail with a JSON-pointer-style path in the message.
Dataset parse_dataset(const std::string& text);

nlohmann::json result_to_json(const solver::SolverResult& res,
                              const solver::VerifyReport* diagnostics = nullptr,
                              const char* method = nullptr);

// Reads a decomposition back against a known source set (used by the
// plotdata command). Shape mismatches fail with SupportMismatch.
solver::SolverResult parse_result(const std::string& text, const SourceDistributions& src);

// Tidy bin,series,probability table covering the sources and the basis.
std::string plotdata_csv(const Dataset& ds, const solver::SolverResult& res);

// Default no-effect cutoff for two-variant reports: measured ceiling of
// the closed-form alpha on A/A splits (20 seeds, 1e5 units per variant)
// with ~2x headroom.
inline constexpr double kDefaultMinAlpha = 0.02;

struct ABReport {
    std::vector<std::string> variants;
    std::vector<double> means;
    std::vector<std::size_t> counts;
    // populated when K == 2 and means are available
    std::optional<double> mu_control;
    std::optional<double> mu_treatment;
    std::optional<double> delta;
    std::optional<double> rel_delta;
    // populated when the binary branch ran
    std::optional<double> alpha;
    std::optional<double> beta;
    bool mirrored = false;
    bool no_detectable_effect = false;
};

ABReport build_report(const Dataset& ds, const solver::SolverResult& res,
                      double min_alpha = kDefaultMinAlpha);
nlohmann::json report_to_json(const ABReport& rep, const solver::SolverResult& res,
                              const solver::VerifyReport* diagnostics = nullptr);

}  // namespace exeff::serialize
