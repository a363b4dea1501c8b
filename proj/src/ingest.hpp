#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "types.hpp"

namespace exeff::ingest {

// One experimental unit: a non-negative key-metric value observed under
// one variant.
struct ObservationRecord {
    std::string unit_id;
    std::string variant;
    double value = 0.0;
};

enum class Transform { none, log1p };
enum class BinStrategy { fixed_width, quantile };
enum class QuantileReference { pooled, control };

struct BinningConfig {
    Transform transform = Transform::log1p;
    int n_bins = 64;
    BinStrategy strategy = BinStrategy::quantile;
    QuantileReference reference = QuantileReference::pooled;
    bool drop_empty_shared_bins = true;
};

// CSV with header `unit_id,variant,value`. Parse failures carry the
// offending line number.
std::vector<ObservationRecord> load_csv(const std::string& path);
std::vector<ObservationRecord> parse_csv(std::istream& in, const std::string& origin = "<stream>");

struct EmpiricalResult {
    SourceDistributions src;
    std::vector<double> means;         // per variant, untransformed scale
    std::vector<std::size_t> counts;   // per variant
    std::vector<double> edges;         // shared bin edges, transformed scale
    BinningConfig effective;
};

// Bins the records into per-variant histograms over one shared support.
// Variants appear in first-encounter order; the first is the control.
EmpiricalResult empirical_distributions(const std::vector<ObservationRecord>& records,
                                        const BinningConfig& cfg);

const char* transform_name(Transform t);
const char* strategy_name(BinStrategy s);
const char* reference_name(QuantileReference r);
Transform transform_from_name(const std::string& name);
BinStrategy strategy_from_name(const std::string& name);
QuantileReference reference_from_name(const std::string& name);

}  // namespace exeff::ingest
