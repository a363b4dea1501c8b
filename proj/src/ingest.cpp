#include "ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace exeff::ingest {

namespace {

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

double parse_value(const std::string& field, std::size_t line_no, const std::string& origin) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &consumed);
    } catch (const std::exception&) {
        fail(Errc::parse_error, origin + ":" + std::to_string(line_no) + ": bad value '" + field + "'");
    }
    if (consumed != field.size())
        fail(Errc::parse_error,
             origin + ":" + std::to_string(line_no) + ": trailing junk in value '" + field + "'");
    if (!std::isfinite(v) || v < 0.0)
        fail(Errc::parse_error, origin + ":" + std::to_string(line_no) +
                                    ": value must be a finite non-negative number, got '" + field + "'");
    return v;
}

}  // namespace

std::vector<ObservationRecord> parse_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) fail(Errc::empty_dataset, origin + ": empty file");
    if (strip_cr(line) != "unit_id,variant,value")
        fail(Errc::unknown_header, origin + ": expected header 'unit_id,variant,value', got '" +
                                       strip_cr(line) + "'");
    std::vector<ObservationRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = (c1 == std::string::npos) ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos)
            fail(Errc::parse_error,
                 origin + ":" + std::to_string(line_no) + ": expected 3 comma-separated fields");
        ObservationRecord rec;
        rec.unit_id = line.substr(0, c1);
        rec.variant = line.substr(c1 + 1, c2 - c1 - 1);
        if (rec.unit_id.empty() || rec.variant.empty())
            fail(Errc::parse_error,
                 origin + ":" + std::to_string(line_no) + ": empty unit_id or variant");
        rec.value = parse_value(line.substr(c2 + 1), line_no, origin);
        records.push_back(std::move(rec));
    }
    if (records.empty()) fail(Errc::empty_dataset, origin + ": no data rows");
    return records;
}

std::vector<ObservationRecord> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
    return parse_csv(in, path);
}

const char* transform_name(Transform t) { return t == Transform::none ? "none" : "log1p"; }
const char* strategy_name(BinStrategy s) {
    return s == BinStrategy::fixed_width ? "fixed_width" : "quantile";
}
const char* reference_name(QuantileReference r) {
    return r == QuantileReference::pooled ? "pooled" : "control";
}

Transform transform_from_name(const std::string& name) {
    if (name == "none") return Transform::none;
    if (name == "log1p") return Transform::log1p;
    fail(Errc::invalid_argument, "unknown transform '" + name + "'");
}

BinStrategy strategy_from_name(const std::string& name) {
    if (name == "fixed_width") return BinStrategy::fixed_width;
    if (name == "quantile") return BinStrategy::quantile;
    fail(Errc::invalid_argument, "unknown binning strategy '" + name + "'");
}

QuantileReference reference_from_name(const std::string& name) {
    if (name == "pooled") return QuantileReference::pooled;
    if (name == "control") return QuantileReference::control;
    fail(Errc::invalid_argument, "unknown quantile reference '" + name + "'");
}

namespace {

// type-7 quantile (linear interpolation) of a sorted sample
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[lo + 1];
}

std::string format_edge(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

EmpiricalResult empirical_distributions(const std::vector<ObservationRecord>& records,
                                        const BinningConfig& cfg) {
    if (cfg.n_bins < 2) fail(Errc::invalid_argument, "n_bins must be >= 2");
    if (records.empty()) fail(Errc::empty_dataset, "no records");

    std::vector<std::string> variants;
    std::unordered_map<std::string, std::size_t> variant_index;
    std::unordered_map<std::string, std::size_t> unit_variant;
    std::vector<std::vector<double>> raw;  // per variant
    for (const auto& rec : records) {
        auto [it, inserted] = variant_index.try_emplace(rec.variant, variants.size());
        if (inserted) {
            variants.push_back(rec.variant);
            raw.emplace_back();
        }
        const std::size_t vi = it->second;
        auto [uit, fresh] = unit_variant.try_emplace(rec.unit_id, vi);
        if (!fresh && uit->second != vi)
            fail(Errc::duplicate_assignment,
                 "unit '" + rec.unit_id + "' appears under more than one variant");
        raw[vi].push_back(rec.value);
    }
    if (variants.size() < 2) fail(Errc::empty_variant, "need at least 2 variants in the data");

    const std::size_t k = variants.size();
    std::vector<double> means(k);
    std::vector<std::size_t> counts(k);
    for (std::size_t i = 0; i < k; ++i) {
        counts[i] = raw[i].size();
        double sum = 0.0;
        for (double v : raw[i]) sum += v;
        means[i] = sum / static_cast<double>(counts[i]);
    }

    const bool log_scale = cfg.transform == Transform::log1p;
    std::vector<std::vector<double>> transformed(k);
    for (std::size_t i = 0; i < k; ++i) {
        transformed[i].reserve(raw[i].size());
        for (double v : raw[i]) transformed[i].push_back(log_scale ? std::log1p(v) : v);
    }

    std::vector<double> reference;
    if (cfg.reference == QuantileReference::control) {
        reference = transformed[0];
    } else {
        for (const auto& vs : transformed) reference.insert(reference.end(), vs.begin(), vs.end());
    }
    std::sort(reference.begin(), reference.end());
    const double lo = reference.front();
    const double hi = reference.back();
    if (!(hi > lo)) fail(Errc::degenerate_bins, "all reference values identical");

    std::vector<double> edges;
    edges.push_back(lo);
    if (cfg.strategy == BinStrategy::fixed_width) {
        for (int t = 1; t < cfg.n_bins; ++t)
            edges.push_back(lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(cfg.n_bins));
    } else {
        for (int t = 1; t < cfg.n_bins; ++t)
            edges.push_back(quantile_sorted(reference, static_cast<double>(t) / cfg.n_bins));
    }
    edges.push_back(hi);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.size() < 3) fail(Errc::degenerate_bins, "fewer than 2 distinct bins");

    const std::size_t bins = edges.size() - 1;
    std::vector<std::vector<std::size_t>> hist(k, std::vector<std::size_t>(bins, 0));
    for (std::size_t i = 0; i < k; ++i) {
        for (double v : transformed[i]) {
            // first interior edge strictly above v; values beyond the
            // reference range clamp into the end bins
            const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, v);
            const std::size_t bin = static_cast<std::size_t>(it - (edges.begin() + 1));
            ++hist[i][bin];
        }
    }

    std::vector<bool> keep(bins, true);
    if (cfg.drop_empty_shared_bins) {
        for (std::size_t b = 0; b < bins; ++b) {
            bool any = false;
            for (std::size_t i = 0; i < k; ++i) any = any || hist[i][b] > 0;
            keep[b] = any;
        }
    }

    std::vector<std::string> labels;
    std::vector<std::size_t> kept_bins;
    for (std::size_t b = 0; b < bins; ++b) {
        if (!keep[b]) continue;
        kept_bins.push_back(b);
        const double l = log_scale ? std::expm1(edges[b]) : edges[b];
        const double r = log_scale ? std::expm1(edges[b + 1]) : edges[b + 1];
        const bool last = (b == bins - 1);
        labels.push_back("[" + format_edge(l) + ", " + format_edge(r) + (last ? "]" : ")"));
    }
    if (labels.size() < 2) fail(Errc::degenerate_bins, "fewer than 2 populated bins");

    auto support = make_support(std::move(labels));
    std::vector<Distribution> dists;
    dists.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> probs;
        probs.reserve(kept_bins.size());
        for (std::size_t b : kept_bins)
            probs.push_back(static_cast<double>(hist[i][b]) / static_cast<double>(counts[i]));
        dists.emplace_back(support, std::move(probs));
    }

    EmpiricalResult out{SourceDistributions(variants, std::move(dists)), std::move(means),
                        std::move(counts), std::move(edges), cfg};
    return out;
}

}  // namespace exeff::ingest
