#include "serialize.hpp"

#include <cmath>
#include <cstdio>

namespace exeff::serialize {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(Errc::schema_error, path + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(Errc::schema_error, path + "/" + key + ": missing");
    return *it;
}

std::string need_string(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string()) fail(Errc::schema_error, path + "/" + key + ": expected a string");
    return v.get<std::string>();
}

double need_number(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number()) fail(Errc::schema_error, path + "/" + key + ": expected a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(Errc::schema_error, path + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            fail(Errc::schema_error, path + "/" + std::to_string(i) + ": expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

json num_or_inf(double v) {
    if (std::isinf(v)) return json("inf");
    return json(v);
}

json matrix_to_json(const linalg::Mat& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

linalg::Mat matrix_from_json(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty())
        fail(Errc::schema_error, path + ": expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < v.size(); ++i)
        rows.push_back(number_array(v[i], path + "/" + std::to_string(i)));
    for (const auto& r : rows)
        if (r.size() != rows.front().size())
            fail(Errc::schema_error, path + ": ragged rows");
    linalg::Mat m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
    return m;
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(Errc::schema_error, ": not valid JSON");
    return j;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

Dataset dataset_from_empirical(const ingest::EmpiricalResult& er) {
    BinningEcho echo;
    echo.transform = ingest::transform_name(er.effective.transform);
    echo.strategy = ingest::strategy_name(er.effective.strategy);
    echo.reference = ingest::reference_name(er.effective.reference);
    echo.n_bins_requested = er.effective.n_bins;
    echo.drop_empty_shared_bins = er.effective.drop_empty_shared_bins;
    echo.edges = er.edges;
    return Dataset{er.src, er.means, er.counts, std::move(echo)};
}

json dataset_to_json(const Dataset& ds) {
    json j;
    j["support"] = ds.src.support()->labels();
    json variants = json::array();
    for (std::size_t i = 0; i < ds.src.k(); ++i) {
        json v;
        v["name"] = ds.src.variants()[i];
        v["probs"] = ds.src.dist(i).probs();
        variants.push_back(std::move(v));
    }
    j["variants"] = std::move(variants);
    if (ds.has_means()) {
        json means, counts;
        for (std::size_t i = 0; i < ds.src.k(); ++i) {
            means[ds.src.variants()[i]] = ds.means[i];
            counts[ds.src.variants()[i]] = ds.counts[i];
        }
        j["means"] = std::move(means);
        j["counts"] = std::move(counts);
    }
    if (ds.binning) {
        json b;
        b["transform"] = ds.binning->transform;
        b["strategy"] = ds.binning->strategy;
        b["reference"] = ds.binning->reference;
        b["n_bins_requested"] = ds.binning->n_bins_requested;
        b["drop_empty_shared_bins"] = ds.binning->drop_empty_shared_bins;
        b["edges"] = ds.binning->edges;
        j["binning"] = std::move(b);
    }
    return j;
}

Dataset parse_dataset(const std::string& text) {
    const json j = parse_text(text);
    const json& support_j = need(j, "support", "");
    if (!support_j.is_array()) fail(Errc::schema_error, "/support: expected an array");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < support_j.size(); ++i) {
        if (!support_j[i].is_string())
            fail(Errc::schema_error, "/support/" + std::to_string(i) + ": expected a string");
        labels.push_back(support_j[i].get<std::string>());
    }
    auto support = make_support(std::move(labels));

    const json& variants_j = need(j, "variants", "");
    if (!variants_j.is_array()) fail(Errc::schema_error, "/variants: expected an array");
    std::vector<std::string> names;
    std::vector<Distribution> dists;
    for (std::size_t i = 0; i < variants_j.size(); ++i) {
        const std::string path = "/variants/" + std::to_string(i);
        names.push_back(need_string(variants_j[i], "name", path));
        dists.emplace_back(support, number_array(need(variants_j[i], "probs", path), path + "/probs"));
    }

    Dataset ds{SourceDistributions(std::move(names), std::move(dists)), {}, {}, std::nullopt};
    if (j.contains("means") && j["means"].is_object()) {
        ds.means.assign(ds.src.k(), 0.0);
        ds.counts.assign(ds.src.k(), 0);
        for (std::size_t i = 0; i < ds.src.k(); ++i) {
            const auto& name = ds.src.variants()[i];
            if (!j["means"].contains(name))
                fail(Errc::schema_error, "/means/" + name + ": missing");
            ds.means[i] = j["means"][name].get<double>();
            if (j.contains("counts") && j["counts"].contains(name))
                ds.counts[i] = j["counts"][name].get<std::size_t>();
        }
    }
    return ds;
}

json result_to_json(const solver::SolverResult& res, const solver::VerifyReport* diagnostics,
                    const char* method) {
    const auto& dec = res.decomposition;
    json j;
    j["P"] = matrix_to_json(dec.matrix.entries());
    json basis = json::array();
    for (const auto& b : dec.basis) basis.push_back(b.probs());
    j["basis"] = std::move(basis);
    j["det_abs"] = dec.det_abs;
    j["residual"] = dec.residual;
    j["feasibility_slack"] = dec.feasibility_slack;
    j["objective"] = res.objective;
    j["branch_note"] = res.branch_note;
    j["starts_converged"] = res.starts_converged;
    if (res.binary_info) {
        const auto& bi = *res.binary_info;
        j["m"] = num_or_inf(bi.bounds.ratio_min);
        j["M"] = num_or_inf(bi.bounds.ratio_max);
        j["alpha"] = bi.extreme.alpha;
        j["beta"] = num_or_inf(bi.extreme.beta);
        j["mirrored"] = bi.mirrored;
        j["no_detectable_effect"] = bi.no_detectable_effect;
    }
    if (diagnostics) {
        json d;
        d["matrix_rows_stochastic"] = diagnostics->matrix_rows_stochastic;
        d["matrix_entries_nonnegative"] = diagnostics->matrix_entries_nonnegative;
        d["basis_nonnegative"] = diagnostics->basis_nonnegative;
        d["basis_sums_to_one"] = diagnostics->basis_sums_to_one;
        d["residual_ok"] = diagnostics->residual_ok;
        d["det_consistent"] = diagnostics->det_consistent;
        d["objective_in_range"] = diagnostics->objective_in_range;
        d["all_ok"] = diagnostics->all_ok();
        j["diagnostics"] = std::move(d);
    }
    if (method) j["method"] = method;
    return j;
}

solver::SolverResult parse_result(const std::string& text, const SourceDistributions& src) {
    const json j = parse_text(text);
    const auto p = matrix_from_json(need(j, "P", ""), "/P");
    const auto basis_m = matrix_from_json(need(j, "basis", ""), "/basis");
    if (p.rows != src.k() || p.cols != src.k() || basis_m.rows != src.k() ||
        basis_m.cols != src.support_size())
        fail(Errc::support_mismatch, "decomposition shape does not match the source distributions");

    std::vector<Distribution> basis;
    for (std::size_t r = 0; r < basis_m.rows; ++r) {
        std::vector<double> row(basis_m.cols);
        for (std::size_t c = 0; c < basis_m.cols; ++c) row[c] = basis_m(r, c);
        basis.emplace_back(src.support(), std::move(row));
    }

    solver::SolverResult res;
    res.decomposition = Decomposition{MixtureMatrix(p), std::move(basis),
                                      need_number(j, "det_abs", ""), need_number(j, "residual", ""),
                                      need_number(j, "feasibility_slack", "")};
    res.objective = j.contains("objective") ? j["objective"].get<double>()
                                            : res.decomposition.det_abs;
    res.branch_note = j.contains("branch_note") ? j["branch_note"].get<std::string>() : "parsed";
    return res;
}

std::string plotdata_csv(const Dataset& ds, const solver::SolverResult& res) {
    const auto& dec = res.decomposition;
    if (dec.basis.size() != ds.src.k() || dec.basis.front().size() != ds.src.support_size())
        fail(Errc::support_mismatch, "decomposition does not match the source support");
    std::string out = "bin,series,probability\n";
    const auto& labels = ds.src.support()->labels();
    auto emit = [&](const std::string& series, const std::vector<double>& probs) {
        for (std::size_t x = 0; x < probs.size(); ++x) {
            out += csv_quote(labels[x]);
            out += ',';
            out += csv_quote(series);
            out += ',';
            out += format_double(probs[x]);
            out += '\n';
        }
    };
    for (std::size_t i = 0; i < ds.src.k(); ++i) emit("d_" + ds.src.variants()[i], ds.src.dist(i).probs());
    for (std::size_t jx = 0; jx < dec.basis.size(); ++jx)
        emit("f_" + std::to_string(jx), dec.basis[jx].probs());
    return out;
}

ABReport build_report(const Dataset& ds, const solver::SolverResult& res, double min_alpha) {
    ABReport rep;
    rep.variants = ds.src.variants();
    rep.means = ds.means;
    rep.counts = ds.counts;
    rep.no_detectable_effect = res.degenerate;
    if (res.binary_info) {
        rep.alpha = res.binary_info->extreme.alpha;
        rep.beta = res.binary_info->extreme.beta;
        rep.mirrored = res.binary_info->mirrored;
        if (res.binary_info->no_detectable_effect || res.binary_info->extreme.alpha < min_alpha)
            rep.no_detectable_effect = true;
    }
    if (ds.src.k() == 2 && ds.has_means()) {
        rep.mu_control = ds.means[0];
        rep.mu_treatment = ds.means[1];
        rep.delta = ds.means[1] - ds.means[0];
        if (ds.means[0] != 0.0) rep.rel_delta = *rep.delta / ds.means[0];
    }
    return rep;
}

json report_to_json(const ABReport& rep, const solver::SolverResult& res,
                    const solver::VerifyReport* diagnostics) {
    json j;
    j["variants"] = rep.variants;
    if (!rep.means.empty()) {
        json means, counts;
        for (std::size_t i = 0; i < rep.variants.size(); ++i) {
            means[rep.variants[i]] = rep.means[i];
            if (i < rep.counts.size()) counts[rep.variants[i]] = rep.counts[i];
        }
        j["means"] = std::move(means);
        j["counts"] = std::move(counts);
    }
    if (rep.mu_control) j["mu_A"] = *rep.mu_control;
    if (rep.mu_treatment) j["mu_B"] = *rep.mu_treatment;
    if (rep.delta) j["delta"] = *rep.delta;
    j["rel_delta"] = rep.rel_delta ? json(*rep.rel_delta) : json();
    if (rep.alpha) j["alpha"] = *rep.alpha;
    if (rep.beta) j["beta"] = num_or_inf(*rep.beta);
    j["flags"] = {{"mirrored", rep.mirrored}, {"no_detectable_effect", rep.no_detectable_effect}};
    j["decomposition"] = result_to_json(res, diagnostics);
    return j;
}

}  // namespace exeff::serialize
