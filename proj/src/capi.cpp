#include "exeff/exeff.h"

#include <cstring>
#include <new>
#include <string>

#include "oracle.hpp"
#include "serialize.hpp"
#include "solver.hpp"
#include "synth.hpp"

using exeff::Errc;

struct exeff_dataset {
    exeff::serialize::Dataset d;
};

struct exeff_result {
    exeff::solver::SolverResult r;
};

namespace {

thread_local std::string g_last_error;

exeff_status status_of(Errc c) {
    switch (c) {
        case Errc::invalid_argument: return EXEFF_ERR_INVALID_ARGUMENT;
        case Errc::negative_mass: return EXEFF_ERR_NEGATIVE_MASS;
        case Errc::bad_total: return EXEFF_ERR_BAD_TOTAL;
        case Errc::length_mismatch: return EXEFF_ERR_LENGTH_MISMATCH;
        case Errc::singular_matrix: return EXEFF_ERR_SINGULAR_MATRIX;
        case Errc::bad_permutation: return EXEFF_ERR_BAD_PERMUTATION;
        case Errc::identical_distributions: return EXEFF_ERR_IDENTICAL_DISTRIBUTIONS;
        case Errc::degenerate_bounds: return EXEFF_ERR_DEGENERATE_BOUNDS;
        case Errc::empty_support: return EXEFF_ERR_EMPTY_SUPPORT;
        case Errc::size_overflow: return EXEFF_ERR_SIZE_OVERFLOW;
        case Errc::no_feasible_point: return EXEFF_ERR_NO_FEASIBLE_POINT;
        case Errc::rejection_exhausted: return EXEFF_ERR_REJECTION_EXHAUSTED;
        case Errc::parse_error: return EXEFF_ERR_PARSE;
        case Errc::unknown_header: return EXEFF_ERR_UNKNOWN_HEADER;
        case Errc::empty_dataset: return EXEFF_ERR_EMPTY_DATASET;
        case Errc::empty_variant: return EXEFF_ERR_EMPTY_VARIANT;
        case Errc::degenerate_bins: return EXEFF_ERR_DEGENERATE_BINS;
        case Errc::duplicate_assignment: return EXEFF_ERR_DUPLICATE_ASSIGNMENT;
        case Errc::support_mismatch: return EXEFF_ERR_SUPPORT_MISMATCH;
        case Errc::schema_error: return EXEFF_ERR_SCHEMA;
        case Errc::io_error: return EXEFF_ERR_IO;
        case Errc::internal: return EXEFF_ERR_INTERNAL;
    }
    return EXEFF_ERR_INTERNAL;
}

template <typename Fn>
exeff_status guarded(Fn&& fn) {
    try {
        fn();
        return EXEFF_OK;
    } catch (const exeff::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return EXEFF_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EXEFF_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return EXEFF_ERR_INTERNAL;
    }
}

exeff_status invalid(const char* what) {
    g_last_error = what;
    return EXEFF_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

exeff::solver::SolverConfig convert(const exeff_solver_config& c) {
    exeff::solver::SolverConfig cfg;
    cfg.feasibility_tol = c.feasibility_tol;
    cfg.starts = c.starts;
    cfg.max_iters = c.max_iters;
    cfg.step_init = c.step_init;
    cfg.step_shrink = c.step_shrink;
    cfg.min_step = c.min_step;
    cfg.seed = c.seed;
    cfg.det_tol = c.det_tol;
    cfg.force_general = c.force_general != 0;
    return cfg;
}

}  // namespace

extern "C" {

const char* exeff_status_name(exeff_status status) {
    switch (status) {
        case EXEFF_OK: return "OK";
        case EXEFF_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case EXEFF_ERR_NEGATIVE_MASS: return "NegativeMass";
        case EXEFF_ERR_BAD_TOTAL: return "BadTotal";
        case EXEFF_ERR_LENGTH_MISMATCH: return "LengthMismatch";
        case EXEFF_ERR_SINGULAR_MATRIX: return "SingularMatrix";
        case EXEFF_ERR_BAD_PERMUTATION: return "BadPermutation";
        case EXEFF_ERR_IDENTICAL_DISTRIBUTIONS: return "IdenticalDistributions";
        case EXEFF_ERR_DEGENERATE_BOUNDS: return "DegenerateBounds";
        case EXEFF_ERR_EMPTY_SUPPORT: return "EmptySupport";
        case EXEFF_ERR_SIZE_OVERFLOW: return "SizeOverflow";
        case EXEFF_ERR_NO_FEASIBLE_POINT: return "NoFeasiblePoint";
        case EXEFF_ERR_REJECTION_EXHAUSTED: return "RejectionExhausted";
        case EXEFF_ERR_PARSE: return "ParseError";
        case EXEFF_ERR_UNKNOWN_HEADER: return "UnknownHeader";
        case EXEFF_ERR_EMPTY_DATASET: return "EmptyDataset";
        case EXEFF_ERR_EMPTY_VARIANT: return "EmptyVariant";
        case EXEFF_ERR_DEGENERATE_BINS: return "DegenerateBins";
        case EXEFF_ERR_DUPLICATE_ASSIGNMENT: return "DuplicateAssignment";
        case EXEFF_ERR_SUPPORT_MISMATCH: return "SupportMismatch";
        case EXEFF_ERR_SCHEMA: return "SchemaError";
        case EXEFF_ERR_IO: return "IoError";
        case EXEFF_ERR_INTERNAL: return "Internal";
    }
    return "Unknown";
}

const char* exeff_last_error(void) { return g_last_error.c_str(); }

void exeff_dataset_free(exeff_dataset* ds) { delete ds; }
void exeff_result_free(exeff_result* res) { delete res; }
void exeff_string_free(char* text) { delete[] text; }

void exeff_solver_config_init(exeff_solver_config* cfg) {
    if (!cfg) return;
    const exeff::solver::SolverConfig d;
    cfg->feasibility_tol = d.feasibility_tol;
    cfg->starts = d.starts;
    cfg->max_iters = d.max_iters;
    cfg->step_init = d.step_init;
    cfg->step_shrink = d.step_shrink;
    cfg->min_step = d.min_step;
    cfg->seed = d.seed;
    cfg->det_tol = d.det_tol;
    cfg->force_general = 0;
}

void exeff_binning_config_init(exeff_binning_config* cfg) {
    if (!cfg) return;
    cfg->transform = "log1p";
    cfg->n_bins = 64;
    cfg->strategy = "quantile";
    cfg->reference = "pooled";
    cfg->drop_empty_shared_bins = 1;
}

void exeff_plant_config_init(exeff_plant_config* cfg) {
    if (!cfg) return;
    const exeff::synth::PlantSpec d;
    cfg->k = d.k;
    cfg->n = d.n;
    cfg->seed = d.seed;
    cfg->min_det = d.min_det;
    cfg->basis_concentration = d.basis_concentration;
}

exeff_status exeff_dataset_parse_json(const char* json_text, exeff_dataset** out) {
    if (!json_text || !out) return invalid("null argument");
    return guarded([&] { *out = new exeff_dataset{exeff::serialize::parse_dataset(json_text)}; });
}

exeff_status exeff_dataset_load_csv(const char* path, const exeff_binning_config* cfg,
                                    exeff_dataset** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        exeff::ingest::BinningConfig bc;
        if (cfg) {
            bc.transform = exeff::ingest::transform_from_name(cfg->transform ? cfg->transform : "log1p");
            bc.n_bins = cfg->n_bins;
            bc.strategy = exeff::ingest::strategy_from_name(cfg->strategy ? cfg->strategy : "quantile");
            bc.reference =
                exeff::ingest::reference_from_name(cfg->reference ? cfg->reference : "pooled");
            bc.drop_empty_shared_bins = cfg->drop_empty_shared_bins != 0;
        }
        const auto records = exeff::ingest::load_csv(path);
        auto er = exeff::ingest::empirical_distributions(records, bc);
        *out = new exeff_dataset{exeff::serialize::dataset_from_empirical(er)};
    });
}

exeff_status exeff_dataset_plant(const exeff_plant_config* cfg, exeff_dataset** out,
                                 double* out_planted_objective) {
    if (!out) return invalid("null argument");
    return guarded([&] {
        exeff::synth::PlantSpec spec;
        if (cfg) {
            spec.k = cfg->k;
            spec.n = cfg->n;
            spec.seed = cfg->seed;
            spec.min_det = cfg->min_det;
            spec.basis_concentration = cfg->basis_concentration;
        }
        auto planted = exeff::synth::plant(spec);
        if (out_planted_objective) *out_planted_objective = planted.matrix.det_abs();
        *out = new exeff_dataset{
            exeff::serialize::Dataset{std::move(planted.src), {}, {}, std::nullopt}};
    });
}

exeff_status exeff_dataset_sample_csv(const exeff_dataset* ds, uint64_t n_per_variant,
                                      uint64_t seed, const char* csv_path) {
    if (!ds || !csv_path) return invalid("null argument");
    return guarded([&] {
        const auto records =
            exeff::synth::sample_observations(ds->d.src, static_cast<std::size_t>(n_per_variant), seed);
        exeff::synth::write_observations_csv(records, csv_path);
    });
}

exeff_status exeff_dataset_to_json(const exeff_dataset* ds, char** out_json) {
    if (!ds || !out_json) return invalid("null argument");
    return guarded([&] { *out_json = dup_string(exeff::serialize::dataset_to_json(ds->d).dump(2)); });
}

size_t exeff_dataset_variant_count(const exeff_dataset* ds) { return ds ? ds->d.src.k() : 0; }
size_t exeff_dataset_support_size(const exeff_dataset* ds) {
    return ds ? ds->d.src.support_size() : 0;
}

exeff_status exeff_solve(const exeff_dataset* ds, const exeff_solver_config* cfg,
                         exeff_result** out) {
    if (!ds || !out) return invalid("null argument");
    return guarded([&] {
        exeff::solver::SolverConfig sc;
        if (cfg) sc = convert(*cfg);
        *out = new exeff_result{exeff::solver::solve_extreme(ds->d.src, sc)};
    });
}

exeff_status exeff_solve_grid(const exeff_dataset* ds, int steps, double feasibility_tol,
                              exeff_result** out) {
    if (!ds || !out) return invalid("null argument");
    return guarded([&] {
        // Mirror the solver's degenerate handling so A/A-style inputs flow
        // through rather than scanning a grid whose optimum is meaningless.
        if (!exeff::core::linear_independence_report(ds->d.src).independent) {
            exeff::solver::SolverConfig cfg;
            *out = new exeff_result{exeff::solver::solve_extreme(ds->d.src, cfg)};
            return;
        }
        exeff::oracle::GridSpec grid;
        grid.steps = steps;
        if (feasibility_tol > 0.0) grid.feasibility_tol = feasibility_tol;
        auto res = exeff::oracle::brute_force_min_det(ds->d.src, grid);
        exeff::solver::SolverResult sr;
        sr.decomposition = std::move(res.decomposition);
        sr.objective = res.objective;
        sr.branch_note = "grid";
        *out = new exeff_result{std::move(sr)};
    });
}

exeff_status exeff_result_parse_json(const exeff_dataset* ds, const char* json_text,
                                     exeff_result** out) {
    if (!ds || !json_text || !out) return invalid("null argument");
    return guarded(
        [&] { *out = new exeff_result{exeff::serialize::parse_result(json_text, ds->d.src)}; });
}

double exeff_result_objective(const exeff_result* res) { return res ? res->r.objective : -1.0; }

const char* exeff_result_branch(const exeff_result* res) {
    return res ? res->r.branch_note.c_str() : "";
}

int exeff_result_no_effect(const exeff_result* res) {
    if (!res) return 0;
    if (res->r.degenerate) return 1;
    return res->r.binary_info && res->r.binary_info->no_detectable_effect;
}

exeff_status exeff_result_to_json(const exeff_result* res, const exeff_dataset* ds,
                                  char** out_json) {
    if (!res || !out_json) return invalid("null argument");
    return guarded([&] {
        const char* method = res->r.branch_note == "grid" ? "grid" : nullptr;
        if (ds) {
            const auto diag = exeff::solver::verify_solution(res->r, ds->d.src);
            *out_json =
                dup_string(exeff::serialize::result_to_json(res->r, &diag, method).dump(2));
        } else {
            *out_json =
                dup_string(exeff::serialize::result_to_json(res->r, nullptr, method).dump(2));
        }
    });
}

exeff_status exeff_report_json(const exeff_dataset* ds, const exeff_result* res, double min_alpha,
                               char** out_json, int* out_no_effect) {
    if (!ds || !res || !out_json) return invalid("null argument");
    return guarded([&] {
        const double cut = min_alpha < 0.0 ? exeff::serialize::kDefaultMinAlpha : min_alpha;
        const auto rep = exeff::serialize::build_report(ds->d, res->r, cut);
        const auto diag = exeff::solver::verify_solution(res->r, ds->d.src);
        if (out_no_effect) *out_no_effect = rep.no_detectable_effect ? 1 : 0;
        *out_json = dup_string(exeff::serialize::report_to_json(rep, res->r, &diag).dump(2));
    });
}

exeff_status exeff_plotdata_csv(const exeff_dataset* ds, const exeff_result* res, char** out_csv) {
    if (!ds || !res || !out_csv) return invalid("null argument");
    return guarded(
        [&] { *out_csv = dup_string(exeff::serialize::plotdata_csv(ds->d, res->r)); });
}

}  // extern "C"
