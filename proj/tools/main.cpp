// Command-line front door for the exeff shared library. Everything goes
// through the C API in exeff/exeff.h; this file only parses flags, moves
// bytes and maps statuses to exit codes.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "exeff/exeff.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

int exit_code_for(exeff_status s) {
    switch (s) {
        case EXEFF_OK: return kExitOk;
        case EXEFF_ERR_INTERNAL:
        case EXEFF_ERR_NO_FEASIBLE_POINT: return kExitInternal;
        default: return kExitInput;
    }
}

int report_failure(exeff_status s) {
    std::cerr << "error: " << exeff_status_name(s) << ": " << exeff_last_error() << "\n";
    return exit_code_for(s);
}

struct DatasetHandle {
    exeff_dataset* p = nullptr;
    ~DatasetHandle() { exeff_dataset_free(p); }
};

struct ResultHandle {
    exeff_result* p = nullptr;
    ~ResultHandle() { exeff_result_free(p); }
};

struct StringHandle {
    char* p = nullptr;
    ~StringHandle() { exeff_string_free(p); }
};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return kExitOk;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitInput;
    }
    out << text;
    return kExitOk;
}

struct SolverFlags {
    exeff_solver_config cfg{};
    void attach(CLI::App* cmd) {
        exeff_solver_config_init(&cfg);
        cmd->add_option("--starts", cfg.starts, "local-search restarts");
        cmd->add_option("--max-iters", cfg.max_iters, "iterations per start");
        cmd->add_option("--seed", cfg.seed, "random seed");
        cmd->add_option("--feasibility-tol", cfg.feasibility_tol, "basis non-negativity slack");
        cmd->add_flag("--force-general", cfg.force_general,
                      "skip the closed-form shortcuts (testing)");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"extreme effect-variable decomposition for A/B-test distributions"};
    app.require_subcommand(1);

    std::string out_path;
    app.add_option("--out", out_path, "write the primary output to this file")->capture_default_str();

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "CSV of observations -> A/B report");
    std::string analyze_csv;
    analyze->add_option("csv", analyze_csv, "observations CSV (unit_id,variant,value)")->required();
    std::string transform = "log1p", strategy = "quantile", reference = "pooled";
    int bins = 64;
    bool keep_empty = false;
    double min_alpha = -1.0;
    std::string format = "json";
    analyze->add_option("--transform", transform, "none|log1p")->capture_default_str();
    analyze->add_option("--bins", bins, "number of bins")->capture_default_str();
    analyze->add_option("--strategy", strategy, "fixed_width|quantile")->capture_default_str();
    analyze->add_option("--reference", reference, "pooled|control")->capture_default_str();
    analyze->add_flag("--keep-empty-bins", keep_empty, "keep bins empty in every variant");
    analyze->add_option("--min-alpha", min_alpha, "no-effect cutoff on alpha (default: built-in)");
    analyze->add_option("--format", format, "json|csv")->capture_default_str();
    SolverFlags analyze_solver;
    analyze_solver.attach(analyze);

    // ---- decompose ----
    auto* decompose = app.add_subcommand("decompose", "distributions JSON -> decomposition JSON");
    std::string decompose_json;
    decompose->add_option("distributions", decompose_json, "distributions JSON file")->required();
    SolverFlags decompose_solver;
    decompose_solver.attach(decompose);

    // ---- oracle ----
    auto* oracle = app.add_subcommand("oracle", "exhaustive grid reference solver");
    std::string oracle_json;
    int oracle_steps = 50;
    double oracle_tol = -1.0;
    oracle->add_option("distributions", oracle_json, "distributions JSON file")->required();
    oracle->add_option("--steps", oracle_steps, "grid steps per row")->capture_default_str();
    oracle->add_option("--feasibility-tol", oracle_tol, "basis non-negativity slack");

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a planted instance");
    exeff_plant_config plant;
    exeff_plant_config_init(&plant);
    std::uint64_t samples = 0;
    std::string samples_out;
    synth->add_option("--k", plant.k, "number of variants")->capture_default_str();
    synth->add_option("--n", plant.n, "support size")->capture_default_str();
    synth->add_option("--seed", plant.seed, "random seed");
    synth->add_option("--min-det", plant.min_det, "planted |det| lower bound")->capture_default_str();
    synth->add_option("--concentration", plant.basis_concentration, "basis peakedness")
        ->capture_default_str();
    synth->add_option("--samples", samples, "observations to sample per variant");
    synth->add_option("--samples-out", samples_out, "CSV path for sampled observations");

    // ---- plotdata ----
    auto* plotdata = app.add_subcommand("plotdata", "decomposition + distributions -> tidy CSV");
    std::string plot_dec, plot_src;
    plotdata->add_option("decomposition", plot_dec, "decomposition JSON file")->required();
    plotdata->add_option("distributions", plot_src, "distributions JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) {
        if (format != "json" && format != "csv") {
            std::cerr << "error: --format must be json or csv\n";
            return kExitInput;
        }
        exeff_binning_config bc;
        exeff_binning_config_init(&bc);
        bc.transform = transform.c_str();
        bc.n_bins = bins;
        bc.strategy = strategy.c_str();
        bc.reference = reference.c_str();
        bc.drop_empty_shared_bins = keep_empty ? 0 : 1;

        DatasetHandle ds;
        exeff_status s = exeff_dataset_load_csv(analyze_csv.c_str(), &bc, &ds.p);
        if (s != EXEFF_OK) return report_failure(s);
        ResultHandle res;
        s = exeff_solve(ds.p, &analyze_solver.cfg, &res.p);
        if (s != EXEFF_OK) return report_failure(s);
        StringHandle json;
        int no_effect = 0;
        s = exeff_report_json(ds.p, res.p, min_alpha, &json.p, &no_effect);
        if (s != EXEFF_OK) return report_failure(s);
        std::cerr << "branch=" << exeff_result_branch(res.p)
                  << " objective=" << exeff_result_objective(res.p)
                  << (no_effect ? " [no detectable effect]" : "") << "\n";
        std::string text = json.p;
        if (format == "csv") {
            // flat key,value summary for spreadsheet-style consumers
            std::string flat = "key,value\n";
            flat += "branch," + std::string(exeff_result_branch(res.p)) + "\n";
            flat += "objective," + std::to_string(exeff_result_objective(res.p)) + "\n";
            flat += "no_detectable_effect," + std::to_string(no_effect) + "\n";
            text = flat;
        }
        const int wr = write_output(text, out_path);
        if (wr != kExitOk) return wr;
        return no_effect ? kExitDegenerate : kExitOk;
    }

    if (decompose->parsed()) {
        std::string text;
        if (!read_file(decompose_json, text)) {
            std::cerr << "error: cannot read '" << decompose_json << "'\n";
            return kExitInput;
        }
        DatasetHandle ds;
        exeff_status s = exeff_dataset_parse_json(text.c_str(), &ds.p);
        if (s != EXEFF_OK) return report_failure(s);
        ResultHandle res;
        s = exeff_solve(ds.p, &decompose_solver.cfg, &res.p);
        if (s != EXEFF_OK) return report_failure(s);
        StringHandle json;
        s = exeff_result_to_json(res.p, ds.p, &json.p);
        if (s != EXEFF_OK) return report_failure(s);
        std::cerr << "branch=" << exeff_result_branch(res.p)
                  << " objective=" << exeff_result_objective(res.p) << "\n";
        const int wr = write_output(json.p, out_path);
        if (wr != kExitOk) return wr;
        return exeff_result_no_effect(res.p) ? kExitDegenerate : kExitOk;
    }

    if (oracle->parsed()) {
        std::string text;
        if (!read_file(oracle_json, text)) {
            std::cerr << "error: cannot read '" << oracle_json << "'\n";
            return kExitInput;
        }
        DatasetHandle ds;
        exeff_status s = exeff_dataset_parse_json(text.c_str(), &ds.p);
        if (s != EXEFF_OK) return report_failure(s);
        ResultHandle res;
        s = exeff_solve_grid(ds.p, oracle_steps, oracle_tol, &res.p);
        if (s != EXEFF_OK) return report_failure(s);
        StringHandle json;
        s = exeff_result_to_json(res.p, ds.p, &json.p);
        if (s != EXEFF_OK) return report_failure(s);
        std::cerr << "grid objective=" << exeff_result_objective(res.p) << "\n";
        const int wr = write_output(json.p, out_path);
        if (wr != kExitOk) return wr;
        return exeff_result_no_effect(res.p) ? kExitDegenerate : kExitOk;
    }

    if (synth->parsed()) {
        DatasetHandle ds;
        double planted_obj = 0.0;
        exeff_status s = exeff_dataset_plant(&plant, &ds.p, &planted_obj);
        if (s != EXEFF_OK) return report_failure(s);
        if (samples > 0) {
            if (samples_out.empty()) {
                std::cerr << "error: --samples needs --samples-out\n";
                return kExitInput;
            }
            s = exeff_dataset_sample_csv(ds.p, samples, plant.seed, samples_out.c_str());
            if (s != EXEFF_OK) return report_failure(s);
        }
        StringHandle json;
        s = exeff_dataset_to_json(ds.p, &json.p);
        if (s != EXEFF_OK) return report_failure(s);
        std::cerr << "planted |det|=" << planted_obj << "\n";
        return write_output(json.p, out_path);
    }

    if (plotdata->parsed()) {
        std::string dec_text, src_text;
        if (!read_file(plot_dec, dec_text) || !read_file(plot_src, src_text)) {
            std::cerr << "error: cannot read input files\n";
            return kExitInput;
        }
        DatasetHandle ds;
        exeff_status s = exeff_dataset_parse_json(src_text.c_str(), &ds.p);
        if (s != EXEFF_OK) return report_failure(s);
        ResultHandle res;
        s = exeff_result_parse_json(ds.p, dec_text.c_str(), &res.p);
        if (s != EXEFF_OK) return report_failure(s);
        StringHandle csv;
        s = exeff_plotdata_csv(ds.p, res.p, &csv.p);
        if (s != EXEFF_OK) return report_failure(s);
        return write_output(csv.p, out_path);
    }

    return kExitInput;
}
