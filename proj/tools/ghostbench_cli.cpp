// ghostbench command-line front end: pattern generation, measurement
// simulation, reconstruction, and the experiment grids.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ghostbench/experiment.hpp"
#include "ghostbench/forward.hpp"
#include "ghostbench/image_io.hpp"
#include "ghostbench/pattern_io.hpp"
#include "ghostbench/recon.hpp"
#include "ghostbench/rng.hpp"
#include "ghostbench/schedule.hpp"
#include "ghostbench/test_objects.hpp"

namespace gb = ghostbench;

namespace {

std::optional<gb::RoiSpec> parse_roi(const std::string& text) {
    if (text.empty()) return std::nullopt;
    double cx = 0, cy = 0, r = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    if (!(in >> cx >> sep1 >> cy >> sep2 >> r) || sep1 != ',' || sep2 != ',')
        throw CLI::ValidationError("--roi", "expected cx,cy,r");
    return gb::RoiSpec{cx, cy, r};
}

struct GridArgs {
    std::string config_path;
    std::optional<std::string> object;
    std::optional<int> resolution;
    std::optional<std::string> methods;
    std::optional<std::string> counts;
    std::optional<std::string> sigmas;
    std::optional<std::string> sigma_mode;
    std::optional<std::string> roi;
    std::optional<int> m1;
    std::optional<std::string> seeds;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<bool> emit_stacks;
    std::optional<double> fidelity_weight;
    std::optional<double> penalty_weight;
    std::optional<double> tolerance;
    std::optional<int> max_iterations;
};

void add_grid_options(CLI::App* cmd, GridArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--object", args.object, "builtin name (peppers|bit) or image path");
    cmd->add_option("--resolution", args.resolution, "actual resolution M (pixels per side)");
    cmd->add_option("--methods", args.methods, "comma list of UCGI,TVCGI,SVCGI,TSVCGI");
    cmd->add_option("--counts", args.counts, "comma list of measurement counts T");
    cmd->add_option("--sigmas", args.sigmas, "comma list of noise standard deviations");
    cmd->add_option("--sigma-mode", args.sigma_mode, "absolute|relative");
    cmd->add_option("--roi", args.roi, "ROI disk cx,cy,r (default centered, r=M/4)");
    cmd->add_option("--m1", args.m1, "lowest imaging resolution of the schedule");
    cmd->add_option("--seeds", args.seeds, "comma list of row seeds");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--workers", args.workers, "parallel rows (0 = hardware)");
    cmd->add_flag("--emit-stacks,!--no-emit-stacks", args.emit_stacks,
                  "write GPAT1 stacks next to the results");
    cmd->add_option("--fidelity-weight", args.fidelity_weight, "solver data weight");
    cmd->add_option("--penalty-weight", args.penalty_weight, "solver splitting penalty");
    cmd->add_option("--tolerance", args.tolerance, "solver relative-change stop");
    cmd->add_option("--max-iterations", args.max_iterations, "solver outer sweep cap");
}

gb::ExperimentConfig resolve_config(const GridArgs& args) {
    gb::ExperimentConfig config;
    if (!args.config_path.empty()) config = gb::load_config(args.config_path);
    // Flags override file keys.
    if (args.object) config.object_path = *args.object;
    if (args.resolution) config.actual_resolution = *args.resolution;
    if (args.methods) {
        config.methods.clear();
        std::istringstream in(*args.methods);
        std::string item;
        while (std::getline(in, item, ',')) {
            const auto method = gb::method_from_name(item);
            if (!method) throw CLI::ValidationError("--methods", "unknown method " + item);
            config.methods.push_back(*method);
        }
    }
    if (args.counts) {
        config.measurement_counts.clear();
        std::istringstream in(*args.counts);
        std::string item;
        while (std::getline(in, item, ',')) config.measurement_counts.push_back(std::stoi(item));
    }
    if (args.sigmas) {
        config.noise_sigmas.clear();
        std::istringstream in(*args.sigmas);
        std::string item;
        while (std::getline(in, item, ',')) config.noise_sigmas.push_back(std::stod(item));
    }
    if (args.sigma_mode) {
        if (*args.sigma_mode == "absolute") config.sigma_mode = gb::SigmaMode::absolute;
        else if (*args.sigma_mode == "relative")
            config.sigma_mode = gb::SigmaMode::relative_mean_signal;
        else throw CLI::ValidationError("--sigma-mode", "want absolute|relative");
    }
    if (args.roi) config.roi = parse_roi(*args.roi);
    if (args.m1) config.lowest_resolution = *args.m1;
    if (args.seeds) {
        config.seeds.clear();
        std::istringstream in(*args.seeds);
        std::string item;
        while (std::getline(in, item, ',')) config.seeds.push_back(std::stoull(item));
    }
    if (args.out) config.output_dir = *args.out;
    if (args.workers) config.workers = *args.workers;
    if (args.emit_stacks) config.emit_stacks = *args.emit_stacks;
    if (args.fidelity_weight) config.solver.fidelity_weight = *args.fidelity_weight;
    if (args.penalty_weight) config.solver.penalty_weight = *args.penalty_weight;
    if (args.tolerance) config.solver.tolerance = *args.tolerance;
    if (args.max_iterations) config.solver.max_iterations = *args.max_iterations;
    return config;
}

void print_summary(const gb::ExperimentResult& result) {
    std::cout << "rows: " << result.rows.size() << "\n";
    for (const auto& row : result.rows)
        std::cout << gb::method_name(row.method) << " T=" << row.measurement_count
                  << " sigma=" << row.sigma << " seed=" << row.seed
                  << " psnr_full=" << row.psnr_full_db << " psnr_roi=" << row.psnr_roi_db << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ghostbench: computational ghost imaging simulation and reconstruction"};
    app.require_subcommand(1);

    // ---- patterns ----
    auto* patterns_cmd = app.add_subcommand("patterns", "generate a GPAT1 pattern stack");
    std::string pat_family = "uniform", pat_roi, pat_out = "stack.gpat";
    int pat_resolution = 64, pat_count = 0, pat_m1 = 16, pat_max_cell = 0;
    double pat_growth = 2.0;
    std::uint64_t pat_seed = 1;
    patterns_cmd->add_option("--family", pat_family, "uniform|temporal|spatial|tsv")->required();
    patterns_cmd->add_option("--resolution", pat_resolution, "actual resolution M")->required();
    patterns_cmd->add_option("--count", pat_count, "patterns to generate (default: schedule total)");
    patterns_cmd->add_option("--m1", pat_m1, "lowest imaging resolution (temporal/tsv)");
    patterns_cmd->add_option("--roi", pat_roi, "ROI cx,cy,r (spatial/tsv; default centered M/4)");
    patterns_cmd->add_option("--ring-growth", pat_growth, "retina annulus growth factor");
    patterns_cmd->add_option("--max-cell", pat_max_cell, "coarsest retina cell (0 = M/8)");
    patterns_cmd->add_option("--seed", pat_seed, "pattern seed");
    patterns_cmd->add_option("--out", pat_out, "output stack path")->required();

    // ---- measure ----
    auto* measure_cmd = app.add_subcommand("measure", "simulate bucket measurements");
    std::string meas_object = "peppers", meas_stack, meas_out = "intensities.csv";
    double meas_sigma = 0.0, meas_mu = 0.0;
    std::uint64_t meas_noise_seed = 0;
    measure_cmd->add_option("--object", meas_object, "builtin name or image path");
    measure_cmd->add_option("--stack", meas_stack, "GPAT1 stack")->required();
    measure_cmd->add_option("--sigma", meas_sigma, "noise standard deviation (raw units)");
    measure_cmd->add_option("--mu", meas_mu, "noise mean");
    measure_cmd->add_option("--noise-seed", meas_noise_seed, "noise stream seed");
    measure_cmd->add_option("--out", meas_out, "output CSV")->required();

    // ---- reconstruct ----
    auto* recon_cmd = app.add_subcommand("reconstruct", "TV reconstruction from a stack + CSV");
    std::string rec_stack, rec_csv, rec_out = "reconstruction.pgm";
    double rec_fw = 128.0, rec_pw = 32.0, rec_tol = 1e-4;
    int rec_iters = 300, rec_cg = 25;
    bool rec_correlation = false;
    recon_cmd->add_option("--stack", rec_stack, "GPAT1 stack")->required();
    recon_cmd->add_option("--intensities", rec_csv, "intensity CSV")->required();
    recon_cmd->add_option("--out", rec_out, "output image (.pgm/.png)")->required();
    recon_cmd->add_option("--fidelity-weight", rec_fw, "data weight");
    recon_cmd->add_option("--penalty-weight", rec_pw, "splitting penalty");
    recon_cmd->add_option("--tolerance", rec_tol, "relative-change stop");
    recon_cmd->add_option("--max-iterations", rec_iters, "outer sweep cap");
    recon_cmd->add_option("--cg-max-iterations", rec_cg, "CG iterations per sweep");
    recon_cmd->add_flag("--correlation", rec_correlation,
                        "use the second-order correlation baseline instead of TV");

    // ---- experiment / noise-sweep / scaling ----
    GridArgs exp_args, sweep_args, scaling_args;
    auto* exp_cmd = app.add_subcommand("experiment", "run a method/T/sigma/seed grid");
    add_grid_options(exp_cmd, exp_args);
    auto* sweep_cmd = app.add_subcommand("noise-sweep", "experiment grid over noise sigmas");
    add_grid_options(sweep_cmd, sweep_args);
    auto* scaling_cmd =
        app.add_subcommand("scaling", "UCGI vs TSVCGI Delta-PSNR at two resolutions");
    std::string scaling_resolutions = "32,64";
    add_grid_options(scaling_cmd, scaling_args);
    scaling_cmd->add_option("--resolutions", scaling_resolutions, "two resolutions, e.g. 32,64");

    CLI11_PARSE(app, argc, argv);

    try {
        if (patterns_cmd->parsed()) {
            const auto family = gb::family_from_name(pat_family);
            if (!family) throw std::runtime_error("unknown pattern family: " + pat_family);
            std::optional<gb::Schedule> schedule;
            std::optional<gb::RetinaSpec> retina;
            if (*family == gb::PatternFamily::temporal || *family == gb::PatternFamily::tsv)
                schedule = gb::build_schedule(pat_resolution, pat_m1);
            if (*family == gb::PatternFamily::spatial || *family == gb::PatternFamily::tsv) {
                gb::RetinaSpec spec;
                const auto roi = parse_roi(pat_roi);
                spec.roi = roi ? *roi
                               : gb::RoiSpec{pat_resolution / 2.0, pat_resolution / 2.0,
                                             pat_resolution / 4.0};
                spec.roi_cell_size = 1;
                spec.ring_growth = pat_growth;
                spec.max_cell_size =
                    pat_max_cell > 0 ? pat_max_cell : gb::default_max_cell_size(pat_resolution);
                retina = spec;
            }
            int count = pat_count;
            if (count <= 0) {
                if (!schedule)
                    throw std::runtime_error("--count is required for this family");
                count = schedule->total_patterns();
            }
            const auto sequence = gb::generate_sequence(*family, pat_resolution, count, schedule,
                                                        retina, pat_seed);
            gb::write_pattern_stack(sequence, pat_out);
            std::cout << "wrote " << sequence.count() << " patterns to " << pat_out << "\n";
        } else if (measure_cmd->parsed()) {
            const auto sequence = gb::read_pattern_stack(meas_stack);
            const auto object = gb::load_object(meas_object, sequence.width);
            const auto measurements =
                gb::measure(object, sequence, {meas_mu, meas_sigma, meas_noise_seed});
            gb::write_intensities_csv(measurements, meas_out);
            std::cout << "wrote " << measurements.count() << " intensities to " << meas_out
                      << "\n";
        } else if (recon_cmd->parsed()) {
            const auto sequence = gb::read_pattern_stack(rec_stack);
            const auto intensities = gb::read_intensities_csv(rec_csv);
            if (rec_correlation) {
                gb::save_image(gb::solve_correlation(sequence, intensities), rec_out, 8);
                std::cout << "wrote correlation baseline to " << rec_out << "\n";
            } else {
                gb::MeasurementSet measurements;
                measurements.intensities = intensities;
                gb::TvProblem problem;
                problem.patterns = &sequence;
                problem.measurements = &measurements;
                problem.width = sequence.width;
                problem.height = sequence.height;
                problem.fidelity_weight = rec_fw;
                problem.penalty_weight = rec_pw;
                problem.tolerance = rec_tol;
                problem.max_iterations = rec_iters;
                problem.cg_max_iterations = rec_cg;
                const auto solution = gb::solve_tv(problem);
                gb::save_image(solution.image, rec_out, 8);
                std::cout << "wrote TV reconstruction to " << rec_out << " ("
                          << solution.iterations_used << " sweeps, residual "
                          << solution.final_residual
                          << (solution.converged ? ", converged" : ", iteration cap") << ")\n";
            }
        } else if (exp_cmd->parsed() || sweep_cmd->parsed()) {
            const GridArgs& args = exp_cmd->parsed() ? exp_args : sweep_args;
            const auto config = resolve_config(args);
            const auto result =
                exp_cmd->parsed() ? gb::run_experiment(config) : gb::run_noise_sweep(config);
            gb::emit_reports(result, config.output_dir);
            print_summary(result);
            std::cout << "reports in " << config.output_dir << "\n";
        } else if (scaling_cmd->parsed()) {
            auto config = resolve_config(scaling_args);
            int res_a = 0, res_b = 0;
            char sep = 0;
            std::istringstream in(scaling_resolutions);
            if (!(in >> res_a >> sep >> res_b) || sep != ',')
                throw std::runtime_error("--resolutions wants two values, e.g. 32,64");
            const auto report = gb::run_resolution_scaling(config, res_a, res_b);
            gb::emit_scaling_reports(report, config.output_dir);
            for (const auto& delta : report.deltas)
                std::cout << "res " << delta.resolution << " T=" << delta.measurement_count
                          << " delta_psnr_roi=" << delta.delta_psnr_roi_db << " dB\n";
            std::cout << "reports in " << config.output_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
