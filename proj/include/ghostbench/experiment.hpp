#ifndef GHOSTBENCH_EXPERIMENT_HPP
#define GHOSTBENCH_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghostbench/image.hpp"
#include "ghostbench/pattern.hpp"
#include "ghostbench/recon.hpp"

namespace ghostbench {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Method { ucgi, tvcgi, svcgi, tsvcgi };
const char* method_name(Method method);
std::optional<Method> method_from_name(const std::string& name);

/// How noise_sigmas are interpreted: raw intensity units, or fractions of
/// the expected mean intensity (half the object mass), which makes sigma
/// choices transferable across resolutions.
enum class SigmaMode { absolute, relative_mean_signal };

struct SolverSettings {
    double fidelity_weight = 128.0;
    double penalty_weight = 32.0;
    double tolerance = 1e-4;
    int max_iterations = 300;
    int cg_max_iterations = 25;
    bool isotropic = false;
};

struct ExperimentConfig {
    std::string object_path = "peppers"; // builtin name or image file
    int actual_resolution = 64;
    std::vector<Method> methods;
    std::vector<int> measurement_counts;  // T values
    std::vector<double> noise_sigmas = {0.0};
    SigmaMode sigma_mode = SigmaMode::absolute;
    std::optional<RoiSpec> roi; // default: centered, radius M/4
    int lowest_resolution = 16; // m_1
    double ring_growth = 2.0;
    int max_cell_size = 0; // 0 -> M/8
    std::vector<std::uint64_t> seeds;
    SolverSettings solver;
    std::string output_dir = "out";
    int workers = 0; // 0 -> hardware; GHOSTBENCH_THREADS caps either way
    bool emit_stacks = false;
};

/// ROI actually used for pattern construction and metrics.
RoiSpec effective_roi(const ExperimentConfig& config);

/// Throws std::invalid_argument on an unsatisfiable configuration (empty
/// method/count/seed lists, bad schedule ladder, counts beyond full
/// sampling for scheduled families, invalid ROI, ...).
void validate_config(const ExperimentConfig& config);

struct ResultRow {
    Method method = Method::ucgi;
    int measurement_count = 0;
    double sigma = 0.0; // configured value (pre sigma_mode scaling)
    std::uint64_t seed = 0;
    double psnr_full_db = 0.0;
    double psnr_roi_db = 0.0;
    double mse = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    Image reconstruction;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    /// GPAT1 stacks to persist (first-sigma rows only), when emit_stacks.
    std::vector<std::pair<std::string, PatternSequence>> stacks;
};

/// Runs the full (method x T x sigma x seed) grid. Pattern and noise seeds
/// derive from each row seed by fixed-label hashing, so every row is
/// independently reproducible; rows run in parallel across workers.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Same grid; requires a non-empty sigma list. A sigma = 0 row is
/// bit-identical to the corresponding run_experiment row.
ExperimentResult run_noise_sweep(const ExperimentConfig& config);

struct ScalingDelta {
    int resolution = 0;
    int measurement_count = 0;
    double delta_psnr_roi_db = 0.0; // median over seeds of TSVCGI - UCGI
};

struct ScalingReport {
    std::vector<ExperimentResult> per_resolution;
    std::vector<ScalingDelta> deltas;
};

/// UCGI vs TSVCGI at two actual resolutions with matched T values; emits
/// the per-resolution grids plus the median ROI-PSNR difference table.
ScalingReport run_resolution_scaling(const ExperimentConfig& config, int resolution_a,
                                     int resolution_b);

/// Writes results.csv (stable column order), per-row reconstruction PGMs,
/// optional GPAT1 stacks, and a manifest that reproduces the run.
void emit_reports(const ExperimentResult& result, const std::string& output_dir);

/// Per-resolution reports under res_<M>/ plus delta_psnr.csv.
void emit_scaling_reports(const ScalingReport& report, const std::string& output_dir);

/// Flat "key = value" config file with '#' comments. Unknown keys are
/// rejected; every key has a CLI flag that overrides it.
ExperimentConfig load_config(const std::string& path);
void write_config(const ExperimentConfig& config, const std::string& path);

} // namespace ghostbench

#endif
