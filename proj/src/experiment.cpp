#include "ghostbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ghostbench/forward.hpp"
#include "ghostbench/image_io.hpp"
#include "ghostbench/pattern_io.hpp"
#include "ghostbench/rng.hpp"
#include "ghostbench/schedule.hpp"
#include "ghostbench/test_objects.hpp"

namespace ghostbench {

namespace fs = std::filesystem;

const char* method_name(Method method) {
    switch (method) {
        case Method::ucgi: return "UCGI";
        case Method::tvcgi: return "TVCGI";
        case Method::svcgi: return "SVCGI";
        case Method::tsvcgi: return "TSVCGI";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "UCGI" || name == "ucgi") return Method::ucgi;
    if (name == "TVCGI" || name == "tvcgi") return Method::tvcgi;
    if (name == "SVCGI" || name == "svcgi") return Method::svcgi;
    if (name == "TSVCGI" || name == "tsvcgi") return Method::tsvcgi;
    return std::nullopt;
}

RoiSpec effective_roi(const ExperimentConfig& config) {
    if (config.roi) return *config.roi;
    const double m = config.actual_resolution;
    return RoiSpec{m / 2.0, m / 2.0, m / 4.0};
}

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool needs_schedule(Method m) { return m == Method::tvcgi || m == Method::tsvcgi; }
bool needs_retina(Method m) { return m == Method::svcgi || m == Method::tsvcgi; }

RetinaSpec base_retina(const ExperimentConfig& config) {
    RetinaSpec spec;
    spec.roi = effective_roi(config);
    spec.roi_cell_size = 1;
    spec.ring_growth = config.ring_growth;
    spec.max_cell_size = config.max_cell_size > 0 ? config.max_cell_size
                                                  : default_max_cell_size(config.actual_resolution);
    return spec;
}

int env_thread_cap() {
    if (const char* env = std::getenv("GHOSTBENCH_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 0;
}

int resolve_workers(const ExperimentConfig& config, std::size_t rows) {
    int workers = config.workers > 0 ? config.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (const int cap = env_thread_cap(); cap > 0) workers = std::min(workers, cap);
    return static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(rows, 1)));
}

struct RowSpec {
    Method method;
    int count;
    double sigma;
    int sigma_index;
    std::uint64_t seed;
};

PatternSequence build_sequence(const ExperimentConfig& config, Method method, int count,
                               std::uint64_t pattern_seed) {
    const int m = config.actual_resolution;
    std::optional<Schedule> schedule;
    std::optional<RetinaSpec> retina;
    if (needs_schedule(method)) schedule = build_schedule(m, config.lowest_resolution);
    if (needs_retina(method)) retina = base_retina(config);
    PatternFamily family = PatternFamily::uniform;
    switch (method) {
        case Method::ucgi: family = PatternFamily::uniform; break;
        case Method::tvcgi: family = PatternFamily::temporal; break;
        case Method::svcgi: family = PatternFamily::spatial; break;
        case Method::tsvcgi: family = PatternFamily::tsv; break;
    }
    return generate_sequence(family, m, count, schedule, retina, pattern_seed);
}

ExperimentResult run_grid(const ExperimentConfig& config) {
    validate_config(config);
    const Image object = load_object(config.object_path, config.actual_resolution);
    const RoiSpec roi = effective_roi(config);
    const double mean_signal = [&] {
        double sum = 0.0;
        for (double v : object.data) sum += v;
        return 0.5 * sum; // expected bucket intensity under fair binary patterns
    }();

    std::vector<RowSpec> specs;
    for (Method method : config.methods)
        for (int count : config.measurement_counts)
            for (std::size_t s = 0; s < config.noise_sigmas.size(); ++s)
                for (std::uint64_t seed : config.seeds)
                    specs.push_back({method, count, config.noise_sigmas[s],
                                     static_cast<int>(s), seed});

    ExperimentResult result;
    result.config = config;
    result.rows.resize(specs.size());
    std::vector<std::pair<std::string, PatternSequence>> stacks;
    std::mutex stacks_mutex;

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= specs.size()) return;
            try {
                const RowSpec& spec = specs[idx];
                const auto t0 = std::chrono::steady_clock::now();

                const std::uint64_t pattern_seed = derive_seed(spec.seed, "patterns");
                const std::uint64_t noise_seed = derive_seed(
                    derive_seed(spec.seed, "noise"), "sigma/" + std::to_string(spec.sigma_index));

                PatternSequence seq =
                    build_sequence(config, spec.method, spec.count, pattern_seed);

                NoiseModel noise;
                noise.seed = noise_seed;
                noise.std_dev = config.sigma_mode == SigmaMode::absolute
                                    ? spec.sigma
                                    : spec.sigma * mean_signal;
                const MeasurementSet measurements = measure(object, seq, noise);

                TvProblem problem;
                problem.patterns = &seq;
                problem.measurements = &measurements;
                problem.width = object.width;
                problem.height = object.height;
                problem.fidelity_weight = config.solver.fidelity_weight;
                problem.penalty_weight = config.solver.penalty_weight;
                problem.tolerance = config.solver.tolerance;
                problem.max_iterations = config.solver.max_iterations;
                problem.cg_max_iterations = config.solver.cg_max_iterations;
                problem.isotropic = config.solver.isotropic;
                TvSolution solution = solve_tv(problem);

                ResultRow row;
                row.method = spec.method;
                row.measurement_count = spec.count;
                row.sigma = spec.sigma;
                row.seed = spec.seed;
                row.psnr_full_db = psnr(object, solution.image).psnr_db;
                row.psnr_roi_db = psnr(object, solution.image, roi).psnr_db;
                row.mse = mse(object, solution.image);
                row.iterations = solution.iterations_used;
                row.reconstruction = std::move(solution.image);
                row.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                result.rows[idx] = std::move(row);

                if (config.emit_stacks && spec.sigma_index == 0) {
                    std::ostringstream name;
                    name << method_name(spec.method) << "_T" << spec.count << "_seed" << spec.seed
                         << ".gpat";
                    std::lock_guard<std::mutex> lock(stacks_mutex);
                    stacks.emplace_back(name.str(), std::move(seq));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int workers = resolve_workers(config, specs.size());
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    // Deterministic stack order regardless of worker scheduling.
    std::sort(stacks.begin(), stacks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    result.stacks = std::move(stacks);
    return result;
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

void validate_config(const ExperimentConfig& config) {
    if (config.methods.empty()) throw std::invalid_argument("config: no methods selected");
    if (config.measurement_counts.empty())
        throw std::invalid_argument("config: no measurement counts");
    if (config.seeds.empty()) throw std::invalid_argument("config: no seeds");
    if (config.noise_sigmas.empty()) throw std::invalid_argument("config: no noise sigmas");
    if (config.actual_resolution < 4)
        throw std::invalid_argument("config: actual resolution too small");
    for (int count : config.measurement_counts)
        if (count < 1) throw std::invalid_argument("config: measurement count must be >= 1");
    for (double sigma : config.noise_sigmas)
        if (sigma < 0.0) throw std::invalid_argument("config: sigma must be >= 0");
    if (!(config.ring_growth > 1.0))
        throw std::invalid_argument("config: ring_growth must be > 1");

    const bool scheduled = std::any_of(config.methods.begin(), config.methods.end(),
                                       [](Method m) { return needs_schedule(m); });
    if (scheduled) {
        const Schedule schedule =
            build_schedule(config.actual_resolution, config.lowest_resolution); // throws if bad
        for (int count : config.measurement_counts)
            if (count > schedule.total_patterns())
                throw std::invalid_argument(
                    "config: measurement count exceeds the schedule total (full sampling)");
    }
    const bool retina = std::any_of(config.methods.begin(), config.methods.end(),
                                    [](Method m) { return needs_retina(m); });
    if (retina)
        validate_retina_spec(base_retina(config), config.actual_resolution,
                             config.actual_resolution);
    validate_roi(effective_roi(config), config.actual_resolution, config.actual_resolution);
    if (!(config.solver.fidelity_weight > 0.0) || !(config.solver.penalty_weight > 0.0) ||
        !(config.solver.tolerance > 0.0) || config.solver.max_iterations < 1 ||
        config.solver.cg_max_iterations < 1)
        throw std::invalid_argument("config: bad solver settings");
}

ExperimentResult run_experiment(const ExperimentConfig& config) { return run_grid(config); }

ExperimentResult run_noise_sweep(const ExperimentConfig& config) {
    if (config.noise_sigmas.empty())
        throw std::invalid_argument("noise sweep: sigma list must be non-empty");
    return run_grid(config);
}

ScalingReport run_resolution_scaling(const ExperimentConfig& config, int resolution_a,
                                     int resolution_b) {
    if (config.noise_sigmas.size() != 1)
        throw std::invalid_argument("scaling: exactly one sigma expected");
    ScalingReport report;
    for (int resolution : {resolution_a, resolution_b}) {
        ExperimentConfig scaled = config;
        scaled.actual_resolution = resolution;
        scaled.methods = {Method::ucgi, Method::tsvcgi};
        if (config.roi) {
            const double factor =
                static_cast<double>(resolution) / config.actual_resolution;
            scaled.roi = RoiSpec{config.roi->center_x * factor, config.roi->center_y * factor,
                                 config.roi->radius * factor};
        }
        scaled.max_cell_size = 0; // track the per-resolution default
        report.per_resolution.push_back(run_grid(scaled));
    }

    for (std::size_t r = 0; r < report.per_resolution.size(); ++r) {
        const ExperimentResult& res = report.per_resolution[r];
        for (int count : res.config.measurement_counts) {
            std::vector<double> diffs;
            for (std::uint64_t seed : res.config.seeds) {
                double ucgi = 0.0, tsv = 0.0;
                for (const ResultRow& row : res.rows) {
                    if (row.measurement_count != count || row.seed != seed) continue;
                    if (row.method == Method::ucgi) ucgi = row.psnr_roi_db;
                    if (row.method == Method::tsvcgi) tsv = row.psnr_roi_db;
                }
                diffs.push_back(tsv - ucgi);
            }
            report.deltas.push_back(
                {res.config.actual_resolution, count, median(std::move(diffs))});
        }
    }
    return report;
}

void emit_reports(const ExperimentResult& result, const std::string& output_dir) {
    if (result.rows.empty()) throw std::invalid_argument("emit_reports: empty result");
    fs::create_directories(output_dir);
    const fs::path dir(output_dir);

    {
        std::ofstream csv(dir / "results.csv");
        if (!csv) throw std::runtime_error(output_dir + ": cannot write results.csv");
        csv << "method,T,sigma,seed,psnr_full_db,psnr_roi_db,mse,iterations,wall_ms\n";
        for (const ResultRow& row : result.rows) {
            csv << method_name(row.method) << "," << row.measurement_count << ","
                << format_double(row.sigma) << "," << row.seed << ","
                << format_double(row.psnr_full_db) << "," << format_double(row.psnr_roi_db) << ","
                << format_double(row.mse) << "," << row.iterations << ","
                << format_double(row.wall_ms) << "\n";
        }
    }

    for (const ResultRow& row : result.rows) {
        std::ostringstream name;
        name << method_name(row.method) << "_T" << row.measurement_count << "_s"
             << format_double(row.sigma) << "_seed" << row.seed << ".pgm";
        save_image(row.reconstruction, (dir / name.str()).string(), 8);
    }

    for (const auto& [name, sequence] : result.stacks)
        write_pattern_stack(sequence, (dir / name).string());

    write_config(result.config, (dir / "manifest.txt").string());
}

void emit_scaling_reports(const ScalingReport& report, const std::string& output_dir) {
    fs::create_directories(output_dir);
    const fs::path dir(output_dir);
    for (const ExperimentResult& result : report.per_resolution) {
        std::ostringstream sub;
        sub << "res_" << result.config.actual_resolution;
        emit_reports(result, (dir / sub.str()).string());
    }
    std::ofstream csv(dir / "delta_psnr.csv");
    if (!csv) throw std::runtime_error(output_dir + ": cannot write delta_psnr.csv");
    csv << "resolution,T,delta_psnr_roi_db\n";
    for (const ScalingDelta& delta : report.deltas)
        csv << delta.resolution << "," << delta.measurement_count << ","
            << format_double(delta.delta_psnr_roi_db) << "\n";
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        const auto end = item.find_last_not_of(" \t");
        if (begin != std::string::npos) parts.push_back(item.substr(begin, end - begin + 1));
    }
    return parts;
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean value for '" + key + "': " + value);
}

} // namespace

namespace {

bool apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "object") {
        config.object_path = value;
    } else if (key == "resolution") {
        config.actual_resolution = static_cast<int>(parse_int(value, key));
    } else if (key == "methods") {
        config.methods.clear();
        for (const std::string& name : split_list(value)) {
            const auto method = method_from_name(name);
            if (!method) throw std::invalid_argument("config: unknown method '" + name + "'");
            config.methods.push_back(*method);
        }
    } else if (key == "counts") {
        config.measurement_counts.clear();
        for (const std::string& item : split_list(value))
            config.measurement_counts.push_back(static_cast<int>(parse_int(item, key)));
    } else if (key == "sigmas") {
        config.noise_sigmas.clear();
        for (const std::string& item : split_list(value))
            config.noise_sigmas.push_back(parse_double(item, key));
    } else if (key == "sigma_mode") {
        if (value == "absolute") config.sigma_mode = SigmaMode::absolute;
        else if (value == "relative") config.sigma_mode = SigmaMode::relative_mean_signal;
        else throw std::invalid_argument("config: sigma_mode must be absolute|relative");
    } else if (key == "roi") {
        const auto parts = split_list(value);
        if (parts.size() != 3) throw std::invalid_argument("config: roi wants cx,cy,r");
        config.roi = RoiSpec{parse_double(parts[0], key), parse_double(parts[1], key),
                             parse_double(parts[2], key)};
    } else if (key == "m1") {
        config.lowest_resolution = static_cast<int>(parse_int(value, key));
    } else if (key == "ring_growth") {
        config.ring_growth = parse_double(value, key);
    } else if (key == "max_cell") {
        config.max_cell_size = static_cast<int>(parse_int(value, key));
    } else if (key == "seeds") {
        config.seeds.clear();
        for (const std::string& item : split_list(value))
            config.seeds.push_back(static_cast<std::uint64_t>(parse_int(item, key)));
    } else if (key == "out") {
        config.output_dir = value;
    } else if (key == "workers") {
        config.workers = static_cast<int>(parse_int(value, key));
    } else if (key == "emit_stacks") {
        config.emit_stacks = parse_bool(value, key);
    } else if (key == "fidelity_weight") {
        config.solver.fidelity_weight = parse_double(value, key);
    } else if (key == "penalty_weight") {
        config.solver.penalty_weight = parse_double(value, key);
    } else if (key == "tolerance") {
        config.solver.tolerance = parse_double(value, key);
    } else if (key == "max_iterations") {
        config.solver.max_iterations = static_cast<int>(parse_int(value, key));
    } else if (key == "cg_max_iterations") {
        config.solver.cg_max_iterations = static_cast<int>(parse_int(value, key));
    } else if (key == "isotropic") {
        config.solver.isotropic = parse_bool(value, key);
    } else if (key == "toolkit_version") {
        // manifest provenance, informational
    } else {
        return false;
    }
    return true;
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    ExperimentConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!apply_config_entry(config, key, value))
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown key '" +
                                     key + "'");
    }
    return config;
}

void write_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write config");
    out << "# ghostbench run manifest\n";
    out << "toolkit_version = " << kToolkitVersion << "\n";
    out << "object = " << config.object_path << "\n";
    out << "resolution = " << config.actual_resolution << "\n";
    out << "methods = ";
    for (std::size_t i = 0; i < config.methods.size(); ++i)
        out << (i ? "," : "") << method_name(config.methods[i]);
    out << "\n";
    out << "counts = ";
    for (std::size_t i = 0; i < config.measurement_counts.size(); ++i)
        out << (i ? "," : "") << config.measurement_counts[i];
    out << "\n";
    out << "sigmas = ";
    for (std::size_t i = 0; i < config.noise_sigmas.size(); ++i)
        out << (i ? "," : "") << format_double(config.noise_sigmas[i]);
    out << "\n";
    out << "sigma_mode = "
        << (config.sigma_mode == SigmaMode::absolute ? "absolute" : "relative") << "\n";
    if (config.roi)
        out << "roi = " << format_double(config.roi->center_x) << ","
            << format_double(config.roi->center_y) << "," << format_double(config.roi->radius)
            << "\n";
    out << "m1 = " << config.lowest_resolution << "\n";
    out << "ring_growth = " << format_double(config.ring_growth) << "\n";
    out << "max_cell = " << config.max_cell_size << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < config.seeds.size(); ++i) out << (i ? "," : "") << config.seeds[i];
    out << "\n";
    out << "out = " << config.output_dir << "\n";
    out << "workers = " << config.workers << "\n";
    out << "emit_stacks = " << (config.emit_stacks ? "true" : "false") << "\n";
    out << "fidelity_weight = " << format_double(config.solver.fidelity_weight) << "\n";
    out << "penalty_weight = " << format_double(config.solver.penalty_weight) << "\n";
    out << "tolerance = " << format_double(config.solver.tolerance) << "\n";
    out << "max_iterations = " << config.solver.max_iterations << "\n";
    out << "cg_max_iterations = " << config.solver.cg_max_iterations << "\n";
    out << "isotropic = " << (config.solver.isotropic ? "true" : "false") << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace ghostbench
