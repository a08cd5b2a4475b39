#include "ghostbench/recon.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace ghostbench {

namespace {

void grad_forward(int w, int h, const double* img, double* dx, double* dy) {
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w - 1; ++x) dx[row + x] = img[row + x + 1] - img[row + x];
        dx[row + w - 1] = 0.0;
    }
    for (int y = 0; y < h - 1; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) dy[row + x] = img[row + w + x] - img[row + x];
    }
    std::memset(dy + static_cast<std::size_t>(h - 1) * w, 0, sizeof(double) * w);
}

void grad_adjoint(int w, int h, const double* dx, const double* dy, double* out) {
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double v = 0.0;
            if (x > 0) v += dx[row + x - 1];
            if (x < w - 1) v -= dx[row + x];
            if (y > 0) v += dy[row - w + x];
            if (y < h - 1) v -= dy[row + x];
            out[row + x] = v;
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Dense float view of the centered, scale-normalized measurement operator.
// Row T (when present) pins the DC component lost to centering.
struct DataOperator {
    int rows = 0;
    int cols = 0;
    std::vector<float> a; // row-major
    std::vector<double> b;

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        y.resize(rows);
        for (int i = 0; i < rows; ++i) {
            const float* row = a.data() + static_cast<std::size_t>(i) * cols;
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += static_cast<double>(row[j]) * x[j];
            y[i] = s;
        }
    }
    void apply_transposed(const std::vector<double>& y, std::vector<double>& x) const {
        x.assign(cols, 0.0);
        for (int i = 0; i < rows; ++i) {
            const float* row = a.data() + static_cast<std::size_t>(i) * cols;
            const double yi = y[i];
            if (yi == 0.0) continue;
            for (int j = 0; j < cols; ++j) x[j] += static_cast<double>(row[j]) * yi;
        }
    }
};

DataOperator build_data_operator(const PatternSequence& seq, const std::vector<double>& I) {
    const int T = seq.count();
    const int P = seq.width * seq.height;

    std::vector<double> mean_pattern(P, 0.0);
    for (const auto& pattern : seq.patterns)
        for (int y = 0; y < seq.height; ++y)
            for (int x = 0; x < seq.width; ++x)
                if (pattern.bit(x, y)) mean_pattern[static_cast<std::size_t>(y) * seq.width + x] += 1.0;
    double mean_norm_sq = 0.0;
    for (double& v : mean_pattern) {
        v /= T;
        mean_norm_sq += v * v;
    }
    if (mean_norm_sq == 0.0)
        throw std::runtime_error("solve_tv: unsolvable, every pattern is empty");

    // Centered-row energy; zero means all patterns are identical, in which
    // case the raw rows are used directly (no centering possible).
    double centered_sq = 0.0;
    for (const auto& pattern : seq.patterns)
        for (int y = 0; y < seq.height; ++y)
            for (int x = 0; x < seq.width; ++x) {
                const double d =
                    (pattern.bit(x, y) ? 1.0 : 0.0) - mean_pattern[static_cast<std::size_t>(y) * seq.width + x];
                centered_sq += d * d;
            }
    const bool centered = centered_sq > 0.0 && T >= 2;

    DataOperator op;
    op.cols = P;
    if (centered) {
        const double scale = 1.0 / std::sqrt(centered_sq / T);
        double mean_i = 0.0;
        for (double v : I) mean_i += v;
        mean_i /= T;

        op.rows = T + 1;
        op.a.resize(static_cast<std::size_t>(op.rows) * P);
        op.b.resize(op.rows);
        for (int i = 0; i < T; ++i) {
            float* row = op.a.data() + static_cast<std::size_t>(i) * P;
            const Pattern& pattern = seq.patterns[i];
            for (int y = 0; y < seq.height; ++y)
                for (int x = 0; x < seq.width; ++x) {
                    const std::size_t p = static_cast<std::size_t>(y) * seq.width + x;
                    row[p] = static_cast<float>(
                        ((pattern.bit(x, y) ? 1.0 : 0.0) - mean_pattern[p]) * scale);
                }
            op.b[i] = (I[i] - mean_i) * scale;
        }
        const double dc_scale = 1.0 / std::sqrt(mean_norm_sq);
        float* dc_row = op.a.data() + static_cast<std::size_t>(T) * P;
        for (int p = 0; p < P; ++p) dc_row[p] = static_cast<float>(mean_pattern[p] * dc_scale);
        op.b[T] = mean_i * dc_scale;
    } else {
        double raw_sq = 0.0;
        for (const auto& pattern : seq.patterns)
            for (int y = 0; y < seq.height; ++y)
                for (int x = 0; x < seq.width; ++x)
                    if (pattern.bit(x, y)) raw_sq += 1.0;
        const double scale = 1.0 / std::sqrt(raw_sq / T);
        op.rows = T;
        op.a.resize(static_cast<std::size_t>(op.rows) * P);
        op.b.resize(op.rows);
        for (int i = 0; i < T; ++i) {
            float* row = op.a.data() + static_cast<std::size_t>(i) * P;
            const Pattern& pattern = seq.patterns[i];
            for (int y = 0; y < seq.height; ++y)
                for (int x = 0; x < seq.width; ++x)
                    row[static_cast<std::size_t>(y) * seq.width + x] =
                        pattern.bit(x, y) ? static_cast<float>(scale) : 0.0f;
            op.b[i] = I[i] * scale;
        }
    }
    return op;
}

void shrink_anisotropic(const std::vector<double>& gx, const std::vector<double>& gy,
                        double threshold, std::vector<double>& dx, std::vector<double>& dy) {
    for (std::size_t i = 0; i < gx.size(); ++i) {
        dx[i] = std::copysign(std::max(0.0, std::abs(gx[i]) - threshold), gx[i]);
        dy[i] = std::copysign(std::max(0.0, std::abs(gy[i]) - threshold), gy[i]);
    }
}

void shrink_isotropic(const std::vector<double>& gx, const std::vector<double>& gy,
                      double threshold, std::vector<double>& dx, std::vector<double>& dy) {
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double m = std::hypot(gx[i], gy[i]);
        const double f = m > threshold ? (m - threshold) / m : 0.0;
        dx[i] = f * gx[i];
        dy[i] = f * gy[i];
    }
}

} // namespace

GradientField gradient_apply(const Image& image) {
    GradientField field;
    field.width = image.width;
    field.height = image.height;
    field.dx.resize(image.data.size());
    field.dy.resize(image.data.size());
    grad_forward(image.width, image.height, image.data.data(), field.dx.data(), field.dy.data());
    return field;
}

std::vector<double> gradient_adjoint(const GradientField& field) {
    if (field.dx.size() != static_cast<std::size_t>(field.width) * field.height ||
        field.dy.size() != field.dx.size())
        throw std::invalid_argument("gradient_adjoint: field dimensions mismatch");
    std::vector<double> out(field.dx.size());
    grad_adjoint(field.width, field.height, field.dx.data(), field.dy.data(), out.data());
    return out;
}

std::vector<double> correlation_image_raw(const PatternSequence& sequence,
                                          const std::vector<double>& intensities) {
    const int T = sequence.count();
    if (T < 2) throw std::invalid_argument("correlation: needs at least 2 measurements");
    if (intensities.size() != static_cast<std::size_t>(T))
        throw std::invalid_argument("correlation: intensity count mismatch");
    const std::size_t P = static_cast<std::size_t>(sequence.width) * sequence.height;

    bool any_difference = false;
    for (int i = 1; i < T && !any_difference; ++i)
        any_difference = sequence.patterns[i].bits != sequence.patterns[0].bits;
    if (!any_difference)
        throw std::invalid_argument("correlation: zero-variance (identical) pattern sequence");

    std::vector<double> weighted(P, 0.0), mean_pattern(P, 0.0);
    double mean_i = 0.0;
    for (int i = 0; i < T; ++i) {
        const Pattern& pattern = sequence.patterns[i];
        const double value = intensities[i];
        mean_i += value;
        for (int y = 0; y < sequence.height; ++y)
            for (int x = 0; x < sequence.width; ++x)
                if (pattern.bit(x, y)) {
                    const std::size_t p = static_cast<std::size_t>(y) * sequence.width + x;
                    weighted[p] += value;
                    mean_pattern[p] += 1.0;
                }
    }
    mean_i /= T;
    std::vector<double> out(P);
    for (std::size_t p = 0; p < P; ++p) out[p] = weighted[p] / T - mean_i * (mean_pattern[p] / T);
    return out;
}

Image solve_correlation(const PatternSequence& sequence, const std::vector<double>& intensities) {
    const std::vector<double> raw = correlation_image_raw(sequence, intensities);
    Image image(sequence.width, sequence.height);
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo)
        for (std::size_t p = 0; p < raw.size(); ++p) image.data[p] = (raw[p] - lo) / (hi - lo);
    return image; // constant raw covariance rescales to all zeros
}

TvSolution solve_tv(const TvProblem& problem) {
    if (!problem.patterns || !problem.measurements)
        throw std::invalid_argument("solve_tv: problem is missing patterns or measurements");
    const PatternSequence& seq = *problem.patterns;
    const std::vector<double>& I = problem.measurements->intensities;
    const int T = seq.count();
    const int w = problem.width > 0 ? problem.width : seq.width;
    const int h = problem.height > 0 ? problem.height : seq.height;
    if (w != seq.width || h != seq.height)
        throw std::invalid_argument("solve_tv: problem dimensions differ from the sequence");
    if (static_cast<int>(I.size()) != T)
        throw std::invalid_argument("solve_tv: measurement count != pattern count");
    if (T < 1) throw std::invalid_argument("solve_tv: empty measurement set");
    for (double v : I)
        if (!std::isfinite(v)) throw std::invalid_argument("solve_tv: non-finite intensity");
    if (!(problem.fidelity_weight > 0.0) || !(problem.penalty_weight > 0.0) ||
        !(problem.tolerance > 0.0))
        throw std::invalid_argument("solve_tv: weights and tolerance must be positive");

    const std::size_t P = static_cast<std::size_t>(w) * h;
    const double mu = problem.fidelity_weight;
    const double beta = problem.penalty_weight;
    const DataOperator op = build_data_operator(seq, I);

    // Initial iterate: the correlation baseline when available, else flat.
    std::vector<double> x(P, 0.5);
    if (T >= 2) {
        try {
            x = solve_correlation(seq, I).data;
        } catch (const std::invalid_argument&) {
            // degenerate baseline; keep the flat start
        }
    }

    std::vector<double> gx(P), gy(P), dx(P), dy(P);
    std::vector<double> atb(P), rhs(P), residual(P), direction(P), k_dir(P), scratch_rows;
    std::vector<double> grad_scratch(P);

    op.apply_transposed(op.b, atb);
    for (std::size_t j = 0; j < P; ++j) atb[j] *= mu;

    auto apply_k = [&](const std::vector<double>& in, std::vector<double>& out) {
        op.apply(in, scratch_rows);
        op.apply_transposed(scratch_rows, out);
        grad_forward(w, h, in.data(), gx.data(), gy.data());
        grad_adjoint(w, h, gx.data(), gy.data(), grad_scratch.data());
        for (std::size_t j = 0; j < P; ++j) out[j] = mu * out[j] + beta * grad_scratch[j];
    };

    auto shrink = problem.isotropic ? shrink_isotropic : shrink_anisotropic;

    grad_forward(w, h, x.data(), gx.data(), gy.data());
    shrink(gx, gy, 1.0 / beta, dx, dy);

    TvSolution solution;
    std::vector<double> x_prev(P);
    std::vector<double> rows_scratch;

    for (int outer = 0; outer < problem.max_iterations; ++outer) {
        x_prev = x;

        // rhs = mu A^T b + beta G^T d
        grad_adjoint(w, h, dx.data(), dy.data(), rhs.data());
        for (std::size_t j = 0; j < P; ++j) rhs[j] = atb[j] + beta * rhs[j];

        // Warm-started CG on (mu A^T A + beta G^T G) x = rhs. CG never
        // increases the quadratic, which keeps the outer objective monotone.
        apply_k(x, k_dir);
        for (std::size_t j = 0; j < P; ++j) residual[j] = rhs[j] - k_dir[j];
        direction = residual;
        double rho = dot(residual, residual);
        const double rhs_norm = std::max(norm2(rhs), 1e-300);
        for (int it = 0; it < problem.cg_max_iterations; ++it) {
            if (std::sqrt(rho) <= problem.cg_tolerance * rhs_norm) break;
            apply_k(direction, k_dir);
            const double denom = dot(direction, k_dir);
            if (denom <= 0.0) break; // numerically exhausted direction
            const double alpha = rho / denom;
            for (std::size_t j = 0; j < P; ++j) {
                x[j] += alpha * direction[j];
                residual[j] -= alpha * k_dir[j];
            }
            const double rho_next = dot(residual, residual);
            const double gamma = rho_next / rho;
            for (std::size_t j = 0; j < P; ++j) direction[j] = residual[j] + gamma * direction[j];
            rho = rho_next;
        }

        grad_forward(w, h, x.data(), gx.data(), gy.data());
        shrink(gx, gy, 1.0 / beta, dx, dy);

        // Internal objective: ||d||_1 + (beta/2)||Gx - d||^2 + (mu/2)||Ax - b||^2.
        double obj = 0.0;
        if (problem.isotropic) {
            for (std::size_t j = 0; j < P; ++j) obj += std::hypot(dx[j], dy[j]);
        } else {
            for (std::size_t j = 0; j < P; ++j) obj += std::abs(dx[j]) + std::abs(dy[j]);
        }
        double quad = 0.0;
        for (std::size_t j = 0; j < P; ++j) {
            const double ex = gx[j] - dx[j];
            const double ey = gy[j] - dy[j];
            quad += ex * ex + ey * ey;
        }
        obj += 0.5 * beta * quad;
        op.apply(x, rows_scratch);
        double data_sq = 0.0;
        for (int i = 0; i < op.rows; ++i) {
            const double e = rows_scratch[i] - op.b[i];
            data_sq += e * e;
        }
        obj += 0.5 * mu * data_sq;
        solution.objective_trace.push_back(obj);
        solution.iterations_used = outer + 1;

        double diff_sq = 0.0, prev_sq = 0.0;
        for (std::size_t j = 0; j < P; ++j) {
            const double d = x[j] - x_prev[j];
            diff_sq += d * d;
            prev_sq += x_prev[j] * x_prev[j];
        }
        if (std::sqrt(diff_sq) < problem.tolerance * std::max(std::sqrt(prev_sq), 1e-12)) {
            solution.converged = true;
            break;
        }
    }

    solution.image = Image(w, h);
    for (std::size_t j = 0; j < P; ++j) solution.image.data[j] = std::clamp(x[j], 0.0, 1.0);

    // Raw-system residual of the reported (clipped) image.
    double num = 0.0, den = 0.0;
    for (int i = 0; i < T; ++i) {
        double s = 0.0;
        const Pattern& pattern = seq.patterns[i];
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx)
                if (pattern.bit(xx, y)) s += solution.image.at(xx, y);
        const double e = s - I[i];
        num += e * e;
        den += I[i] * I[i];
    }
    solution.final_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return solution;
}

} // namespace ghostbench
