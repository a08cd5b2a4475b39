#ifndef GHOSTBENCH_RECON_HPP
#define GHOSTBENCH_RECON_HPP

#include <vector>

#include "ghostbench/forward.hpp"
#include "ghostbench/image.hpp"
#include "ghostbench/pattern.hpp"

namespace ghostbench {

/// Discrete image gradient: forward differences with replicate (Neumann)
/// boundary, so the last column of dx and last row of dy are zero.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> dx;
    std::vector<double> dy;
};

GradientField gradient_apply(const Image& image);

/// Exact discrete adjoint of gradient_apply: <Gu, v> = <u, G^T v> for all
/// u, v. Returns an image-shaped array (not clipped to [0,1]).
std::vector<double> gradient_adjoint(const GradientField& field);

/// Total-variation reconstruction problem. The hard constraints of the
/// measurement model are relaxed to a quadratic fidelity term:
///   minimize ||G O||_1 + (fidelity_weight/2) ||S O - I||_2^2
/// solved by alternating soft-thresholding on the split gradient variable
/// with conjugate-gradient sweeps on the quadratic subproblem.
struct TvProblem {
    const PatternSequence* patterns = nullptr;
    const MeasurementSet* measurements = nullptr;
    int width = 0;
    int height = 0;
    double fidelity_weight = 128.0; // 2^7
    double penalty_weight = 32.0;   // 2^5, splitting penalty beta
    int max_iterations = 300;       // outer sweeps
    double tolerance = 1e-4;        // relative iterate change
    int cg_max_iterations = 40;
    double cg_tolerance = 1e-8;
    bool isotropic = false; // default anisotropic, l1 of stacked x/y differences
};

struct TvSolution {
    Image image; // clipped to [0,1] on output
    int iterations_used = 0;
    double final_residual = 0.0; // ||S O' - I'|| / ||I'||
    bool converged = false;
    /// Internal objective after each outer sweep; non-increasing by
    /// construction (exact shrinkage + monotone CG on the quadratic).
    std::vector<double> objective_trace;
};

/// Solves the TV problem. Internally the measurement operator is
/// mean-centered and scale-normalized (with a separate row pinning the DC
/// term) to condition the quadratic subproblem; the change of variables is
/// exact for binary patterns and is undone on output. Throws on non-finite
/// intensities, count mismatches, or an all-empty pattern stack.
TvSolution solve_tv(const TvProblem& problem);

/// Second-order correlation image before rescaling:
///   mean_i(I_i S_i(x,y)) - mean(I) mean_i(S_i(x,y)).
/// Throws when T < 2 or every pattern is identical (zero variance).
std::vector<double> correlation_image_raw(const PatternSequence& sequence,
                                          const std::vector<double>& intensities);

/// Correlation baseline reconstruction, affinely rescaled to [0,1]
/// (a constant raw image maps to all zeros).
Image solve_correlation(const PatternSequence& sequence, const std::vector<double>& intensities);

} // namespace ghostbench

#endif
