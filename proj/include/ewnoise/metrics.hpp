#ifndef EWNOISE_METRICS_HPP
#define EWNOISE_METRICS_HPP

#include <span>
#include <utility>

#include "ewnoise/raster.hpp"

namespace ewnoise {

/// sqrt(MSE(pred, ref)) / (max(ref) - min(ref)).
/// Throws Error{DegenerateRange} when ref is constant.
double nrmse(std::span<const double> pred, std::span<const double> ref);
double nrmse(const SceneRaster& pred, const SceneRaster& ref);

/// 10 log10(peak^2 / MSE), +infinity when the images are identical.
/// peak <= 0 selects the maximum of ref.
double psnr(const SceneRaster& pred, const SceneRaster& ref, double peak = 0.0);

/// Mean local SSIM over all complete sliding windows, uniform weighting,
/// c1 = (0.01 r)^2, c2 = (0.03 r)^2, unbiased sample (co)variances.
/// dynamic_range <= 0 selects max(ref) - min(ref).
double ssim(const SceneRaster& pred, const SceneRaster& ref, int window = 7,
            double dynamic_range = 0.0);

// Evaluation sub-region: rows of open water spanning the full range extent.
struct OceanStrip {
    int first_row = 0, last_row = 0;
    int first_col = 0, last_col = 0;
};

/// NRMSE of the strip's mean range profile against its own least-squares
/// line, normalized by the profile's range; a perfectly flat profile
/// scores 0 by convention.
double ocean_flatness_nrmse(const SceneRaster& denoised, const OceanStrip& strip);

/// Mean range profile xi(j) of the strip and its linear fit, for plotting.
struct FlatnessProfile {
    std::vector<int> cols; // columns with at least one usable cell
    std::vector<double> xi;
    std::vector<double> fit;
};
FlatnessProfile flatness_profile(const SceneRaster& denoised, const OceanStrip& strip);

struct TTestResult {
    double t = 0.0;
    double p = 0.0; // P(T_{n-1} <= t): alternative mean(a - b) < 0
};

/// Paired one-tailed t-test of H1: mean(a - b) < 0. Throws
/// Error{DegenerateVariance} when all differences are identical.
TTestResult paired_t_test_one_tailed(std::span<const double> a, std::span<const double> b);

/// CDF of Student's t distribution (regularized incomplete beta expansion).
double student_t_cdf(double t, double dof);

} // namespace ewnoise

#endif
