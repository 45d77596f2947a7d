#include "ewnoise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ewnoise/error.hpp"

namespace ewnoise {

namespace {

void require_same_shape(const SceneRaster& a, const SceneRaster& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw Error(ErrorKind::ShapeMismatch,
                    std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
                        std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

double mse(std::span<const double> pred, std::span<const double> ref) {
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - ref[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pred.size());
}

// Continued fraction for the regularized incomplete beta function
// (modified Lentz iteration).
double ibeta_cf(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-14;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double regularized_ibeta(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * ibeta_cf(a, b, x) / a;
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

} // namespace

double nrmse(std::span<const double> pred, std::span<const double> ref) {
    if (pred.size() != ref.size() || ref.size() < 2)
        throw Error(ErrorKind::ShapeMismatch, "sequences must have equal length >= 2");
    auto [mn, mx] = std::minmax_element(ref.begin(), ref.end());
    if (*mx <= *mn)
        throw Error(ErrorKind::DegenerateRange, "reference sequence is constant");
    return std::sqrt(mse(pred, ref)) / (*mx - *mn);
}

double nrmse(const SceneRaster& pred, const SceneRaster& ref) {
    require_same_shape(pred, ref);
    std::vector<double> p(pred.values.begin(), pred.values.end());
    std::vector<double> r(ref.values.begin(), ref.values.end());
    return nrmse(std::span<const double>(p), std::span<const double>(r));
}

double psnr(const SceneRaster& pred, const SceneRaster& ref, double peak) {
    require_same_shape(pred, ref);
    if (peak <= 0.0)
        peak = *std::max_element(ref.values.begin(), ref.values.end());
    double sum = 0.0;
    for (size_t i = 0; i < ref.values.size(); ++i) {
        double d = static_cast<double>(pred.values[i]) - ref.values[i];
        sum += d * d;
    }
    double m = sum / static_cast<double>(ref.values.size());
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / m);
}

double ssim(const SceneRaster& pred, const SceneRaster& ref, int window,
            double dynamic_range) {
    require_same_shape(pred, ref);
    if (window < 1 || window % 2 == 0)
        throw Error(ErrorKind::InvariantViolation, "SSIM window must be odd and positive");
    if (pred.rows < window || pred.cols < window)
        throw Error(ErrorKind::ShapeMismatch, "image smaller than SSIM window");
    if (dynamic_range <= 0.0) {
        auto [mn, mx] = std::minmax_element(ref.values.begin(), ref.values.end());
        dynamic_range = static_cast<double>(*mx) - static_cast<double>(*mn);
    }
    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);

    const int rows = pred.rows, cols = pred.cols;
    const size_t stride = static_cast<size_t>(cols) + 1;
    // Summed-area tables for x, y, x^2, y^2, xy.
    std::vector<double> sx(stride * (rows + 1), 0.0), sy(sx), sxx(sx), syy(sx), sxy(sx);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const size_t idx = static_cast<size_t>(i) * cols + j;
            const double x = pred.values[idx];
            const double y = ref.values[idx];
            const size_t p = static_cast<size_t>(i + 1) * stride + (j + 1);
            const size_t up = p - stride, left = p - 1, diag = up - 1;
            sx[p] = x + sx[up] + sx[left] - sx[diag];
            sy[p] = y + sy[up] + sy[left] - sy[diag];
            sxx[p] = x * x + sxx[up] + sxx[left] - sxx[diag];
            syy[p] = y * y + syy[up] + syy[left] - syy[diag];
            sxy[p] = x * y + sxy[up] + sxy[left] - sxy[diag];
        }
    }
    auto box = [&stride](const std::vector<double>& s, int i0, int j0, int w) {
        const size_t a = static_cast<size_t>(i0) * stride + j0;
        const size_t b = static_cast<size_t>(i0 + w) * stride + (j0 + w);
        const size_t c = static_cast<size_t>(i0) * stride + (j0 + w);
        const size_t d = static_cast<size_t>(i0 + w) * stride + j0;
        return s[b] + s[a] - s[c] - s[d];
    };

    const double np = static_cast<double>(window) * window;
    const double cov_norm = np / (np - 1.0); // unbiased sample (co)variance
    double total = 0.0;
    long n_windows = 0;
    for (int i = 0; i + window <= rows; ++i) {
        for (int j = 0; j + window <= cols; ++j) {
            const double ux = box(sx, i, j, window) / np;
            const double uy = box(sy, i, j, window) / np;
            const double vx = cov_norm * (box(sxx, i, j, window) / np - ux * ux);
            const double vy = cov_norm * (box(syy, i, j, window) / np - uy * uy);
            const double vxy = cov_norm * (box(sxy, i, j, window) / np - ux * uy);
            const double a1 = 2.0 * ux * uy + c1;
            const double a2 = 2.0 * vxy + c2;
            const double b1 = ux * ux + uy * uy + c1;
            const double b2 = vx + vy + c2;
            total += (a1 * a2) / (b1 * b2);
            ++n_windows;
        }
    }
    return total / static_cast<double>(n_windows);
}

FlatnessProfile flatness_profile(const SceneRaster& denoised, const OceanStrip& strip) {
    if (strip.first_row < 0 || strip.last_row >= denoised.rows ||
        strip.first_col < 0 || strip.last_col >= denoised.cols ||
        strip.first_row > strip.last_row || strip.first_col > strip.last_col)
        throw Error(ErrorKind::GeometryMismatch, "ocean strip outside scene bounds");

    FlatnessProfile profile;
    for (int j = strip.first_col; j <= strip.last_col; ++j) {
        double sum = 0.0;
        long count = 0;
        for (int i = strip.first_row; i <= strip.last_row; ++i) {
            if (!denoised.is_valid(i, j)) continue;
            sum += denoised.at(i, j);
            ++count;
        }
        if (count == 0) continue;
        profile.xi.push_back(sum / count);
        profile.cols.push_back(j);
    }
    if (profile.xi.size() < 2)
        throw Error(ErrorKind::DegenerateRange, "ocean strip has fewer than 2 usable columns");

    // Ordinary least-squares line xi_hat(j) = alpha + beta j.
    const size_t n = profile.xi.size();
    double sum_j = 0.0, sum_v = 0.0, sum_jj = 0.0, sum_jv = 0.0;
    for (size_t idx = 0; idx < n; ++idx) {
        const double j = profile.cols[idx];
        sum_j += j;
        sum_v += profile.xi[idx];
        sum_jj += j * j;
        sum_jv += j * profile.xi[idx];
    }
    const double denom = n * sum_jj - sum_j * sum_j;
    double beta = denom != 0.0 ? (n * sum_jv - sum_j * sum_v) / denom : 0.0;
    double alpha = (sum_v - beta * sum_j) / static_cast<double>(n);
    profile.fit.resize(n);
    for (size_t idx = 0; idx < n; ++idx)
        profile.fit[idx] = alpha + beta * profile.cols[idx];
    return profile;
}

double ocean_flatness_nrmse(const SceneRaster& denoised, const OceanStrip& strip) {
    FlatnessProfile profile = flatness_profile(denoised, strip);
    auto [mn, mx] = std::minmax_element(profile.xi.begin(), profile.xi.end());
    if (*mx <= *mn) return 0.0; // perfectly flat profile is the ideal
    return std::sqrt(mse(profile.fit, profile.xi)) / (*mx - *mn);
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw Error(ErrorKind::InvariantViolation, "dof must be positive");
    const double x = dof / (t * t + dof);
    const double half_tail = 0.5 * regularized_ibeta(x, dof / 2.0, 0.5);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

TTestResult paired_t_test_one_tailed(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw Error(ErrorKind::ShapeMismatch, "paired samples must have equal length >= 2");
    const size_t n = a.size();
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    if (ss == 0.0)
        throw Error(ErrorKind::DegenerateVariance, "all paired differences are identical");
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    TTestResult result;
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p = student_t_cdf(result.t, static_cast<double>(n - 1));
    return result;
}

} // namespace ewnoise
