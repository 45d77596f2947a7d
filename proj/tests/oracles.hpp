#ifndef EWNOISE_TESTS_ORACLES_HPP
#define EWNOISE_TESTS_ORACLES_HPP

#include <cmath>
#include <vector>

#include "ewnoise/calibration.hpp"
#include "ewnoise/noise_field.hpp"
#include "ewnoise/objective.hpp"
#include "ewnoise/raster.hpp"

// Brute-force evaluations of the objective, written independently of the
// row-stacking implementation. Every term is summed directly from the raster
// and the field with plain per-pixel loops.
namespace oracles {

using namespace ewnoise;

struct OracleLineMeans {
    std::vector<double> x, y;
    std::vector<bool> valid;
};

inline OracleLineMeans line_means(const SceneRaster& raster, const NoiseField& field,
                                  int swath) {
    OracleLineMeans m;
    m.x.assign(field.rows, 0.0);
    m.y.assign(field.rows, 0.0);
    m.valid.assign(field.rows, false);
    for (int i = 0; i < field.rows; ++i) {
        double sx = 0.0, sy = 0.0;
        long n = 0;
        for (int j = 0; j < field.cols; ++j) {
            if (field.map.swath_of(i, j) != swath) continue;
            if (!raster.is_valid(i, j)) continue;
            sx += raster.at(i, j);
            sy += field.at(i, j);
            ++n;
        }
        if (n > 0) {
            m.x[i] = sx / n;
            m.y[i] = sy / n;
            m.valid[i] = true;
        }
    }
    return m;
}

inline double max_abs_field(const NoiseField& field) {
    double s = 0.0;
    for (double v : field.values) s = std::max(s, std::abs(v));
    return s;
}

inline double gate(double xd, double yd, double y_scale, double base,
                   const ObjectiveParams& p) {
    if (std::abs(yd) < 1e-12 * y_scale) return 0.0;
    double ratio = xd / yd;
    return (ratio > p.ratio_lo && ratio < p.ratio_hi) ? base : 0.0;
}

// Sum over subswaths and lines of [w(i) ((x(i)-x(i+rho)) - k_a (y(i)-y(i+rho)))]^2.
inline double azimuth_loss(const SceneRaster& raster, const NoiseField& field,
                           const ObjectiveParams& p, const Vec5& k) {
    const double y_scale = max_abs_field(field);
    double total = 0.0;
    for (int a = 0; a < kSwathCount; ++a) {
        if (!field.map.has_swath(a)) continue;
        OracleLineMeans m = line_means(raster, field, a);
        const int rho = field.half_period[a];
        for (int i = 0; i + rho < field.rows; ++i) {
            if (!m.valid[i] || !m.valid[i + rho]) continue;
            double xd = m.x[i] - m.x[i + rho];
            double yd = m.y[i] - m.y[i + rho];
            double w = gate(xd, yd, y_scale, 1.0, p);
            double r = w * (xd - k[a] * yd);
            total += r * r;
        }
    }
    return total;
}

struct OracleWindow {
    double x = 0.0, y = 0.0;
    bool ok = false;
};

inline OracleWindow window_mean(const SceneRaster& raster, const NoiseField& field,
                                const SubswathRectangle& rect, int col_lo, int col_hi,
                                double min_fraction) {
    OracleWindow out;
    const int i0 = std::max(0, rect.first_azimuth_line);
    const int i1 = std::min(field.rows - 1, rect.last_azimuth_line);
    const long nominal = static_cast<long>(i1 - i0 + 1) * (col_hi - col_lo + 1);
    const int c0 = std::max({col_lo, 0, rect.first_range_sample});
    const int c1 = std::min({col_hi, field.cols - 1, rect.last_range_sample});
    if (nominal <= 0 || c0 > c1) return out;
    double sx = 0.0, sy = 0.0;
    long n = 0;
    for (int i = i0; i <= i1; ++i)
        for (int j = c0; j <= c1; ++j) {
            if (!raster.is_valid(i, j)) continue;
            sx += raster.at(i, j);
            sy += field.at(i, j);
            ++n;
        }
    if (n == 0 || n < min_fraction * nominal) return out;
    out.x = sx / n;
    out.y = sy / n;
    out.ok = true;
    return out;
}

// M + N: adjacent peak/trough windowed differences per rectangle.
inline double intra_loss(const SceneRaster& raster, const NoiseField& field,
                         const CalibrationSet& cal, const ExtremaLayout& layout,
                         const ObjectiveParams& p, const Vec5& k) {
    const double y_scale = max_abs_field(field);
    double total = 0.0;
    for (const SubswathRectangle& rect : cal.rectangles) {
        const int a = swath_index(rect.swath);
        if (!layout.swaths[a].present) continue;
        const std::vector<int>& seq = layout.swaths[a].sequence;
        for (size_t q = 0; q + 1 < seq.size(); ++q) {
            OracleWindow m1 = window_mean(raster, field, rect, seq[q] - layout.epsilon,
                                          seq[q] + layout.epsilon, p.min_window_fraction);
            OracleWindow m2 = window_mean(raster, field, rect, seq[q + 1] - layout.epsilon,
                                          seq[q + 1] + layout.epsilon,
                                          p.min_window_fraction);
            if (!m1.ok || !m2.ok) continue;
            double xd = m1.x - m2.x;
            double yd = m1.y - m2.y;
            double w = gate(xd, yd, y_scale, p.mu, p);
            double r = w * (xd - k[a] * yd);
            total += r * r;
        }
    }
    return total;
}

// Boundary differences between each EW1..EW4 rectangle and its neighbour.
inline double inter_loss(const SceneRaster& raster, const NoiseField& field,
                         const CalibrationSet& cal, const ObjectiveParams& p,
                         const Vec5& k) {
    double total = 0.0;
    for (const SubswathRectangle& rect : cal.rectangles) {
        const int a = swath_index(rect.swath);
        if (a >= 4) continue;
        const int i0 = std::max(0, rect.first_azimuth_line);
        const int i1 = std::min(field.rows - 1, rect.last_azimuth_line);
        const int c_last = std::min(field.cols - 1, rect.last_range_sample);
        if (i0 > i1) continue;

        int neighbour = -1;
        double sx2 = 0.0, sy2 = 0.0;
        long n2 = 0;
        const long nominal = static_cast<long>(i1 - i0 + 1) * p.epsilon;
        for (int i = i0; i <= i1; ++i)
            for (int j = c_last + 1; j <= std::min(field.cols - 1, c_last + p.epsilon);
                 ++j) {
                int label = field.map.swath_of(i, j);
                if (label < 0) continue;
                neighbour = label;
                if (!raster.is_valid(i, j)) continue;
                sx2 += raster.at(i, j);
                sy2 += field.at(i, j);
                ++n2;
            }
        if (neighbour < 0 || n2 == 0 || n2 < p.min_window_fraction * nominal) continue;
        OracleWindow m1 = window_mean(raster, field, rect, c_last - p.epsilon + 1, c_last,
                                      p.min_window_fraction);
        if (!m1.ok) continue;
        double r = (m1.x - sx2 / n2) - (k[a] * m1.y - k[neighbour] * sy2 / n2);
        total += r * r;
    }
    return total;
}

inline double regularizer_loss(const ObjectiveParams& p, const Vec5& k) {
    double total = 0.0;
    for (int a = 0; a < 5; ++a) {
        double r = p.lambda[a] * (1.0 - k[a]);
        total += r * r;
    }
    return total;
}

/// Full objective by direct summation.
inline double direct_loss(const SceneRaster& raster, const NoiseField& field,
                          const CalibrationSet& cal, const ExtremaLayout& layout,
                          const ObjectiveParams& p, const Vec5& k) {
    return azimuth_loss(raster, field, p, k) + intra_loss(raster, field, cal, layout, p, k) +
           inter_loss(raster, field, cal, p, k) + regularizer_loss(p, k);
}

/// Coordinate-descent grid search over [0.5, 2]^5 (1e-3 steps, then local
/// 1e-5 refinement); independent route to the least-squares minimizer.
inline Vec5 grid_search_minimize(const LinearSystem& system) {
    auto loss = [&system](const Vec5& k) {
        double total = 0.0;
        for (const LossRow& row : system.rows) {
            double r = row.residual_const;
            for (int n = 0; n < 5; ++n) r -= row.coefficients[n] * k[n];
            total += r * r;
        }
        return total;
    };
    Vec5 k{1, 1, 1, 1, 1};
    auto line_scan = [&](int a, double lo, double hi, double step) {
        double best_v = loss(k);
        double best_k = k[a];
        for (double cand = lo; cand <= hi + 0.5 * step; cand += step) {
            k[a] = cand;
            double v = loss(k);
            if (v < best_v) {
                best_v = v;
                best_k = cand;
            }
        }
        k[a] = best_k;
    };
    for (int sweep = 0; sweep < 50; ++sweep) {
        Vec5 before = k;
        for (int a = 0; a < 5; ++a) line_scan(a, 0.5, 2.0, 1e-3);
        bool changed = false;
        for (int a = 0; a < 5; ++a)
            if (k[a] != before[a]) changed = true;
        if (!changed) break;
    }
    for (int sweep = 0; sweep < 20; ++sweep)
        for (int a = 0; a < 5; ++a) line_scan(a, k[a] - 2e-3, k[a] + 2e-3, 1e-5);
    return k;
}

} // namespace oracles

#endif
