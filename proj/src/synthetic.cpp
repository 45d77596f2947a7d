#include "ewnoise/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "ewnoise/error.hpp"

namespace ewnoise {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Range noise shape across one subswath, u in [0, 1]. EW1 carries two main
// lobes (peaks at both edges and mid-swath), the others a single lobe
// (peaks at the edges, trough in the middle).
double range_shape(int swath, double u, double amplitude) {
    if (swath == 0) {
        double c = std::cos(2.0 * kPi * u);
        return 1.0 + amplitude * c * c + 0.05 * (u - 0.5);
    }
    double v = 2.0 * u - 1.0;
    return 1.0 + amplitude * v * v;
}

// Per-subswath noise magnitude, strongest in EW1.
double swath_magnitude(int swath) {
    static const double mags[kSwathCount] = {1.0, 0.55, 0.4, 0.3, 0.25};
    return mags[swath];
}

} // namespace

CalibrationSet make_synthetic_calibration(const SyntheticCalOptions& opt) {
    if (opt.subswaths < 1 || opt.subswaths > kSwathCount)
        throw Error(ErrorKind::InvariantViolation, "subswaths must be in [1, 5]");
    if (opt.rows < 4 || opt.cols < 2 * opt.subswaths)
        throw Error(ErrorKind::InvariantViolation, "scene too small");

    CalibrationSet cal;
    cal.scene_rows = opt.rows;
    cal.scene_cols = opt.cols;

    // Equal-width subswath columns; the last one absorbs the remainder.
    const int width = opt.cols / opt.subswaths;
    std::vector<int> col_lo(opt.subswaths), col_hi(opt.subswaths);
    for (int a = 0; a < opt.subswaths; ++a) {
        col_lo[a] = a * width;
        col_hi[a] = (a == opt.subswaths - 1) ? opt.cols - 1 : (a + 1) * width - 1;
    }

    for (int a = 0; a < opt.subswaths; ++a) {
        const int n_rects = std::max(1, opt.rects_per_swath);
        for (int r = 0; r < n_rects; ++r) {
            SubswathRectangle rect;
            rect.swath = swath_at(a);
            rect.first_azimuth_line = opt.rows * r / n_rects;
            rect.last_azimuth_line = opt.rows * (r + 1) / n_rects - 1;
            rect.first_range_sample = col_lo[a];
            rect.last_range_sample = col_hi[a];
            cal.rectangles.push_back(rect);
        }
        cal.burst_counts[swath_at(a)] = std::max(1, opt.bursts);
    }

    // Range LUT rows: the subswath shapes sampled on a regular knot grid,
    // with a mild magnitude drift along azimuth.
    for (int line = 0;; line += std::max(1, opt.range_row_step)) {
        bool last = line >= opt.rows - 1;
        RangeNoiseVector v;
        v.azimuth_line = last ? opt.rows - 1 : line;
        double drift =
            1.0 + opt.azimuth_row_drift * std::sin(2.0 * kPi * v.azimuth_line / opt.rows);
        for (int j = 0;; j += std::max(1, opt.range_knot_step)) {
            bool last_col = j >= opt.cols - 1;
            int col = last_col ? opt.cols - 1 : j;
            int a = std::min(opt.subswaths - 1, col / width);
            double u = (col_hi[a] == col_lo[a])
                           ? 0.0
                           : static_cast<double>(col - col_lo[a]) / (col_hi[a] - col_lo[a]);
            v.range_pixels.push_back(col);
            v.noise_values.push_back(opt.range_magnitude * swath_magnitude(a) * drift *
                                     range_shape(a, u, opt.range_shape_amplitude));
            if (last_col) break;
        }
        cal.range_vectors.push_back(std::move(v));
        if (last) break;
    }

    // Descalloping gain: U-shaped per burst, periodic along azimuth.
    const double period = static_cast<double>(opt.rows) / std::max(1, opt.bursts);
    for (int a = 0; a < opt.subswaths; ++a) {
        AzimuthNoiseVector v;
        v.swath = swath_at(a);
        v.first_azimuth_line = 0;
        v.last_azimuth_line = opt.rows - 1;
        v.first_range_sample = col_lo[a];
        v.last_range_sample = col_hi[a];
        for (int i = 0;; i += std::max(1, opt.azimuth_knot_step)) {
            bool last = i >= opt.rows - 1;
            int line = last ? opt.rows - 1 : i;
            v.azimuth_lines.push_back(line);
            v.noise_values.push_back(1.0 +
                                     opt.azimuth_amplitude * std::cos(2.0 * kPi * line / period));
            if (last) break;
        }
        cal.azimuth_vectors.push_back(std::move(v));
    }
    return cal;
}

SceneRaster make_clean_raster(int rows, int cols, CleanStyle style, RandomStream stream) {
    SceneRaster raster(rows, cols);
    if (style == CleanStyle::FlatOcean) {
        const double background = 400.0;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                double speckle = 1.0 + 0.1 * stream.normal();
                raster.at(i, j) =
                    static_cast<float>(std::max(1e-3, background * speckle));
            }
        return raster;
    }

    // Smooth random field: white noise on a coarse grid, bilinearly
    // upsampled, exponentiated to keep intensities positive.
    const int cell = 16;
    const int grid_rows = rows / cell + 2;
    const int grid_cols = cols / cell + 2;
    std::vector<double> grid(static_cast<size_t>(grid_rows) * grid_cols);
    for (double& g : grid) g = stream.normal();
    auto grid_at = [&](int gi, int gj) {
        return grid[static_cast<size_t>(gi) * grid_cols + gj];
    };

    std::vector<double> base(static_cast<size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        double gi = static_cast<double>(i) / cell;
        int i0 = static_cast<int>(gi);
        double ti = gi - i0;
        for (int j = 0; j < cols; ++j) {
            double gj = static_cast<double>(j) / cell;
            int j0 = static_cast<int>(gj);
            double tj = gj - j0;
            double v00 = grid_at(i0, j0), v01 = grid_at(i0, j0 + 1);
            double v10 = grid_at(i0 + 1, j0), v11 = grid_at(i0 + 1, j0 + 1);
            double v = (1 - ti) * ((1 - tj) * v00 + tj * v01) +
                       ti * ((1 - tj) * v10 + tj * v11);
            base[static_cast<size_t>(i) * cols + j] = 300.0 * std::exp(0.6 * v);
        }
    }

    // A few bright/dark geometric patches (ice floes, leads).
    const int n_shapes = 6;
    for (int s = 0; s < n_shapes; ++s) {
        bool disk = stream.next_double() < 0.5;
        double gain = stream.uniform(0.3, 3.0);
        int ci = static_cast<int>(stream.uniform(0, rows));
        int cj = static_cast<int>(stream.uniform(0, cols));
        int ri = std::max(2, static_cast<int>(stream.uniform(rows / 16.0, rows / 4.0)));
        int rj = std::max(2, static_cast<int>(stream.uniform(cols / 16.0, cols / 4.0)));
        for (int i = std::max(0, ci - ri); i < std::min(rows, ci + ri); ++i) {
            for (int j = std::max(0, cj - rj); j < std::min(cols, cj + rj); ++j) {
                if (disk) {
                    double di = static_cast<double>(i - ci) / ri;
                    double dj = static_cast<double>(j - cj) / rj;
                    if (di * di + dj * dj > 1.0) continue;
                }
                base[static_cast<size_t>(i) * cols + j] *= gain;
            }
        }
    }

    // Multiplicative unit-mean speckle.
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double speckle = 0.25 + 0.75 * stream.exponential();
            double v = base[static_cast<size_t>(i) * cols + j] * speckle;
            raster.at(i, j) = static_cast<float>(std::max(1e-3, v));
        }
    return raster;
}

} // namespace ewnoise
