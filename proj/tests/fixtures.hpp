#ifndef EWNOISE_TESTS_FIXTURES_HPP
#define EWNOISE_TESTS_FIXTURES_HPP

#include <filesystem>
#include <string>

#include "ewnoise/calibration.hpp"
#include "ewnoise/noise_field.hpp"
#include "ewnoise/raster.hpp"
#include "ewnoise/rng.hpp"
#include "ewnoise/synthetic.hpp"

namespace fixtures {

using namespace ewnoise;

// 8x8 single-subswath set matching the frozen noise-field patch: two range
// LUT rows with different knot grids plus one azimuth block.
inline CalibrationSet patch_cal() {
    CalibrationSet cal;
    cal.scene_rows = 8;
    cal.scene_cols = 8;
    cal.range_vectors = {{1, {0, 3, 7}, {2.0, 4.0, 1.0}},
                         {6, {0, 2, 5, 7}, {1.0, 3.0, 5.0, 2.0}}};
    cal.azimuth_vectors = {{Swath::EW1, 0, 7, 0, 7, {0, 4, 7}, {1.5, 0.5, 1.25}}};
    cal.rectangles = {{Swath::EW1, 0, 7, 0, 7}};
    cal.burst_counts = {{Swath::EW1, 2}};
    return cal;
}

// Single-subswath scene with explicit per-line azimuth gain and a constant
// range LUT; line means of the noise field equal the gain values.
inline CalibrationSet line_gain_cal(int rows, int cols, Swath swath,
                                    const std::vector<int>& lines,
                                    const std::vector<double>& gains,
                                    int bursts = 1, double range_value = 1.0) {
    CalibrationSet cal;
    cal.scene_rows = rows;
    cal.scene_cols = cols;
    cal.range_vectors = {{0, {0, cols - 1}, {range_value, range_value}},
                         {rows - 1, {0, cols - 1}, {range_value, range_value}}};
    cal.azimuth_vectors = {{swath, 0, rows - 1, 0, cols - 1, lines, gains}};
    cal.rectangles = {{swath, 0, rows - 1, 0, cols - 1}};
    cal.burst_counts = {{swath, bursts}};
    return cal;
}

inline SceneRaster raster_from_field(const NoiseField& field, double scale) {
    SceneRaster raster(field.rows, field.cols);
    for (int i = 0; i < field.rows; ++i)
        for (int j = 0; j < field.cols; ++j)
            raster.at(i, j) = static_cast<float>(scale * field.at(i, j));
    return raster;
}

// Randomized 5-subswath scene for property and acceptance checks.
inline CalibrationSet random_cal(RandomStream& stream, int rows = 64, int cols = 160) {
    SyntheticCalOptions opt;
    opt.rows = rows;
    opt.cols = cols;
    opt.bursts = 2 + static_cast<int>(stream.uniform(0, 4));
    opt.range_knot_step = 4 + static_cast<int>(stream.uniform(0, 5));
    opt.range_row_step = 8 + static_cast<int>(stream.uniform(0, 9));
    opt.azimuth_knot_step = 2 + static_cast<int>(stream.uniform(0, 3));
    opt.range_magnitude = stream.uniform(500.0, 3000.0);
    opt.range_shape_amplitude = stream.uniform(0.3, 0.7);
    opt.azimuth_amplitude = stream.uniform(0.15, 0.35);
    opt.azimuth_row_drift = stream.uniform(0.0, 0.15);
    return make_synthetic_calibration(opt);
}

// Raster loosely following the field so the ratio gates keep many rows.
inline SceneRaster perturbed_field_raster(const NoiseField& field, RandomStream& stream) {
    SceneRaster raster(field.rows, field.cols);
    const double scale = stream.uniform(0.7, 1.6);
    for (int i = 0; i < field.rows; ++i)
        for (int j = 0; j < field.cols; ++j) {
            double v = scale * field.at(i, j) * stream.uniform(0.9, 1.1) +
                       stream.uniform(0.0, 20.0);
            raster.at(i, j) = static_cast<float>(v);
        }
    return raster;
}

inline std::string temp_dir(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("ewnoise_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

} // namespace fixtures

#endif
