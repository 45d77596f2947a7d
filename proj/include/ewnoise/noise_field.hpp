#ifndef EWNOISE_NOISE_FIELD_HPP
#define EWNOISE_NOISE_FIELD_HPP

#include <array>
#include <vector>

#include "ewnoise/calibration.hpp"
#include "ewnoise/raster.hpp"

namespace ewnoise {

// Per-row column spans labelling each pixel with its subswath.
class SubswathMap {
public:
    struct Span {
        int begin = 0; // first column
        int end = 0;   // one past last column
        int swath = -1;
    };

    SubswathMap() = default;
    SubswathMap(int rows, int cols, const std::vector<SubswathRectangle>& rectangles);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    /// Subswath index at (i, j), or -1 outside every rectangle.
    int swath_of(int i, int j) const;
    const std::vector<Span>& row_spans(int i) const { return spans_[i]; }
    /// Total azimuth lines carrying cells of subswath a.
    int azimuth_extent(int a) const { return azimuth_extent_[a]; }
    bool has_swath(int a) const { return azimuth_extent_[a] > 0; }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::vector<Span>> spans_;
    std::array<int, kSwathCount> azimuth_extent_{};
};

// Estimated additive noise grid y(i,j) with subswath labelling.
// Cells outside every rectangle hold 0 and are excluded from all sums.
struct NoiseField {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
    SubswathMap map;
    std::array<int, kSwathCount> half_period{}; // rho(a), azimuth lines

    size_t index(int i, int j) const { return static_cast<size_t>(i) * cols + j; }
    double at(int i, int j) const { return values[index(i, j)]; }
};

/// Reconstructs the noise field from the lookup tables: the range table is
/// interpolated linearly in j on the two bracketing table rows and then
/// linearly in i between them; the azimuth (descalloping) table is
/// interpolated linearly in i within its block and held constant across the
/// block's range span; the field value is the product of the two. Beyond the
/// outermost knots the nearest knot value is held.
NoiseField build_noise_field(const CalibrationSet& cal);

/// Azimuth lines per half burst period, rounded to nearest, at least 1.
int half_burst_period(const CalibrationSet& cal, Swath swath);

// Per-azimuth-line means of x and y over the same valid cells of one
// subswath. Lines with no valid cells are flagged invalid.
struct LineMeans {
    std::vector<double> x; // indexed by scene row
    std::vector<double> y;
    std::vector<uint8_t> line_valid;
};

LineMeans azimuth_line_means(const SceneRaster& raster, const NoiseField& field, Swath swath);

} // namespace ewnoise

#endif
