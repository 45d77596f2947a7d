#include "ewnoise/noise_field.hpp"

#include <algorithm>
#include <cmath>

#include "ewnoise/error.hpp"

namespace ewnoise {

SubswathMap::SubswathMap(int rows, int cols,
                         const std::vector<SubswathRectangle>& rectangles)
    : rows_(rows), cols_(cols), spans_(rows) {
    for (const SubswathRectangle& r : rectangles) {
        int i0 = std::max(0, r.first_azimuth_line);
        int i1 = std::min(rows - 1, r.last_azimuth_line);
        int c0 = std::max(0, r.first_range_sample);
        int c1 = std::min(cols - 1, r.last_range_sample);
        if (c0 > c1) continue;
        for (int i = i0; i <= i1; ++i)
            spans_[i].push_back({c0, c1 + 1, swath_index(r.swath)});
    }
    std::array<std::vector<uint8_t>, kSwathCount> row_seen;
    for (auto& seen : row_seen) seen.assign(rows, 0);
    for (int i = 0; i < rows; ++i) {
        std::sort(spans_[i].begin(), spans_[i].end(),
                  [](const Span& a, const Span& b) { return a.begin < b.begin; });
        for (const Span& s : spans_[i]) row_seen[s.swath][i] = 1;
    }
    for (int a = 0; a < kSwathCount; ++a)
        azimuth_extent_[a] = static_cast<int>(
            std::count(row_seen[a].begin(), row_seen[a].end(), 1));
}

int SubswathMap::swath_of(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) return -1;
    for (const Span& s : spans_[i])
        if (j >= s.begin && j < s.end) return s.swath;
    return -1;
}

namespace {

// Piecewise-linear lookup with constant extrapolation beyond the end knots.
double interp_clamped(const std::vector<int>& knots, const std::vector<double>& values,
                      double pos) {
    if (pos <= knots.front()) return values.front();
    if (pos >= knots.back()) return values.back();
    auto it = std::upper_bound(knots.begin(), knots.end(), pos);
    size_t hi = static_cast<size_t>(it - knots.begin());
    size_t lo = hi - 1;
    double t = (pos - knots[lo]) / static_cast<double>(knots[hi] - knots[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

// Picks the azimuth block for subswath `a` at (i, j): prefer blocks whose
// range span contains j, then the block containing i, then the nearest in
// azimuth (constant extrapolation across block gaps).
const AzimuthNoiseVector* pick_azimuth_block(
    const std::vector<const AzimuthNoiseVector*>& blocks, int i, int j) {
    std::vector<const AzimuthNoiseVector*> in_range;
    for (const AzimuthNoiseVector* b : blocks)
        if (j >= b->first_range_sample && j <= b->last_range_sample) in_range.push_back(b);
    const auto& candidates = in_range.empty() ? blocks : in_range;
    const AzimuthNoiseVector* best = nullptr;
    long best_dist = -1;
    for (const AzimuthNoiseVector* b : candidates) {
        long dist = 0;
        if (i < b->first_azimuth_line) dist = b->first_azimuth_line - i;
        else if (i > b->last_azimuth_line) dist = i - b->last_azimuth_line;
        if (!best || dist < best_dist) {
            best = b;
            best_dist = dist;
        }
    }
    return best;
}

} // namespace

NoiseField build_noise_field(const CalibrationSet& cal) {
    NoiseField field;
    field.rows = cal.scene_rows;
    field.cols = cal.scene_cols;
    field.map = SubswathMap(cal.scene_rows, cal.scene_cols, cal.rectangles);
    field.values.assign(static_cast<size_t>(field.rows) * field.cols, 0.0);

    // Range table rows interpolated to full scene width, once per table row.
    const size_t n_rows = cal.range_vectors.size();
    std::vector<std::vector<double>> row_values(n_rows);
    std::vector<int> row_lines(n_rows);
    for (size_t r = 0; r < n_rows; ++r) {
        const RangeNoiseVector& v = cal.range_vectors[r];
        row_lines[r] = v.azimuth_line;
        row_values[r].resize(field.cols);
        for (int j = 0; j < field.cols; ++j)
            row_values[r][j] = interp_clamped(v.range_pixels, v.noise_values, j);
    }

    std::array<std::vector<const AzimuthNoiseVector*>, kSwathCount> blocks;
    for (const AzimuthNoiseVector& v : cal.azimuth_vectors)
        blocks[swath_index(v.swath)].push_back(&v);
    for (int a = 0; a < kSwathCount; ++a)
        if (field.map.has_swath(a) && blocks[a].empty())
            throw Error(ErrorKind::GeometryMismatch,
                        std::string("no azimuth noise vector for ") +
                            swath_name(swath_at(a)));

    for (int i = 0; i < field.rows; ++i) {
        // Bracketing range-table rows for this scene row.
        size_t hi = static_cast<size_t>(
            std::upper_bound(row_lines.begin(), row_lines.end(), i) - row_lines.begin());
        size_t lo;
        double t;
        if (hi == 0) {
            lo = hi = 0;
            t = 0.0;
        } else if (hi == n_rows) {
            lo = hi = n_rows - 1;
            t = 0.0;
        } else {
            lo = hi - 1;
            t = static_cast<double>(i - row_lines[lo]) /
                static_cast<double>(row_lines[hi] - row_lines[lo]);
        }

        for (const SubswathMap::Span& span : field.map.row_spans(i)) {
            for (int j = span.begin; j < span.end; ++j) {
                double range_part =
                    row_values[lo][j] + t * (row_values[hi][j] - row_values[lo][j]);
                const AzimuthNoiseVector* block =
                    pick_azimuth_block(blocks[span.swath], i, j);
                double azimuth_part =
                    interp_clamped(block->azimuth_lines, block->noise_values, i);
                field.values[field.index(i, j)] = range_part * azimuth_part;
            }
        }
    }

    for (int a = 0; a < kSwathCount; ++a)
        field.half_period[a] =
            field.map.has_swath(a) ? half_burst_period(cal, swath_at(a)) : 0;
    return field;
}

int half_burst_period(const CalibrationSet& cal, Swath swath) {
    auto it = cal.burst_counts.find(swath);
    if (it == cal.burst_counts.end() || it->second < 1)
        throw Error(ErrorKind::InvariantViolation,
                    std::string("no burst count for ") + swath_name(swath));
    long long n_az = 0;
    for (const SubswathRectangle& r : cal.rectangles)
        if (r.swath == swath)
            n_az += std::max(0, std::min(cal.scene_rows - 1, r.last_azimuth_line) -
                                    std::max(0, r.first_azimuth_line) + 1);
    int rho = static_cast<int>(
        std::llround(static_cast<double>(n_az) / (2.0 * it->second)));
    return std::max(1, rho);
}

LineMeans azimuth_line_means(const SceneRaster& raster, const NoiseField& field,
                             Swath swath) {
    if (raster.rows != field.rows || raster.cols != field.cols)
        throw Error(ErrorKind::GeometryMismatch,
                    "raster " + std::to_string(raster.rows) + "x" +
                        std::to_string(raster.cols) + " vs field " +
                        std::to_string(field.rows) + "x" + std::to_string(field.cols));
    const int a = swath_index(swath);
    LineMeans means;
    means.x.assign(field.rows, 0.0);
    means.y.assign(field.rows, 0.0);
    means.line_valid.assign(field.rows, 0);
    for (int i = 0; i < field.rows; ++i) {
        double sum_x = 0.0, sum_y = 0.0;
        long count = 0;
        for (const SubswathMap::Span& span : field.map.row_spans(i)) {
            if (span.swath != a) continue;
            for (int j = span.begin; j < span.end; ++j) {
                if (!raster.is_valid(i, j)) continue;
                sum_x += raster.at(i, j);
                sum_y += field.at(i, j);
                ++count;
            }
        }
        if (count > 0) {
            means.x[i] = sum_x / count;
            means.y[i] = sum_y / count;
            means.line_valid[i] = 1;
        }
    }
    return means;
}

} // namespace ewnoise
