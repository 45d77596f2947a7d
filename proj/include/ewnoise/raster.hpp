#ifndef EWNOISE_RASTER_HPP
#define EWNOISE_RASTER_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ewnoise {

// Measurement grid in squared digital numbers (x = DN^2), row-major.
// Masked-out cells never enter any loss sum or statistic.
struct SceneRaster {
    int rows = 0;
    int cols = 0;
    std::vector<float> values;  // rows * cols
    std::vector<uint8_t> valid; // rows * cols, 1 = usable

    SceneRaster() = default;
    SceneRaster(int r, int c, float fill = 0.0f)
        : rows(r), cols(c), values(static_cast<size_t>(r) * c, fill),
          valid(static_cast<size_t>(r) * c, 1) {}

    size_t index(int i, int j) const { return static_cast<size_t>(i) * cols + j; }
    float at(int i, int j) const { return values[index(i, j)]; }
    float& at(int i, int j) { return values[index(i, j)]; }
    bool is_valid(int i, int j) const { return valid[index(i, j)] != 0; }

    /// Marks cells with value <= threshold as invalid (zero-DN borders).
    void mask_below(float threshold);
};

/// Reads a flat little-endian float32 raster with its JSON sidecar
/// ("<path>.json" holding {rows, cols, dtype, units}); applies mask_threshold.
SceneRaster load_raster(const std::string& path, float mask_threshold = 0.0f);

/// Writes the raster and its sidecar; round-trips bit-exactly.
void save_raster(const SceneRaster& raster, const std::string& path,
                 const std::string& units = "dn2");

} // namespace ewnoise

#endif
