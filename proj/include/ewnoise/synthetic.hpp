#ifndef EWNOISE_SYNTHETIC_HPP
#define EWNOISE_SYNTHETIC_HPP

#include "ewnoise/calibration.hpp"
#include "ewnoise/raster.hpp"
#include "ewnoise/rng.hpp"

namespace ewnoise {

// Geometry and amplitude knobs of a generated calibration document.
struct SyntheticCalOptions {
    int rows = 64;
    int cols = 160;
    int subswaths = 5;           // leftmost `subswaths` of EW1..EW5
    int rects_per_swath = 1;     // azimuth-stacked rectangles per subswath
    int range_knot_step = 8;     // range LUT knot spacing, pixels
    int range_row_step = 16;     // range LUT rows, azimuth lines
    int azimuth_knot_step = 4;   // azimuth LUT knot spacing, lines
    int bursts = 4;              // per subswath
    double range_magnitude = 1500.0;
    double range_shape_amplitude = 0.5;
    double azimuth_amplitude = 0.25;
    double azimuth_row_drift = 0.1; // range LUT magnitude drift along azimuth
};

/// Builds a well-formed calibration set: per-subswath range noise shapes
/// (two-lobed for EW1, single-lobed otherwise), a periodic descalloping
/// gain, a rectangle tiling, and burst counts.
CalibrationSet make_synthetic_calibration(const SyntheticCalOptions& options);

enum class CleanStyle {
    Textured, // smooth random field + geometric shapes + speckle
    FlatOcean // constant background + mild speckle
};

/// Positive synthetic clean raster in squared-DN units.
SceneRaster make_clean_raster(int rows, int cols, CleanStyle style, RandomStream stream);

} // namespace ewnoise

#endif
