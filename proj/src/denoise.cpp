#include "ewnoise/denoise.hpp"

#include <cmath>

#include "ewnoise/error.hpp"

namespace ewnoise {

SceneRaster apply_denoise(const SceneRaster& raster, const NoiseField& field,
                          const Vec5& k, const DenoiseConfig& config) {
    if (raster.rows != field.rows || raster.cols != field.cols)
        throw Error(ErrorKind::GeometryMismatch,
                    "raster " + std::to_string(raster.rows) + "x" +
                        std::to_string(raster.cols) + " vs field " +
                        std::to_string(field.rows) + "x" + std::to_string(field.cols));
    for (double v : k)
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvariantViolation, "non-finite scaling vector");

    SceneRaster out = raster;
    for (int i = 0; i < raster.rows; ++i) {
        for (const SubswathMap::Span& span : field.map.row_spans(i)) {
            const double ka = k[span.swath];
            for (int j = span.begin; j < span.end; ++j) {
                if (!raster.is_valid(i, j)) continue;
                double phi = static_cast<double>(raster.at(i, j)) - ka * field.at(i, j);
                if (config.negative_policy == NegativePolicy::ClampZero && phi < 0.0)
                    phi = 0.0;
                if (config.output_units == OutputUnits::Dn)
                    phi = std::sqrt(std::max(phi, 0.0));
                out.at(i, j) = static_cast<float>(phi);
            }
        }
    }
    return out;
}

Vec5 static_defaults(Polarization pol) {
    if (pol == Polarization::HV) return {1.438, 0.942, 0.980, 1.010, 0.999};
    return {1.37, 0.932, 0.969, 0.993, 1.000};
}

Vec5 simulation_baseline_k() { return {1.4, 0.925, 0.985, 1.0, 1.0}; }

} // namespace ewnoise
