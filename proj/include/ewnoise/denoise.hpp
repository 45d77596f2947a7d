#ifndef EWNOISE_DENOISE_HPP
#define EWNOISE_DENOISE_HPP

#include "ewnoise/noise_field.hpp"
#include "ewnoise/objective.hpp"
#include "ewnoise/raster.hpp"

namespace ewnoise {

enum class DenoiseMode { Esa, Static, Dynamic };
enum class NegativePolicy { ClampZero, Keep };
enum class OutputUnits { Dn2, Dn };

struct DenoiseConfig {
    DenoiseMode mode = DenoiseMode::Dynamic;
    Vec5 static_k{1.0, 1.0, 1.0, 1.0, 1.0};
    NegativePolicy negative_policy = NegativePolicy::ClampZero;
    OutputUnits output_units = OutputUnits::Dn2;
};

enum class Polarization { HV, VH };

/// Subtracts k_a * y from x per subswath. Masked cells and cells outside
/// every subswath pass through unchanged.
SceneRaster apply_denoise(const SceneRaster& raster, const NoiseField& field,
                          const Vec5& k, const DenoiseConfig& config);

/// Published mean scaling vectors for the static model.
Vec5 static_defaults(Polarization pol);

/// Central values of the simulation sampling intervals (static baseline of
/// the simulation experiment).
Vec5 simulation_baseline_k();

} // namespace ewnoise

#endif
