#ifndef EWNOISE_OBJECTIVE_HPP
#define EWNOISE_OBJECTIVE_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ewnoise/calibration.hpp"
#include "ewnoise/noise_field.hpp"
#include "ewnoise/raster.hpp"

namespace ewnoise {

using Vec5 = std::array<double, 5>;

enum class TermTag { Azimuth, IntraRange, InterSwath, Regularizer };
const char* term_tag_name(TermTag tag);

// Tunables of the objective. Defaults are the published configuration.
struct ObjectiveParams {
    int epsilon = 25;        // range half-window, pixels
    double mu = 1.79;        // intra-subswath weight
    double ratio_lo = 0.0;   // accepted x-diff / y-diff band
    double ratio_hi = 2.5;
    Vec5 lambda{0.1, 0.1, 6.75124, 2.78253, 10.0};
    double min_window_fraction = 0.25; // windowed means below this validity are dropped
};

// One stacked row: residual_const is the v entry (weighted x difference),
// coefficients is the C row (weighted y differences in subswath columns).
struct LossRow {
    double residual_const = 0.0;
    Vec5 coefficients{};
    TermTag tag = TermTag::Azimuth;
    double weight = 0.0;
};

struct LinearSystem {
    std::vector<LossRow> rows;
    std::map<TermTag, int> counts;
    std::array<bool, 5> constrained{}; // column has any nonzero coefficient

    /// (v - C k)^T (v - C k)
    double evaluate(const Vec5& k) const;
    std::map<TermTag, double> evaluate_terms(const Vec5& k) const;
};

// Peak/trough range positions of the mean noise profile per subswath,
// interleaved p,t,p (EW2..EW5) or p,t,p,t,p (EW1). All windows
// [s-epsilon, s+epsilon] fit inside the subswath's range span.
struct ExtremaLayout {
    struct SwathExtrema {
        bool present = false;
        std::vector<int> sequence; // interleaved, starts and ends with a peak
        std::vector<int> peaks() const;
        std::vector<int> troughs() const;
    };
    std::array<SwathExtrema, kSwathCount> swaths;
    int epsilon = 0;
};

/// Finds the required peak/trough interleaving on the smoothed mean range
/// profile of the noise field. Throws Error{ExtremaNotFound} when a present
/// subswath cannot produce it (degenerate field).
ExtremaLayout locate_extrema(const NoiseField& field, const CalibrationSet& cal, int epsilon);

/// Rows pairing each azimuth line with the line half a burst period later.
std::vector<LossRow> azimuth_rows(const SceneRaster& raster, const NoiseField& field,
                                  const ObjectiveParams& params);

/// Rows differencing adjacent peak/trough windowed means inside each
/// subswath rectangle (2 per rectangle for EW2..EW5, 4 for EW1).
std::vector<LossRow> intra_range_rows(const SceneRaster& raster, const NoiseField& field,
                                      const CalibrationSet& cal, const ExtremaLayout& layout,
                                      const ObjectiveParams& params);

/// Rows differencing the flanking columns across each EW1..EW4 rectangle's
/// right boundary against the adjacent subswath.
std::vector<LossRow> inter_swath_rows(const SceneRaster& raster, const NoiseField& field,
                                      const CalibrationSet& cal, const ObjectiveParams& params);

/// Five rows anchoring each scale to 1 with strength lambda_a.
std::vector<LossRow> regularizer_rows(const Vec5& lambda);

/// Concatenates the term rows in fixed order (azimuth, intra, inter,
/// regularizer), dropping zero-weight rows.
LinearSystem assemble(const std::vector<LossRow>& azimuth,
                      const std::vector<LossRow>& intra,
                      const std::vector<LossRow>& inter,
                      const std::vector<LossRow>& regularizer);

/// Convenience: builds every term and assembles the full system.
LinearSystem build_system(const SceneRaster& raster, const NoiseField& field,
                          const CalibrationSet& cal, const ObjectiveParams& params);

/// Audit dump, one line per stacked row.
std::string system_to_csv(const LinearSystem& system);

} // namespace ewnoise

#endif
