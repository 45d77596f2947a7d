#ifndef EWNOISE_SOLVER_HPP
#define EWNOISE_SOLVER_HPP

#include <map>
#include <string>

#include "ewnoise/objective.hpp"

namespace ewnoise {

struct ScalingEstimate {
    Vec5 k{1.0, 1.0, 1.0, 1.0, 1.0};
    std::map<TermTag, double> per_term_residuals;
    std::map<TermTag, int> row_counts;
    double condition_estimate = 0.0;
};

/// Least-squares minimizer of the stacked system via the 5x5 normal
/// equations (orthogonal fallback above condition 1e8). Throws
/// Error{SingularSystem} when the normal matrix is numerically singular
/// (condition above 1e12).
ScalingEstimate solve(const LinearSystem& system);

/// Estimate report as stable JSON (k, residuals, rowCounts, condition, and
/// the objective configuration used).
std::string estimate_report_json(const ScalingEstimate& estimate,
                                 const ObjectiveParams& params);

} // namespace ewnoise

#endif
