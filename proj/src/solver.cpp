#include "ewnoise/solver.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "ewnoise/error.hpp"

namespace ewnoise {

ScalingEstimate solve(const LinearSystem& system) {
    constexpr double kFallbackCondition = 1e8;
    constexpr double kSingularCondition = 1e12;

    // Accumulate the 5x5 normal matrix in a fixed row order.
    Eigen::Matrix<double, 5, 5> normal = Eigen::Matrix<double, 5, 5>::Zero();
    Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Zero();
    for (const LossRow& row : system.rows) {
        for (int l = 0; l < 5; ++l) {
            if (row.coefficients[l] == 0.0) continue;
            rhs(l) += row.coefficients[l] * row.residual_const;
            for (int m = 0; m < 5; ++m)
                normal(l, m) += row.coefficients[l] * row.coefficients[m];
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> eigs(normal);
    const double ev_min = eigs.eigenvalues().minCoeff();
    const double ev_max = eigs.eigenvalues().maxCoeff();
    double condition = std::numeric_limits<double>::infinity();
    if (ev_min > 0.0 && ev_max > 0.0) condition = ev_max / ev_min;
    if (!(condition < kSingularCondition))
        throw Error(ErrorKind::SingularSystem,
                    "normal matrix condition " + std::to_string(condition) +
                        " exceeds 1e12 (unconstrained subswath with zero lambda?)");

    Eigen::Matrix<double, 5, 1> k;
    if (condition < kFallbackCondition) {
        k = normal.ldlt().solve(rhs);
    } else {
        // Ill-conditioned normal matrix: orthogonal solve on the tall system.
        Eigen::MatrixXd c(system.rows.size(), 5);
        Eigen::VectorXd v(system.rows.size());
        for (size_t r = 0; r < system.rows.size(); ++r) {
            for (int n = 0; n < 5; ++n) c(static_cast<Eigen::Index>(r), n) =
                system.rows[r].coefficients[n];
            v(static_cast<Eigen::Index>(r)) = system.rows[r].residual_const;
        }
        k = c.colPivHouseholderQr().solve(v);
    }

    ScalingEstimate estimate;
    for (int n = 0; n < 5; ++n) {
        if (!std::isfinite(k(n)))
            throw Error(ErrorKind::SingularSystem, "non-finite solution component");
        estimate.k[n] = k(n);
    }
    estimate.condition_estimate = condition;
    estimate.per_term_residuals = system.evaluate_terms(estimate.k);
    estimate.row_counts = {{TermTag::Azimuth, 0},
                           {TermTag::IntraRange, 0},
                           {TermTag::InterSwath, 0},
                           {TermTag::Regularizer, 0}};
    for (const auto& [tag, n] : system.counts) estimate.row_counts[tag] = n;
    return estimate;
}

std::string estimate_report_json(const ScalingEstimate& estimate,
                                 const ObjectiveParams& params) {
    nlohmann::json doc;
    doc["k"] = estimate.k;
    for (const auto& [tag, value] : estimate.per_term_residuals)
        doc["residuals"][term_tag_name(tag)] = value;
    for (const auto& [tag, n] : estimate.row_counts)
        doc["rowCounts"][term_tag_name(tag)] = n;
    doc["condition"] = estimate.condition_estimate;
    doc["config"] = {{"epsilon", params.epsilon},
                     {"mu", params.mu},
                     {"ratioBounds", {params.ratio_lo, params.ratio_hi}},
                     {"lambda", params.lambda}};
    return doc.dump(2) + "\n";
}

} // namespace ewnoise
