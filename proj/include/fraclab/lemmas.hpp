#pragma once

#include "fraclab/manifold.hpp"

#include <span>
#include <string>
#include <vector>

namespace fraclab {

/// (1 ∧ y, 1/(1 + 1/y)); the pair satisfies lhs/2 ≤ rhs ≤ lhs for every y > 0.
struct MinWedge {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept { return 0.5 * lhs <= rhs && rhs <= lhs; }
};

MinWedge minwedge_check(double y);

struct ScalingSample {
    double scale = 0.0;
    double integral = 0.0;
    /// Portion of `integral` contributed past r_max.
    double tail = 0.0;
};

/// Power-law fit of radial integrals against their scale parameter.
///
/// case1: ∫ (t^{2/α} + d²)^{−γ} dμ      ~ t^{(n−2γ)/α}
/// case2: ∫_{B(R)} d^{−γ} dμ            ~ R^{n−γ}
/// case3: ∫_{M∖B(R)} d^{−γ} dμ          ~ R^{n−γ}
struct ScalingFit {
    std::string case_id;
    double gamma = 0.0;
    /// Only meaningful for case1.
    double alpha = 0.0;
    std::vector<ScalingSample> samples;
    double fitted_exponent = 0.0;
    double predicted_exponent = 0.0;
    /// Largest deviation of log(integral) from the fitted line.
    double residual = 0.0;

    bool within(double tolerance) const { return std::abs(fitted_exponent - predicted_exponent) <= tolerance; }
};

double case1_integral(const ManifoldModel& m, double gamma, double alpha, double t, double* tail = nullptr);
double case2_integral(const ManifoldModel& m, double gamma, double R);
double case3_integral(const ManifoldModel& m, double gamma, double R, double* tail = nullptr);

ScalingFit integral_case1(const ManifoldModel& m, double gamma, double alpha, std::span<const double> t_values);
ScalingFit integral_case2(const ManifoldModel& m, double gamma, std::span<const double> R_values);
ScalingFit integral_case3(const ManifoldModel& m, double gamma, std::span<const double> R_values);

using quad::log_spaced;

}  // namespace fraclab
