#include "fraclab/weight.hpp"

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab {

void WeightParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw ParameterError("weight", "alpha must lie in (0, 2], got " + std::to_string(alpha));
    if (n < 1) throw ParameterError("weight", "dimension must be at least 1");
    if (!(shift_N > 0.0)) throw ParameterError("weight", "shift N must be positive");
    if (base_index != 0) throw ParameterError("weight", "only the centre of a radial model can serve as base point");
}

double eval_h(double t, double r, const WeightParams& wp) {
    if (!(t > 0.0)) throw ParameterError("weight", "h(t, x) needs t > 0");
    const double core2 = std::pow(t, 2.0 / wp.alpha);
    // t^{1+n/α} / (r² + t^{2/α})^{(n+α)/2} = (1 + r²/t^{2/α})^{−(n+α)/2}
    return std::pow(1.0 + r * r / core2, -0.5 * (wp.n + wp.alpha));
}

double eval_dt_h(double t, double r, const WeightParams& wp) {
    const double h = eval_h(t, r, wp);
    const double core2 = std::pow(t, 2.0 / wp.alpha);
    return (1.0 + wp.n / wp.alpha) * (h / t) * (r * r / (r * r + core2));
}

Field h_field(const ManifoldModel& m, double t, const WeightParams& wp) {
    const auto& r = m.grid();
    Field h(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) h(static_cast<Eigen::Index>(i)) = eval_h(t, r[i], wp);
    return h;
}

namespace {

std::size_t interior_count(const ManifoldModel& m) {
    return static_cast<std::size_t>(std::floor(kInteriorFraction * static_cast<double>(m.size())));
}

void check_dimension(const ManifoldModel& m, const WeightParams& wp) {
    wp.validate();
    if (wp.n != m.dim()) throw ParameterError("weight", "weight dimension does not match the model dimension");
}

}  // namespace

FracBoundReport verify_frac_bound(const SpectralOperator& op, const WeightParams& wp, std::span<const double> t_values,
                                  double spread_bound) {
    const auto& m = op.model();
    check_dimension(m, wp);
    if (t_values.empty()) throw ParameterError("weight", "no t values supplied");
    const auto& r = m.grid();

    FracBoundReport rep;
    rep.spread_bound = spread_bound;
    rep.asserted = !wp.diagnostic_only();
    rep.interior_nodes = std::min<std::size_t>(interior_count(m), static_cast<std::size_t>(op.dofs()));

    for (double t : t_values) {
        if (!(t > 0.0)) throw ParameterError("weight", "t values must be positive");
        const double core = std::pow(t, 1.0 / wp.alpha);
        const auto inside = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), core) - r.begin());
        if (inside < kMinCoreNodes)
            throw ResolutionError("weight", "core radius at t = " + std::to_string(t) + " holds only " +
                                                std::to_string(inside) + " nodes (need " +
                                                std::to_string(kMinCoreNodes) + ")");
        const Field h = h_field(m, t, wp);
        const Field lh = apply_fractional(op, wp.alpha, h);
        double sup = 0.0;
        for (std::size_t i = 0; i < rep.interior_nodes; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double ratio = t * std::abs(lh(k)) / h(k);
            sup = std::max(sup, ratio);
            rep.ratios.push_back({t, r[i], ratio});
        }
        rep.t_values.push_back(t);
        rep.sup_ratio.push_back(sup);
    }
    const auto [lo, hi] = std::minmax_element(rep.sup_ratio.begin(), rep.sup_ratio.end());
    rep.spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    rep.passes = rep.spread <= spread_bound;
    return rep;
}

PoissonIdentityReport check_poisson_identity(const SpectralOperator& op, std::span<const double> t_values,
                                             double tolerance) {
    const auto& m = op.model();
    if (m.dim() != 1) throw ParameterError("weight", "the Poisson-kernel identity applies to the flat line only");
    WeightParams wp{1.0, 1, 0, 1.0};
    const auto& r = m.grid();
    const std::size_t interior = std::min<std::size_t>(interior_count(m), static_cast<std::size_t>(op.dofs()));

    PoissonIdentityReport rep;
    rep.tolerance = tolerance;
    rep.passes = true;
    for (double t : t_values) {
        const Field h = h_field(m, t, wp);
        const Field lh = apply_fractional(op, 1.0, h);
        double err = 0.0, sup = 0.0;
        for (std::size_t i = 0; i < interior; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            const double x2 = r[i] * r[i];
            const double exact = t * (t * t - x2) / ((x2 + t * t) * (x2 + t * t));
            err = std::max(err, std::abs(lh(k) - exact));
            sup = std::max(sup, t * std::abs(lh(k)) / h(k));
        }
        // max h = h(t, 0) = 1
        rep.t_values.push_back(t);
        rep.max_error.push_back(err);
        rep.sup_ratio.push_back(sup);
        rep.passes = rep.passes && err < tolerance && std::abs(sup - 1.0) <= 0.1;
    }
    return rep;
}

double phi_of_state(const ManifoldModel& m, const FieldState& state, const WeightParams& wp) {
    check_dimension(m, wp);
    if (state.u.size() != static_cast<Eigen::Index>(m.size()))
        throw ParameterError("weight", "field state does not live on this model grid");
    const double T = state.t + wp.shift_N;
    const auto& r = m.grid();
    const auto& w = m.measure_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) sum += w[i] * eval_h(T, r[i], wp) * state.u(static_cast<Eigen::Index>(i)).real();
    return sum;
}

double h_l2_norm(const ManifoldModel& m, const WeightParams& wp, double T) {
    check_dimension(m, wp);
    if (!(T > 0.0)) throw ParameterError("weight", "h_l2_norm needs T > 0");
    const auto& r = m.grid();
    const auto& w = m.measure_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double h = eval_h(T, r[i], wp);
        sum += w[i] * h * h;
    }
    const double decay = 2.0 * (wp.n + wp.alpha);
    sum += m.power_tail(
        [&](double s) {
            const double h = eval_h(T, s, wp);
            return h * h;
        },
        m.r_max(), decay);
    return std::sqrt(sum);
}

NormScalingReport h_norm_scaling(const ManifoldModel& m, const WeightParams& wp, std::span<const double> T_values,
                                 double tolerance) {
    if (T_values.size() < 2) throw InsufficientDataError("weight", "norm scaling needs at least two T values");
    NormScalingReport rep;
    std::vector<double> x, y;
    for (double T : T_values) {
        const double norm = h_l2_norm(m, wp, T);
        rep.T_values.push_back(T);
        rep.norms.push_back(norm);
        x.push_back(std::log(T));
        y.push_back(std::log(norm));
    }
    rep.fitted_exponent = quad::fit_line(x, y).slope;
    rep.predicted_exponent = wp.n / (2.0 * wp.alpha);
    rep.matches_prediction = std::abs(rep.fitted_exponent - rep.predicted_exponent) <= tolerance;
    rep.matches_claim = std::abs(rep.fitted_exponent - rep.claimed_exponent) <= tolerance;
    return rep;
}

}  // namespace fraclab
