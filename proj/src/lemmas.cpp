#include "fraclab/lemmas.hpp"

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fraclab {

MinWedge minwedge_check(double y) {
    if (!(y > 0.0)) throw ParameterError("lemmas", "min-wedge comparison needs y > 0");
    return {std::min(1.0, y), 1.0 / (1.0 + 1.0 / y)};
}

namespace {

void require_comparable_geometry(const ManifoldModel& m) {
    if (m.warping().kind() == WarpingKind::flat) return;
    if (!check_assumptions(m).passes)
        throw ParameterError("lemmas", "integral scalings need a model that passes the geometric assumptions");
}

/// ∫_a^b g(r)·density(r) dr with Gauss-Legendre on every grid interval meeting [a, b].
template <class G>
double grid_integral(const ManifoldModel& m, G&& g, double a, double b) {
    const auto& r = m.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double lo = std::max(a, r[i]), hi = std::min(b, r[i + 1]);
        if (hi <= lo) continue;
        sum += quad::gauss8([&](double s) { return g(s) * m.density(s); }, lo, hi);
    }
    return sum;
}

ScalingFit finish_fit(ScalingFit fit) {
    if (fit.samples.size() < 5) throw InsufficientDataError("lemmas", "a scaling fit needs at least 5 samples");
    double lo = fit.samples.front().scale, hi = lo;
    std::vector<double> x, y;
    for (const auto& s : fit.samples) {
        lo = std::min(lo, s.scale);
        hi = std::max(hi, s.scale);
        x.push_back(std::log(s.scale));
        y.push_back(std::log(s.integral));
    }
    if (hi < 100.0 * lo) throw InsufficientDataError("lemmas", "scaling samples must span at least two decades");
    const auto line = quad::fit_line(x, y);
    fit.fitted_exponent = line.slope;
    fit.residual = line.max_residual;
    return fit;
}

}  // namespace

double case1_integral(const ManifoldModel& m, double gamma, double alpha, double t, double* tail) {
    if (!(gamma > 0.5 * m.dim()))
        throw DivergenceError("lemmas", "case 1 diverges unless gamma > n/2");
    if (!(alpha > 0.0) || !(t > 0.0)) throw ParameterError("lemmas", "case 1 needs alpha > 0 and t > 0");
    const double core2 = std::pow(t, 2.0 / alpha);
    auto g = [&](double r) { return std::pow(core2 + r * r, -gamma); };
    const auto& r = m.grid();
    const auto& w = m.measure_weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) sum += w[i] * g(r[i]);
    const double outer = m.power_tail(g, m.r_max(), 2.0 * gamma);
    if (tail) *tail = outer;
    return sum + outer;
}

double case2_integral(const ManifoldModel& m, double gamma, double R) {
    const double n = m.dim();
    if (!(gamma >= 0.0 && gamma < n)) throw DivergenceError("lemmas", "case 2 diverges unless 0 <= gamma < n");
    if (!(R > 0.0) || R > m.r_max()) throw RangeError("lemmas", "case 2 radius must lie in (0, r_max]");
    const auto& r = m.grid();
    const double a = std::min(R, r[1]);
    // [0, a]: r^{n−1−γ}·s(r) with s = density/r^{n−1} smooth; substitute r = a·u^{1/(n−γ)}
    const double k = n - gamma;
    auto smooth = [&](double s) { return m.density(s) / std::pow(s, n - 1.0); };
    double sum = std::pow(a, k) / k * quad::gauss8([&](double u) { return smooth(a * std::pow(u, 1.0 / k)); }, 0.0, 1.0);
    sum += grid_integral(m, [&](double s) { return std::pow(s, -gamma); }, a, R);
    return sum;
}

double case3_integral(const ManifoldModel& m, double gamma, double R, double* tail) {
    const double n = m.dim();
    if (!(gamma > n)) throw DivergenceError("lemmas", "case 3 diverges unless gamma > n");
    if (!(R > 0.0)) throw RangeError("lemmas", "case 3 radius must be positive");
    auto g = [&](double s) { return std::pow(s, -gamma); };
    if (R >= m.r_max()) {
        const double outer = m.power_tail(g, R, gamma);
        if (tail) *tail = outer;
        return outer;
    }
    const double outer = m.power_tail(g, m.r_max(), gamma);
    if (tail) *tail = outer;
    return grid_integral(m, g, R, m.r_max()) + outer;
}

ScalingFit integral_case1(const ManifoldModel& m, double gamma, double alpha, std::span<const double> t_values) {
    require_comparable_geometry(m);
    ScalingFit fit;
    fit.case_id = "case1";
    fit.gamma = gamma;
    fit.alpha = alpha;
    fit.predicted_exponent = (m.dim() - 2.0 * gamma) / alpha;
    for (double t : t_values) {
        ScalingSample s;
        s.scale = t;
        s.integral = case1_integral(m, gamma, alpha, t, &s.tail);
        fit.samples.push_back(s);
    }
    return finish_fit(std::move(fit));
}

ScalingFit integral_case2(const ManifoldModel& m, double gamma, std::span<const double> R_values) {
    require_comparable_geometry(m);
    ScalingFit fit;
    fit.case_id = "case2";
    fit.gamma = gamma;
    fit.predicted_exponent = m.dim() - gamma;
    for (double R : R_values) fit.samples.push_back({R, case2_integral(m, gamma, R), 0.0});
    return finish_fit(std::move(fit));
}

ScalingFit integral_case3(const ManifoldModel& m, double gamma, std::span<const double> R_values) {
    require_comparable_geometry(m);
    ScalingFit fit;
    fit.case_id = "case3";
    fit.gamma = gamma;
    fit.predicted_exponent = m.dim() - gamma;
    for (double R : R_values) {
        ScalingSample s;
        s.scale = R;
        s.integral = case3_integral(m, gamma, R, &s.tail);
        fit.samples.push_back(s);
    }
    return finish_fit(std::move(fit));
}

}  // namespace fraclab
