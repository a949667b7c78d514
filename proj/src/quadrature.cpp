#include "fraclab/quadrature.hpp"

#include "fraclab/error.hpp"

#include <algorithm>

namespace fraclab::quad {

Rule gauss_legendre_panels(double a, double b, int panels) {
    using GL = boost::math::quadrature::gauss<double, 8>;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    Rule rule;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double mid = a + (k + 0.5) * h;
        const double half = 0.5 * h;
        // Boost stores the non-negative half of a symmetric rule.
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0) {
                rule.nodes.push_back(mid);
                rule.weights.push_back(w[i] * half);
                continue;
            }
            rule.nodes.push_back(mid - half * x[i]);
            rule.weights.push_back(w[i] * half);
            rule.nodes.push_back(mid + half * x[i]);
            rule.weights.push_back(w[i] * half);
        }
    }
    return rule;
}

Rule trapezoid_panels(double a, double b, int panels) {
    Rule rule;
    const double h = (b - a) / panels;
    for (int k = 0; k <= panels; ++k) {
        rule.nodes.push_back(a + k * h);
        rule.weights.push_back((k == 0 || k == panels) ? 0.5 * h : h);
    }
    return rule;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        out[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, static_cast<double>(k) / std::max(1, count - 1));
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientDataError("quadrature", "line fit needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("quadrature", "line fit abscissae are all equal");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.intercept - fit.slope * x[i]));
    return fit;
}

}  // namespace fraclab::quad
