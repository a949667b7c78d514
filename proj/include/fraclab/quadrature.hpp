#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace fraclab::quad {

/// Fixed 8-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss8(F&& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

/// Composite 8-point Gauss-Legendre over `panels` equal sub-intervals of [a, b].
template <class F>
double gauss8_composite(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) sum += gauss8(f, a + k * h, a + (k + 1) * h);
    return sum;
}

/// Nodes and weights of a quadrature rule in one variable.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Composite Gauss-Legendre rule (8 points per panel) on [a, b].
Rule gauss_legendre_panels(double a, double b, int panels);

/// Composite trapezoid rule with `panels` intervals on [a, b].
Rule trapezoid_panels(double a, double b, int panels);

/// ∫_R^∞ g(r) r^{dim-1} dr for an integrand decaying like r^{-decay}, decay > dim.
/// The substitution r = R·v^{-1/(decay-dim)} maps the tail to a smooth integrand on (0, 1].
template <class G>
double power_tail(G&& g, double R, double dim, double decay, int panels = 16) {
    const double k = decay - dim;
    auto integrand = [&](double v) {
        const double u = std::pow(v, 1.0 / k);
        const double r = R / u;
        return g(r) * std::pow(R, dim) * std::pow(u, -dim) / (v * k);
    };
    return gauss8_composite(integrand, 0.0, 1.0, panels);
}

/// Least-squares line y = intercept + slope·x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

/// lo·(hi/lo)^{k/(count−1)}, k = 0 … count−1.
std::vector<double> log_spaced(double lo, double hi, int count);

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace fraclab::quad
