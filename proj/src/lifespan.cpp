#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"
#include "fraclab/solver.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace fraclab {

namespace {

double beta_of(double p, double alpha, int n) { return n * (p - 1.0) / alpha; }

void check_range(double N, double phi0, double p, double alpha, int n) {
    if (!(N > 0.0)) throw ParameterError("solver", "N must be positive");
    if (!(phi0 > 0.0)) throw ParameterError("solver", "phi0 must be positive");
    if (!(p > 1.0)) throw ParameterError("solver", "p must exceed 1");
    if (!(alpha > 0.0) || n < 1) throw ParameterError("solver", "alpha must be positive and n at least 1");
    if (!(beta_of(p, alpha, n) < 1.0))
        throw SupercriticalError("solver", "n(p-1)/alpha must be below 1 for the lifespan formula");
}

/// (p−1)·ln φ at which integration stops, i.e. φ^{p−1} = 1e3.
const double kHaltLevel = std::log(1e3);

}  // namespace

LifespanEstimate lifespan_upper_bound(double N, double phi0, double p, double alpha, int n) {
    check_range(N, phi0, p, alpha, n);
    LifespanEstimate e{N, phi0, p, alpha, n, beta_of(p, alpha, n), 0.0};
    const double k = 1.0 - e.beta;
    e.t_star = std::pow(std::pow(N, k) + std::pow(phi0, 1.0 - p), 1.0 / k) - N;
    return e;
}

OdeSolution ode_blowup_solve(double N, double phi0, double p, double alpha, int n, double C,
                             std::span<const double> sample_times) {
    check_range(N, phi0, p, alpha, n);
    if (!(C > 0.0)) throw ParameterError("solver", "comparison constant C must be positive");
    const double beta = beta_of(p, alpha, n);
    const double q = p - 1.0;

    using State = std::array<double, 1>;
    // z = ln φ:  z' = C·exp((p−1)z)/(t+N)^β
    auto rhs = [&](const State& z, State& dz, double t) { dz[0] = C * std::exp(q * z[0]) / std::pow(t + N, beta); };

    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    State z{std::log(phi0)};
    double dt0 = 1e-3 * std::min(1.0, std::pow(phi0, -q) * std::pow(N, beta) / C);
    stepper.initialize(z, 0.0, dt0);

    OdeSolution sol;
    std::vector<double> times(sample_times.begin(), sample_times.end());
    std::sort(times.begin(), times.end());
    std::size_t next = 0;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > 10'000'000) throw Error("solver", "comparison ODE did not reach its halting level");
        stepper.do_step(rhs);
        const double t = stepper.current_time();
        while (next < times.size() && times[next] <= t) {
            State zs;
            stepper.calc_state(times[next], zs);
            sol.t.push_back(times[next]);
            sol.phi.push_back(std::exp(zs[0]));
            ++next;
        }
        const double zt = stepper.current_state()[0];
        if (!std::isfinite(zt)) throw Error("solver", "comparison ODE overflowed before the halting level");
        if (q * zt >= kHaltLevel) {
            // remaining time with (t+N)^β frozen: y/((p−1)C)·(t+N)^β, y = φ^{1−p}
            const double y = std::exp(-q * zt);
            sol.blowup_time = t + y * std::pow(t + N, beta) / (q * C);
            return sol;
        }
    }
}

double ode_blowup_oracle(double N, double phi0, double p, double alpha, int n, double C) {
    return ode_blowup_solve(N, phi0, p, alpha, n, C).blowup_time;
}

std::optional<double> detect_blowup(std::span<const double> t, std::span<const double> phi, double beta, double p,
                                    double N) {
    if (t.size() != phi.size() || t.size() < 10 || !(beta < 1.0) || !(p > 1.0)) return std::nullopt;
    const std::size_t start = t.size() - std::max<std::size_t>(5, t.size() / 5);
    for (std::size_t k = start + 1; k < t.size(); ++k)
        if (!(phi[k] > phi[k - 1])) return std::nullopt;
    if (!(phi.front() > 0.0) || !(phi.back() > 10.0 * phi.front())) return std::nullopt;

    const double k1 = 1.0 - beta;
    std::vector<double> x, y;
    for (std::size_t k = start; k < t.size(); ++k) {
        x.push_back(std::pow(t[k] + N, k1));
        y.push_back(std::pow(phi[k], 1.0 - p));
    }
    const auto line = quad::fit_line(x, y);
    if (!(line.slope < 0.0)) return std::nullopt;
    const double x0 = -line.intercept / line.slope;
    const double tb = std::pow(x0, 1.0 / k1) - N;
    if (!std::isfinite(tb)) return std::nullopt;
    return std::max(tb, t.back());
}

double integral_inequality_constant(std::span<const double> t, std::span<const double> phi, double A, double p,
                                    double beta, double N) {
    if (t.size() != phi.size()) throw ParameterError("solver", "series columns differ in length");
    if (t.size() < 50) throw InsufficientDataError("solver", "integral inequality needs at least 50 samples");
    auto g = [&](std::size_t k) { return std::pow(std::abs(phi[k]), p) / std::pow(t[k] + N, beta); };
    double integral = 0.0, c = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < t.size(); ++k) {
        integral += 0.5 * (t[k] - t[k - 1]) * (g(k) + g(k - 1));
        if (integral > 0.0) c = std::min(c, (phi[k] - A) / integral);
    }
    if (phi.front() < A) return 0.0;
    return std::isfinite(c) ? std::max(0.0, c) : 0.0;
}

double verify_integral_inequality(const BlowupReport& report, const WeightParams& wp, const NonlinearitySpec& nl) {
    std::vector<double> t, phi;
    for (const auto& row : report.series) {
        t.push_back(row.t);
        phi.push_back(row.phi);
    }
    const double beta = wp.n * (nl.p - 1.0) / wp.alpha;
    return integral_inequality_constant(t, phi, 0.5 * report.mass0, nl.p, beta, wp.shift_N);
}

}  // namespace fraclab
