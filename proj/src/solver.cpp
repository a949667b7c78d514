#include "fraclab/solver.hpp"

#include "fraclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab {

std::string to_string(NonlinearityForm form) {
    switch (form) {
        case NonlinearityForm::forcing: return "forcing";
        case NonlinearityForm::gauge: return "gauge";
        case NonlinearityForm::linear: return "linear";
    }
    return "forcing";
}

NonlinearityForm nonlinearity_form_from_string(const std::string& s) {
    if (s == "forcing") return NonlinearityForm::forcing;
    if (s == "gauge") return NonlinearityForm::gauge;
    if (s == "linear") return NonlinearityForm::linear;
    throw ParameterError("solver", "unknown nonlinearity form '" + s + "'");
}

void NonlinearitySpec::validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("solver", "nonlinearity exponent p must exceed 1");
}

void SimulationParams::validate() const {
    if (!(dt > 0.0)) throw ParameterError("solver", "dt must be positive");
    if (!(t_end > 0.0)) throw ParameterError("solver", "t_end must be positive");
    if (!(blowup_factor > 1.0)) throw ParameterError("solver", "blow-up factor must exceed 1");
    if (!(step_control > 0.0)) throw ParameterError("solver", "step control must be positive");
    if (sample_every < 1) throw ParameterError("solver", "sample cadence must be at least 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// w' = |w|^p with v = 0, exact.
double scalar_forcing(double w, double p, double h) {
    if (w == 0.0) return 0.0;
    const double q = p - 1.0;
    if (w > 0.0) {
        const double base = std::pow(w, -q) - q * h;
        return base > 0.0 ? std::pow(base, -1.0 / q) : kInf;
    }
    return -std::pow(std::pow(-w, -q) + q * h, -1.0 / q);
}

/// w' = (w² + v²)^{p/2} with v frozen, RK4 with h·|u|^{p−1} ≤ 0.01 per substep.
double frozen_forcing(double w, double v, double p, double h) {
    auto rhs = [&](double x) { return std::pow(x * x + v * v, 0.5 * p); };
    double remaining = h;
    while (remaining > 0.0) {
        const double mag = std::sqrt(w * w + v * v);
        const double rate = std::pow(mag, p - 1.0);
        double sub = rate > 0.0 ? std::min(remaining, 0.01 / rate) : remaining;
        if (!(sub > 0.0) || !std::isfinite(w)) return kInf;
        if (sub < remaining * 1e-12) return kInf;
        const double k1 = rhs(w);
        const double k2 = rhs(w + 0.5 * sub * k1);
        const double k3 = rhs(w + 0.5 * sub * k2);
        const double k4 = rhs(w + sub * k3);
        w += sub / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        remaining -= sub;
    }
    return w;
}

void nonlinear_half(const NonlinearitySpec& nl, Eigen::VectorXcd& u, double h) {
    if (nl.form == NonlinearityForm::linear) return;
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = nonlinear_flow(nl, u(i), h);
}

void linear_step(const SpectralOperator& op, double alpha, Eigen::VectorXcd& u, double dt) {
    const Eigen::Index n = op.dofs();
    const auto& v = op.eigenvectors();
    Eigen::MatrixXd block(n, 2);
    block.col(0) = op.mass().cwiseProduct(u.head(n).real());
    block.col(1) = op.mass().cwiseProduct(u.head(n).imag());
    Eigen::MatrixXd c = v.transpose() * block;
    const auto& lam = op.eigenvalues();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double theta = -dt * std::pow(std::max(lam(k), 0.0), 0.5 * alpha);
        const std::complex<double> z = std::complex<double>(c(k, 0), c(k, 1)) * std::polar(1.0, theta);
        c(k, 0) = z.real();
        c(k, 1) = z.imag();
    }
    const Eigen::MatrixXd out = v * c;
    u.setZero();
    for (Eigen::Index i = 0; i < n; ++i) u(i) = {out(i, 0), out(i, 1)};
}

double weighted_l2(const std::vector<double>& w, const Eigen::VectorXcd& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(u(static_cast<Eigen::Index>(i)));
    return std::sqrt(s);
}

double weighted_l2_real(const std::vector<double>& w, const Eigen::VectorXcd& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = u(static_cast<Eigen::Index>(i)).real();
        s += w[i] * x * x;
    }
    return std::sqrt(s);
}

}  // namespace

std::complex<double> nonlinear_flow(const NonlinearitySpec& nl, std::complex<double> u, double h) {
    switch (nl.form) {
        case NonlinearityForm::linear: return u;
        case NonlinearityForm::gauge: return u * std::polar(1.0, -h * std::pow(std::abs(u), nl.p - 1.0));
        case NonlinearityForm::forcing:
            if (u.imag() == 0.0) return {scalar_forcing(u.real(), nl.p, h), 0.0};
            return {frozen_forcing(u.real(), u.imag(), nl.p, h), u.imag()};
    }
    return u;
}

FieldState split_step(const SpectralOperator& op, double alpha, const NonlinearitySpec& nl, const FieldState& state,
                      double dt, StepOptions options) {
    if (!(dt > 0.0)) throw ParameterError("solver", "dt must be positive");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("solver", "alpha must lie in (0, 2]");
    if (state.u.size() != static_cast<Eigen::Index>(op.model().size()))
        throw ParameterError("solver", "field state does not match the operator grid");
    FieldState next = state;
    if (options.nonlinear) nonlinear_half(nl, next.u, 0.5 * dt);
    if (options.linear && next.finite()) linear_step(op, alpha, next.u, dt);
    if (options.nonlinear && next.finite()) nonlinear_half(nl, next.u, 0.5 * dt);
    next.t = state.t + dt;
    return next;
}

Field bump_field(const ManifoldModel& m, double amplitude, double radius) {
    if (!(radius > 0.0)) throw ParameterError("solver", "bump radius must be positive");
    const auto& r = m.grid();
    Field f = Field::Zero(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = r[i] / radius;
        if (s < 1.0) f(static_cast<Eigen::Index>(i)) = amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    return f;
}

double bump_amplitude_for_mass(const ManifoldModel& m, double radius, double mass) {
    const Field unit = bump_field(m, 1.0, radius);
    const double base = m.integrate(std::span<const double>(unit.data(), static_cast<std::size_t>(unit.size())));
    if (!(base > 0.0)) throw ResolutionError("solver", "bump radius is below the grid resolution");
    return mass / base;
}

ShiftSelection choose_shift(const ManifoldModel& m, const Field& f0, double alpha, double threshold,
                            int max_doublings) {
    const auto& w = m.measure_weights();
    const auto& r = m.grid();
    double mass = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) mass += w[i] * f0(static_cast<Eigen::Index>(i));
    if (!(mass > 0.0)) throw ParameterError("solver", "automatic N needs initial data with positive integral");
    WeightParams wp{alpha, m.dim(), 0, 1.0};
    ShiftSelection sel;
    double N = 1.0;
    for (int k = 0; k <= max_doublings; ++k, N *= 2.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * eval_h(N, r[i], wp) * f0(static_cast<Eigen::Index>(i));
        sel.trace.push_back({N, s / mass});
        if (s >= threshold * mass) {
            sel.N = N;
            return sel;
        }
    }
    throw ParameterError("solver", "no N in the doubling sweep reaches the requested fraction");
}

BlowupReport run_simulation(const SpectralOperator& op, const NonlinearitySpec& nl, const WeightParams& wp,
                            const FieldState& u0, const SimulationParams& params) {
    const auto& m = op.model();
    nl.validate();
    wp.validate();
    params.validate();
    if (wp.n != m.dim()) throw ParameterError("solver", "weight dimension does not match the model dimension");
    if (u0.u.size() != static_cast<Eigen::Index>(m.size()))
        throw ParameterError("solver", "initial state does not live on the operator grid");
    if (!u0.finite()) throw ParameterError("solver", "initial state has non-finite entries");

    BlowupReport rep;
    rep.alpha = wp.alpha;
    rep.n = wp.n;
    rep.p = nl.p;
    rep.form = nl.form;
    rep.N = wp.shift_N;
    rep.params = params;

    const auto& w = m.measure_weights();
    for (std::size_t i = 0; i < w.size(); ++i) rep.mass0 += w[i] * u0.u(static_cast<Eigen::Index>(i)).real();
    if (params.enforce_preconditions && !(rep.mass0 > 0.0))
        throw ParameterError("solver", "initial data must have positive integral");
    const bool subcritical = nl.subcritical(wp.alpha, wp.n);
    if (nl.form == NonlinearityForm::forcing && !subcritical)
        rep.warnings.push_back("p >= 1 + alpha/n: outside the range covered by the lifespan bound");

    auto record = [&](const FieldState& s) {
        rep.series.push_back({s.t, phi_of_state(m, s, wp), weighted_l2(w, s.u), s.u.cwiseAbs().maxCoeff(),
                              weighted_l2_real(w, s.u)});
    };

    FieldState state = u0;
    state.t = 0.0;
    record(state);
    const double linf0 = rep.series.front().linf;
    const double limit = params.blowup_factor * std::max(linf0, std::numeric_limits<double>::min());
    rep.stop_reason = "t_end";

    while (state.t < params.t_end * (1.0 - 1e-12)) {
        double dt = std::min(params.dt, params.t_end - state.t);
        if (nl.form != NonlinearityForm::linear) {
            const double rate = std::pow(state.u.cwiseAbs().maxCoeff(), nl.p - 1.0);
            if (rate > 0.0) dt = std::min(dt, params.step_control / rate);
        }
        FieldState next = split_step(op, wp.alpha, nl, state, dt);
        ++rep.steps;
        if (!next.finite()) {
            rep.stop_reason = "non-finite";
            rep.t_blow_observed = next.t;
            break;
        }
        state = std::move(next);
        const double linf = state.u.cwiseAbs().maxCoeff();
        if (linf > limit) {
            record(state);
            rep.stop_reason = "blowup-threshold";
            rep.t_blow_observed = state.t;
            break;
        }
        if (rep.steps % static_cast<std::size_t>(params.sample_every) == 0) record(state);
    }
    if (rep.stop_reason == "t_end" && rep.series.back().t < state.t) record(state);

    std::vector<double> ts, phis;
    for (const auto& row : rep.series) {
        ts.push_back(row.t);
        phis.push_back(row.phi);
    }
    rep.phi_increasing = true;
    for (std::size_t k = 1; k < phis.size(); ++k) rep.phi_increasing = rep.phi_increasing && phis[k] > phis[k - 1];

    const double beta = wp.n * (nl.p - 1.0) / wp.alpha;
    if (rep.t_blow_observed && beta < 1.0) {
        rep.t_blow_fitted = detect_blowup(ts, phis, beta, nl.p, wp.shift_N);
        if (!rep.t_blow_fitted) rep.warnings.push_back("blow-up extrapolation refused");
    }
    if (subcritical && rep.mass0 > 0.0) {
        rep.t_star_theory = lifespan_upper_bound(wp.shift_N, 0.5 * rep.mass0, nl.p, wp.alpha, wp.n).t_star;
        const auto t_blow = rep.t_blow_fitted ? rep.t_blow_fitted : rep.t_blow_observed;
        if (t_blow && *rep.t_star_theory > 0.0) rep.t_ratio = *t_blow / *rep.t_star_theory;
    }
    try {
        rep.inequality_margin = verify_integral_inequality(rep, wp, nl);
    } catch (const InsufficientDataError& e) {
        rep.warnings.push_back(e.what());
    }
    rep.holder_ok = l2_lower_bound_check(m, rep, wp);
    return rep;
}

bool l2_lower_bound_check(const ManifoldModel& m, const BlowupReport& report, const WeightParams& wp) {
    for (const auto& row : report.series) {
        const double bound = row.phi / h_l2_norm(m, wp, row.t + wp.shift_N);
        const double tol = 1e-8 * std::max(1.0, std::abs(bound));
        if (!(row.w_l2 >= bound - tol)) return false;
    }
    return true;
}

}  // namespace fraclab
