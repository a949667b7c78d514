#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fraclab/error.hpp"
#include "fraclab/lemmas.hpp"
#include "fraclab/solver.hpp"
#include "oracles.hpp"

#include <random>

using namespace fraclab;

namespace {

SpectralOperator flat_op(int n, double r_max, int nodes) {
    return assemble(std::make_shared<const ManifoldModel>(
                        make_model(n, WarpingSpec::flat(), r_max, nodes, {GridKind::graded, 1.0})),
                    OuterBoundary::dirichlet);
}

double l2(const ManifoldModel& m, const Eigen::VectorXcd& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.measure_weights()[i] * std::norm(u(static_cast<Eigen::Index>(i)));
    return std::sqrt(s);
}

FieldState bump_state(const ManifoldModel& m, double amplitude, double radius) {
    Field f = bump_field(m, amplitude, radius);
    return {f.cast<std::complex<double>>(), 0.0};
}

}  // namespace

TEST_CASE("linear flow is unitary") {
    auto op = flat_op(2, 50.0, 256);
    NonlinearitySpec nl{1.5, NonlinearityForm::linear};
    FieldState s = bump_state(op.model(), 1.0, 3.0);
    const double n0 = l2(op.model(), s.u);
    const Eigen::VectorXd c0 = op.coefficients(s.real());
    for (int k = 0; k < 1000; ++k) s = split_step(op, 1.0, nl, s, 0.01);
    CHECK(std::abs(l2(op.model(), s.u) - n0) < 1e-10 * n0);
    const Eigen::VectorXd cr = op.coefficients(s.real()), ci = op.coefficients(s.imag());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < c0.size(); ++k) worst = std::max(worst, std::abs(std::hypot(cr(k), ci(k)) - std::abs(c0(k))));
    CHECK(worst < 1e-10 * c0.cwiseAbs().maxCoeff());
    CHECK(s.t == doctest::Approx(10.0));
}

TEST_CASE("gauge form conserves mass") {
    auto op = flat_op(2, 50.0, 256);
    NonlinearitySpec nl{2.0, NonlinearityForm::gauge};
    FieldState s = bump_state(op.model(), 2.0, 2.0);
    const double n0 = l2(op.model(), s.u);
    for (int k = 0; k < 1000; ++k) s = split_step(op, 1.0, nl, s, 1e-3);
    CHECK(std::abs(l2(op.model(), s.u) - n0) < 1e-6 * n0);
}

TEST_CASE("forcing flow without the linear part is the scalar solution") {
    auto op = flat_op(2, 20.0, 128);
    NonlinearitySpec nl{1.5, NonlinearityForm::forcing};
    FieldState s = bump_state(op.model(), 1.0, 2.0);
    const Eigen::VectorXd w0 = s.real();
    const double dt = 0.05;
    for (int k = 0; k < 20; ++k) s = split_step(op, 1.0, nl, s, dt, {false, true});
    for (Eigen::Index i = 0; i < w0.size(); ++i) {
        if (w0(i) <= 0.0) continue;
        const double exact = std::pow(std::pow(w0(i), -0.5) - 0.5 * 1.0, -2.0);
        CHECK(s.u(i).real() == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("frozen-imaginary forcing substep") {
    NonlinearitySpec nl{2.0, NonlinearityForm::forcing};
    for (auto [w, v] : {std::pair{0.3, 0.5}, std::pair{-1.0, 0.2}, std::pair{2.0, 1.0}}) {
        const auto u = nonlinear_flow(nl, {w, v}, 0.2);
        CHECK(u.real() == doctest::Approx(oracle::riccati_flow(w, v, 0.2)).epsilon(1e-8));
        CHECK(u.imag() == v);
    }
    NonlinearitySpec neg{1.5, NonlinearityForm::forcing};
    // w' = |w|^p pulls negative values toward zero
    const auto u = nonlinear_flow(neg, {-1.0, 0.0}, 1.0);
    CHECK(u.real() == doctest::Approx(-std::pow(1.0 + 0.5, -2.0)));
    CHECK(std::isinf(nonlinear_flow(neg, {1.0, 0.0}, 5.0).real()));
}

TEST_CASE("bump data and shift selection") {
    auto m = make_model(2, WarpingSpec::flat(), 200.0, 512, {GridKind::graded, 1.0});
    const double A = bump_amplitude_for_mass(m, 1.0, 1.0);
    const Field f = bump_field(m, A, 1.0);
    CHECK(m.integrate(std::span<const double>(f.data(), static_cast<std::size_t>(f.size()))) == doctest::Approx(1.0));
    CHECK(f(0) == doctest::Approx(A));
    auto sel = choose_shift(m, f, 1.0);
    REQUIRE(!sel.trace.empty());
    CHECK(sel.trace.back().ratio >= 0.75);
    for (std::size_t k = 0; k + 1 < sel.trace.size(); ++k) {
        CHECK(sel.trace[k].ratio < 0.75);
        CHECK(sel.trace[k + 1].N == 2.0 * sel.trace[k].N);
    }
    CHECK_THROWS_AS(choose_shift(m, Field::Zero(f.size()), 1.0), ParameterError);
}

TEST_CASE("closed-form lifespan") {
    auto e = lifespan_upper_bound(4.0, 1.0, 1.25, 1.0, 2);
    CHECK(e.beta == doctest::Approx(0.5));
    CHECK(e.t_star == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(e.p_conjugate() == doctest::Approx(5.0));
    CHECK(lifespan_upper_bound(4.0, 1e30, 1.25, 1.0, 2).t_star < 1e-6);
    double prev = 1e300;
    for (int k = 0; k < 10; ++k) {
        const double t = lifespan_upper_bound(4.0, std::pow(2.0, k), 1.25, 1.0, 2).t_star;
        CHECK(t < prev);
        prev = t;
    }
    CHECK_THROWS_AS(lifespan_upper_bound(4.0, 1.0, 1.5, 1.0, 2), SupercriticalError);
    CHECK_THROWS_AS(lifespan_upper_bound(4.0, 0.0, 1.25, 1.0, 2), ParameterError);
}

TEST_CASE("comparison ODE") {
    CHECK(ode_blowup_oracle(4.0, 1.0, 1.25, 1.0, 2, 2.0) == doctest::Approx(5.0).epsilon(1e-3));
    for (double C : {0.5, 1.0, 3.0})
        for (double p : {1.1, 1.25, 1.4}) {
            const double beta = 2.0 * (p - 1.0);
            CHECK(ode_blowup_oracle(2.0, 0.7, p, 1.0, 2, C) ==
                  doctest::Approx(oracle::comparison_blowup(2.0, 0.7, p, beta, C)).epsilon(1e-3));
        }
    CHECK(ode_blowup_oracle(4.0, 1.0, 1.25, 1.0, 2, 1.0) > ode_blowup_oracle(4.0, 1.0, 1.25, 1.0, 2, 2.0));
    double prev = 0.0;
    for (double p : {1.2, 1.1, 1.05, 1.01, 1.001, 1.0001}) {
        const double t = ode_blowup_oracle(4.0, 1.0, p, 1.0, 2, 2.0);
        CHECK(t > prev);
        prev = t;
    }
    CHECK(ode_blowup_oracle(4.0, 1.0, 1.01, 1.0, 2, 2.0) ==
          doctest::Approx(oracle::comparison_blowup(4.0, 1.0, 1.01, 0.02, 2.0)).epsilon(1e-3));
    CHECK(prev > 1e3);
    CHECK_THROWS_AS(ode_blowup_oracle(4.0, 1.0, 1.25, 1.0, 2, 0.0), ParameterError);
}

TEST_CASE("ODE trajectory samples") {
    const std::vector<double> ts{0.0, 1.0, 2.0, 4.9, 7.0};
    auto sol = ode_blowup_solve(4.0, 1.0, 1.25, 1.0, 2, 2.0, ts);
    REQUIRE(sol.t.size() == 4);
    for (std::size_t k = 0; k < sol.t.size(); ++k)
        CHECK(sol.phi[k] == doctest::Approx(oracle::comparison_solution(sol.t[k], 4.0, 1.0, 1.25, 0.5, 2.0)).epsilon(1e-6));
}

namespace {

void trajectory(double N, double p, double C, double frac, int count, std::vector<double>& t, std::vector<double>& phi) {
    const double beta = 2.0 * (p - 1.0);
    const double tb = oracle::comparison_blowup(N, 1.0, p, beta, C);
    t.clear();
    phi.clear();
    for (int k = 0; k < count; ++k) {
        t.push_back(frac * tb * k / (count - 1));
        phi.push_back(oracle::comparison_solution(t.back(), N, 1.0, p, beta, C));
    }
}

}  // namespace

TEST_CASE("blow-up extrapolation") {
    std::vector<double> t, phi;
    for (double p : {1.1, 1.25, 1.4})
        for (double N : {1.0, 4.0, 16.0}) {
            const double beta = 2.0 * (p - 1.0);
            trajectory(N, p, 2.0, 0.999, 200, t, phi);
            auto sol = ode_blowup_solve(N, 1.0, p, 1.0, 2, 2.0, t);
            auto fit = detect_blowup(sol.t, sol.phi, beta, p, N);
            REQUIRE(fit.has_value());
            CHECK(*fit == doctest::Approx(sol.blowup_time).epsilon(5e-3));
        }

    const std::vector<double> flat_t = log_spaced(1.0, 10.0, 50), flat_phi(50, 3.0);
    CHECK_FALSE(detect_blowup(flat_t, flat_phi, 0.5, 1.25, 4.0).has_value());

    trajectory(4.0, 1.25, 2.0, 0.999, 200, t, phi);
    std::mt19937 rng(20240601);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> noisy = phi;
    for (double& x : noisy) x *= 1.0 + noise(rng);
    std::sort(noisy.begin(), noisy.end());
    auto fit = detect_blowup(t, noisy, 0.5, 1.25, 4.0);
    REQUIRE(fit.has_value());
    CHECK(*fit == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("integral inequality constant") {
    std::vector<double> t, phi;
    trajectory(4.0, 1.25, 2.0, 0.9, 2000, t, phi);
    CHECK(integral_inequality_constant(t, phi, 1.0, 1.25, 0.5, 4.0) == doctest::Approx(2.0).epsilon(0.05));
    const std::vector<double> tc = log_spaced(1.0, 10.0, 60), pc(60, 1.0);
    CHECK(integral_inequality_constant(tc, pc, 1.0, 1.25, 0.5, 4.0) == 0.0);
    CHECK(integral_inequality_constant(tc, pc, 0.5, 1.25, 0.5, 4.0) > 0.0);
    const std::vector<double> few(10, 1.0);
    CHECK_THROWS_AS(integral_inequality_constant(few, few, 0.5, 1.25, 0.5, 4.0), InsufficientDataError);
}

TEST_CASE("Hölder lower bound") {
    auto m = make_model(2, WarpingSpec::flat(), 2000.0, 512, {GridKind::graded, 1.0});
    WeightParams wp{1.0, 2, 0, 1.0};
    BlowupReport rep;
    const Field h = h_field(m, 1.5, wp);
    double hh = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) hh += m.measure_weights()[i] * h(static_cast<Eigen::Index>(i)) * h(static_cast<Eigen::Index>(i));
    const double c = 3.0;
    rep.series.push_back({0.5, c * hh, 0.0, 0.0, c * std::sqrt(hh)});
    CHECK(l2_lower_bound_check(m, rep, wp));
    CHECK(rep.series[0].w_l2 == doctest::Approx(rep.series[0].phi / h_l2_norm(m, wp, 1.5)).epsilon(1e-10));

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldState s;
    s.t = 0.5;
    s.u.resize(static_cast<Eigen::Index>(m.size()));
    double ww = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = u(rng);
        s.u(static_cast<Eigen::Index>(i)) = x;
        ww += m.measure_weights()[i] * x * x;
    }
    const double phi = phi_of_state(m, s, wp);
    CHECK(std::sqrt(ww) - std::abs(phi) / h_l2_norm(m, wp, 1.5) > 0.0);
    rep.series[0].w_l2 = 0.5 * rep.series[0].w_l2;
    CHECK_FALSE(l2_lower_bound_check(m, rep, wp));
}

TEST_CASE("simulation preconditions and control runs") {
    auto op = flat_op(2, 100.0, 256);
    WeightParams wp{1.0, 2, 0, 2.0};
    SimulationParams sp;
    sp.t_end = 1.0;
    FieldState zero{Eigen::VectorXcd::Zero(256), 0.0};
    CHECK_THROWS_AS(run_simulation(op, {1.25, NonlinearityForm::forcing}, wp, zero, sp), ParameterError);

    auto small = bump_state(op.model(), 0.01, 1.0);
    auto rep = run_simulation(op, {1.25, NonlinearityForm::gauge}, wp, small, sp);
    CHECK(rep.stop_reason == "t_end");
    CHECK_FALSE(rep.t_blow_observed.has_value());
    CHECK(rep.holder_ok);
    CHECK(rep.series.back().t == doctest::Approx(1.0));

    auto lin = run_simulation(op, {1.25, NonlinearityForm::linear}, wp, small, sp);
    REQUIRE(lin.inequality_margin.has_value());
    CHECK(lin.series.front().phi >= 0.5 * lin.mass0);

    auto wrong = bump_state(op.model(), 1.0, 1.0);
    wrong.u.conservativeResize(100);
    CHECK_THROWS_AS(run_simulation(op, {1.25, NonlinearityForm::forcing}, wp, wrong, sp), ParameterError);
}

TEST_CASE("forcing run grows monotonically and blows up") {
    auto op = flat_op(2, 200.0, 512);
    const auto& m = op.model();
    const Field f = bump_field(m, bump_amplitude_for_mass(m, 1.0, 1.0), 1.0);
    WeightParams wp{1.0, 2, 0, choose_shift(m, f, 1.0).N};
    SimulationParams sp;
    auto rep = run_simulation(op, {1.25, NonlinearityForm::forcing}, wp, {f.cast<std::complex<double>>(), 0.0}, sp);
    CHECK(rep.phi_increasing);
    CHECK(rep.stop_reason == "blowup-threshold");
    REQUIRE(rep.t_blow_fitted.has_value());
    CHECK(*rep.t_blow_fitted >= rep.series.back().t);
    CHECK(rep.holder_ok);
    REQUIRE(rep.inequality_margin.has_value());
    CHECK(*rep.inequality_margin > 0.0);
    CHECK(rep.t_star_theory.has_value());
    for (std::size_t k = 1; k < rep.series.size(); ++k) CHECK(rep.series[k].t > rep.series[k - 1].t);
}

TEST_CASE("halving dt leaves phi unchanged inside the convergence window") {
    auto op = flat_op(2, 200.0, 256);
    const auto& m = op.model();
    const Field f = bump_field(m, bump_amplitude_for_mass(m, 1.0, 1.0), 1.0);
    WeightParams wp{1.0, 2, 0, 2.0};
    NonlinearitySpec nl{1.25, NonlinearityForm::forcing};
    auto run = [&](double dt) {
        SimulationParams sp;
        sp.dt = dt;
        sp.t_end = 6.0;
        return run_simulation(op, nl, wp, {f.cast<std::complex<double>>(), 0.0}, sp);
    };
    const auto coarse = run(0.02), fine = run(0.01);
    auto at = [](const BlowupReport& r, double t) {
        for (std::size_t k = 1; k < r.series.size(); ++k)
            if (r.series[k].t >= t) {
                const auto &a = r.series[k - 1], &b = r.series[k];
                return a.phi + (b.phi - a.phi) * (t - a.t) / (b.t - a.t);
            }
        return r.series.back().phi;
    };
    const double phi0 = coarse.series.front().phi;
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
        const double a = at(coarse, t), b = at(fine, t);
        if (b > 1e3 * phi0) break;
        CHECK(std::abs(a - b) < 0.01 * b);
    }
}
