#pragma once

#include "fraclab/field_state.hpp"
#include "fraclab/spectral_operator.hpp"
#include "fraclab/weight.hpp"

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

/// forcing: F = i|u|^p. gauge: F = |u|^{p−1}u. linear: F ≡ 0 (control runs).
enum class NonlinearityForm { forcing, gauge, linear };

std::string to_string(NonlinearityForm form);
NonlinearityForm nonlinearity_form_from_string(const std::string& s);

struct NonlinearitySpec {
    double p = 1.25;
    NonlinearityForm form = NonlinearityForm::forcing;

    void validate() const;
    /// p < 1 + α/n.
    bool subcritical(double alpha, int n) const noexcept { return p < 1.0 + alpha / n; }
};

/// Switches for isolating one half of the splitting in diagnostics.
struct StepOptions {
    bool linear = true;
    bool nonlinear = true;
};

/// One Strang step of ∂_t u = −i[(−Δ)^{α/2}u + F(u)]: half nonlinear, exact linear, half nonlinear.
FieldState split_step(const SpectralOperator& op, double alpha, const NonlinearitySpec& nl, const FieldState& state,
                      double dt, StepOptions options = {});

/// Exact or substepped flow of ∂_t u = −iF(u) at a single node over time h.
std::complex<double> nonlinear_flow(const NonlinearitySpec& nl, std::complex<double> u, double h);

/// f₀(r) = A·exp(1 − 1/(1 − (r/ρ)²)) for r < ρ, 0 otherwise.
Field bump_field(const ManifoldModel& m, double amplitude, double radius);

/// Amplitude giving ∫ f₀ dμ = mass for a bump of the given radius (grid quadrature).
double bump_amplitude_for_mass(const ManifoldModel& m, double radius, double mass);

struct ShiftTrial {
    double N;
    /// ∫ h(N,·) f₀ dμ / ∫ f₀ dμ.
    double ratio;
};

struct ShiftSelection {
    double N = 1.0;
    std::vector<ShiftTrial> trace;
};

/// Smallest N in {1, 2, 4, …} with ∫ h(N,·) f₀ dμ ≥ threshold·∫ f₀ dμ.
ShiftSelection choose_shift(const ManifoldModel& m, const Field& f0, double alpha, double threshold = 0.75,
                            int max_doublings = 60);

struct SimulationParams {
    double dt = 0.01;
    double t_end = 20.0;
    /// Stop when ‖u‖_∞ exceeds this multiple of its initial value.
    double blowup_factor = 1e8;
    /// dt is reduced so that dt·‖u‖_∞^{p−1} ≤ step_control.
    double step_control = 0.1;
    /// Record every k-th step.
    int sample_every = 1;
    /// Reject data with ∫ f₀ dμ ≤ 0 before stepping.
    bool enforce_preconditions = true;

    void validate() const;
};

struct SeriesRow {
    double t;
    double phi;
    double l2;
    double linf;
    /// ‖Re u‖_{L²}.
    double w_l2;
};

struct BlowupReport {
    double alpha = 1.0;
    int n = 2;
    double p = 1.25;
    NonlinearityForm form = NonlinearityForm::forcing;
    double N = 1.0;
    SimulationParams params;
    std::vector<ShiftTrial> shift_trace;

    double mass0 = 0.0;
    std::size_t steps = 0;
    /// "t_end", "blowup-threshold" or "non-finite".
    std::string stop_reason;
    std::vector<SeriesRow> series;

    std::optional<double> t_blow_observed;
    std::optional<double> t_blow_fitted;
    std::optional<double> t_star_theory;
    std::optional<double> t_ratio;
    /// C_emp from the integral inequality; empty when the series is too short.
    std::optional<double> inequality_margin;
    bool phi_increasing = false;
    bool holder_ok = false;
    std::vector<std::string> warnings;
};

BlowupReport run_simulation(const SpectralOperator& op, const NonlinearitySpec& nl, const WeightParams& wp,
                            const FieldState& u0, const SimulationParams& params);

/// ‖w(t)‖ ≥ φ(t)/‖h(t+N)‖ − tol at every sample, tol = 1e-8·max(1, φ/‖h‖).
bool l2_lower_bound_check(const ManifoldModel& m, const BlowupReport& report, const WeightParams& wp);

// lifespan -----------------------------------------------------------------

struct LifespanEstimate {
    double N = 0.0;
    double phi0 = 0.0;
    double p = 0.0;
    double alpha = 0.0;
    int n = 0;
    double beta = 0.0;
    double t_star = 0.0;

    double p_conjugate() const noexcept { return p / (p - 1.0); }
};

/// t* = (N^{1−β} + φ0^{1−p})^{1/(1−β)} − N with β = n(p−1)/α.
LifespanEstimate lifespan_upper_bound(double N, double phi0, double p, double alpha, int n);

struct OdeSolution {
    double blowup_time = 0.0;
    /// Requested sample times that precede the blow-up, with φ there.
    std::vector<double> t;
    std::vector<double> phi;
};

/// Integrates φ' = Cφ^p/(t+N)^β with an adaptive Dormand–Prince stepper in ln φ.
OdeSolution ode_blowup_solve(double N, double phi0, double p, double alpha, int n, double C,
                             std::span<const double> sample_times = {});

double ode_blowup_oracle(double N, double phi0, double p, double alpha, int n, double C);

/// Extrapolated blow-up time from the last 20% of (t, φ); empty when the fit is refused.
std::optional<double> detect_blowup(std::span<const double> t, std::span<const double> phi, double beta, double p,
                                    double N);

/// Largest C ≥ 0 with φ_k ≥ A + C ∫₀^{t_k} |φ|^p/(τ+N)^β dτ at every sample (trapezoid in τ).
double integral_inequality_constant(std::span<const double> t, std::span<const double> phi, double A, double p,
                                    double beta, double N);

/// C_emp for a simulation, with A = ½∫ f₀ dμ.
double verify_integral_inequality(const BlowupReport& report, const WeightParams& wp, const NonlinearitySpec& nl);

}  // namespace fraclab
