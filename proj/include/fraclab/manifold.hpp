#pragma once

#include "fraclab/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

enum class WarpingKind { flat, log_blend, hyperbolic, user_sampled };

/// Radial profile ψ of a rotationally symmetric metric g = dr² + ψ(r)² g_sphere.
class WarpingSpec {
public:
    static WarpingSpec flat();
    /// ψ(r) = c·r + (1 − c)·ln(1 + r), c ∈ (0, 1].
    static WarpingSpec log_blend(double c);
    static WarpingSpec hyperbolic();
    /// Piecewise-linear ψ through (r_k, ψ_k); r_0 must be 0.
    static WarpingSpec user_sampled(std::vector<double> r_nodes, std::vector<double> psi_values);

    WarpingKind kind() const noexcept { return kind_; }
    double blend() const noexcept { return c_; }
    const std::vector<double>& sample_nodes() const noexcept { return nodes_; }
    const std::vector<double>& sample_values() const noexcept { return values_; }

    /// True when ψ is known in closed form beyond any grid (all kinds but user_sampled).
    bool closed_form() const noexcept { return kind_ != WarpingKind::user_sampled; }

    double psi(double r) const;
    double dpsi(double r) const;
    double d2psi(double r) const;

    /// One-sided difference quotient for ψ'(0).
    double slope_at_origin() const;

    std::string name() const;

private:
    WarpingKind kind_ = WarpingKind::flat;
    double c_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

enum class GridKind { uniform, graded };

/// Radial node placement. Graded grids use r(s) = a·sinh(b·s), s ∈ [0, 1], which is
/// uniform (spacing ≈ a·b/M) near the origin and geometric far out.
struct GridSpec {
    GridKind kind = GridKind::uniform;
    double scale = 1.0;
};

/// Radial model manifold truncated at r_max. Immutable after construction.
class ManifoldModel {
public:
    int dim() const noexcept { return dim_; }
    /// n = 1 flat line represented by its even half [0, r_max].
    bool oracle_line() const noexcept { return dim_ == 1; }
    const WarpingSpec& warping() const noexcept { return warping_; }
    double r_max() const noexcept { return r_max_; }
    const GridSpec& grid_spec() const noexcept { return grid_spec_; }
    std::size_t size() const noexcept { return grid_.size(); }

    const std::vector<double>& grid() const noexcept { return grid_; }
    /// Dual-cell masses: ω ∫ψ^{n−1} over [r_{i−1/2}, r_{i+1/2}] ∩ [0, r_max].
    const std::vector<double>& measure_weights() const noexcept { return weights_; }
    const std::vector<double>& psi_values() const noexcept { return psi_; }

    /// Area of the unit sphere S^{n−1}; 2 for the line.
    double omega() const noexcept { return omega_; }
    /// Radial density ω·ψ(r)^{n−1} of the Riemannian measure.
    double density(double r) const;

    /// Σ m_i f_i.
    double integrate(std::span<const double> f) const;

    /// V(r) for r ≤ r_max using the cumulative grid quadrature.
    double volume(double r) const;
    /// V(r) for any r, integrating the warping past r_max when it is closed-form.
    double volume_extended(double r) const;

    /// ω (ψ(R)/R)^{n−1} ∫_R^∞ g(r) r^{n−1} dr: tail past R with ψ(r) replaced by ψ(R)·r/R,
    /// exact for flat models and an upper bound when ψ(r)/r is nonincreasing.
    template <class G>
    double power_tail(G&& g, double R, double decay) const;

    std::string describe() const;

    friend ManifoldModel make_model(int n, const WarpingSpec& warping, double r_max, int nodes, GridSpec grid);

private:
    ManifoldModel() = default;

    int dim_ = 2;
    WarpingSpec warping_;
    double r_max_ = 0.0;
    GridSpec grid_spec_;
    double omega_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> weights_;
    std::vector<double> psi_;
    std::vector<double> cumulative_;
};

ManifoldModel make_model(int n, const WarpingSpec& warping, double r_max, int nodes, GridSpec grid = {});

/// (1/√G)·∂_r√G = (n − 1)(ψ'/ψ − 1/r); the first-order coefficient beyond (n−1)/r.
double correction_term(const ManifoldModel& m, double r);

double volume_ball(const ManifoldModel& m, double r);

struct AssumptionThresholds {
    double c_max = 10.0;
    double v_lo = 0.01;
    double v_hi = 100.0;
};

struct AssumptionReport {
    double sup_correction = 0.0;
    double volume_ratio_min = 0.0;
    double volume_ratio_max = 0.0;
    bool ricci_ok = false;
    /// ψ'(r) ≤ ψ(r)/r + 1e-8 at every node; only meaningful when ricci_ok.
    bool slope_bound_ok = false;
    bool passes = false;
    AssumptionThresholds thresholds;
    /// Names of violated conditions, in check order.
    std::vector<std::string> failures;
};

AssumptionReport check_assumptions(const ManifoldModel& m, const AssumptionThresholds& thresholds = {});

// ---------------------------------------------------------------------------

template <class G>
double ManifoldModel::power_tail(G&& g, double R, double decay) const {
    const double n = dim_;
    const double ratio = dim_ == 1 ? 1.0 : std::pow(warping_.psi(R) / R, n - 1.0);
    return omega_ * ratio * quad::power_tail(g, R, n, decay);
}

}  // namespace fraclab
