#pragma once

#include "fraclab/manifold.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace fraclab {

/// Real field sampled on every node of a model grid.
using Field = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;

/// Condition at r_max. The inner node always carries the regularity (zero-flux) condition.
enum class OuterBoundary { dirichlet, neumann };

std::string to_string(OuterBoundary bc);
OuterBoundary outer_boundary_from_string(const std::string& s);

/// Discretized −Δ in divergence form (1/J)(J f')' with J = ω ψ^{n−1}, eigendecomposed eagerly.
///
/// The vertex-centred finite-volume stencil gives −Δ ≈ M⁻¹K with M the dual-cell masses
/// and K symmetric tridiagonal. Eigenvectors are M-orthonormal. Under a Dirichlet outer
/// condition the last node is not a degree of freedom and every produced field is zero there.
class SpectralOperator {
public:
    const ManifoldModel& model() const noexcept { return *model_; }
    std::shared_ptr<const ManifoldModel> model_ptr() const noexcept { return model_; }
    OuterBoundary bc() const noexcept { return bc_; }

    /// Number of active degrees of freedom.
    Eigen::Index dofs() const noexcept { return mass_.size(); }
    const Eigen::VectorXd& mass() const noexcept { return mass_; }
    const Eigen::VectorXd& stiffness_diagonal() const noexcept { return k_diag_; }
    const Eigen::VectorXd& stiffness_offdiagonal() const noexcept { return k_off_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    /// Columns are M-orthonormal eigenvectors over the active nodes.
    const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }

    double largest_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }
    double smallest_positive_eigenvalue() const;

    /// M⁻¹K f on the active nodes.
    Field apply_matrix(const Field& f) const;
    /// K f on the active nodes (no padding).
    Eigen::VectorXd stiffness_times(const Eigen::VectorXd& active) const;

    /// Coefficients c = Vᵀ M f of a full-grid field.
    Eigen::VectorXd coefficients(const Field& f) const;
    /// Full-grid field V c.
    Field synthesize(const Eigen::VectorXd& c) const;

    /// Apply g(λ) spectrally.
    template <class G>
    Field spectral_map(const Field& f, G&& g) const;

    /// ‖ S Q − Q Λ ‖_max of the symmetrized eigenproblem.
    double eigen_residual() const noexcept { return eigen_residual_; }

    friend SpectralOperator assemble(std::shared_ptr<const ManifoldModel> model, OuterBoundary bc);

private:
    SpectralOperator() = default;
    void check_field(const Field& f) const;

    std::shared_ptr<const ManifoldModel> model_;
    OuterBoundary bc_ = OuterBoundary::dirichlet;
    Eigen::VectorXd mass_;
    Eigen::VectorXd k_diag_;
    Eigen::VectorXd k_off_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    double eigen_residual_ = 0.0;
};

constexpr Eigen::Index kMaxDenseNodes = 4096;

SpectralOperator assemble(std::shared_ptr<const ManifoldModel> model, OuterBoundary bc);

/// (−Δ)^{α/2} f by eigen-expansion, α ∈ (0, 2].
Field apply_fractional(const SpectralOperator& op, double alpha, const Field& f);

enum class QuadratureRule { gauss_legendre_log, trapezoid_log };

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_rule_from_string(const std::string& s);

/// Truncation and panelling of the resolvent integral in the variable u = ln s.
struct QuadratureScheme {
    double s_min = 0.0;
    double s_max = 0.0;
    int panels = 200;
    QuadratureRule rule = QuadratureRule::gauss_legendre_log;
    /// Add the leading-order contributions of (0, s_min) and (s_max, ∞).
    bool end_corrections = true;

    void validate() const;
    /// s_min = 1e-6·λ₁⁺, s_max = 1e6·λ_max.
    static QuadratureScheme defaults_for(const SpectralOperator& op, double min_factor = 1e-6,
                                         double max_factor = 1e6);
};

/// (−Δ)^{α/2} f = (sin(απ/2)/π) ∫₀^∞ s^{α/2−1} (s − Δ)⁻¹(−Δ) f ds, one tridiagonal
/// solve (sM + K) x = K f per quadrature node. Independent of the eigendecomposition.
Field subordination_apply(const SpectralOperator& op, double alpha, const Field& f, const QuadratureScheme& q);

/// e^{τΔ} f.
Field heat_apply(const SpectralOperator& op, double tau, const Field& f);

struct HeatKernelColumn {
    Field values;
    double tau = 0.0;
    std::size_t source = 0;
    double mass = 0.0;
    /// p ≤ C·V(x₀, √τ)⁻¹·exp(−c d²/τ) on the grid with c fixed and C minimal.
    double bound_C = 0.0;
    double bound_c = 0.0;
    /// |1 − mass| > 1%: the outer boundary has visibly absorbed heat.
    bool contaminated = false;
};

HeatKernelColumn heat_kernel_column(const SpectralOperator& op, double tau, std::size_t source_node,
                                    double gaussian_rate = 0.125);

/// Solve (s·M + K) x = b on the active nodes (Thomas algorithm, s > 0).
Eigen::VectorXd shifted_solve(const SpectralOperator& op, double s, const Eigen::VectorXd& b);

struct OperatorDiagnostics {
    OuterBoundary bc = OuterBoundary::dirichlet;
    Eigen::Index dofs = 0;
    double lambda_min = 0.0;
    double lambda_min_positive = 0.0;
    double lambda_max = 0.0;
    double orthonormality_residual = 0.0;
    double eigen_residual = 0.0;
};

/// Computes the M-Gram residual (O(M³)); call on demand.
OperatorDiagnostics diagnose(const SpectralOperator& op);

// ---------------------------------------------------------------------------

template <class G>
Field SpectralOperator::spectral_map(const Field& f, G&& g) const {
    Eigen::VectorXd c = coefficients(f);
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= g(eigenvalues_(k));
    return synthesize(c);
}

}  // namespace fraclab
