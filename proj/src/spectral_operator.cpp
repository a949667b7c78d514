#include "fraclab/spectral_operator.hpp"

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fraclab {

std::string to_string(OuterBoundary bc) { return bc == OuterBoundary::dirichlet ? "dirichlet-outer" : "neumann-outer"; }

OuterBoundary outer_boundary_from_string(const std::string& s) {
    if (s == "dirichlet-outer" || s == "dirichlet") return OuterBoundary::dirichlet;
    if (s == "neumann-outer" || s == "neumann") return OuterBoundary::neumann;
    throw ParameterError("operator", "unknown outer boundary condition '" + s + "'");
}

std::string to_string(QuadratureRule rule) {
    return rule == QuadratureRule::gauss_legendre_log ? "gauss-legendre-log" : "trapezoid-log";
}

QuadratureRule quadrature_rule_from_string(const std::string& s) {
    if (s == "gauss-legendre-log") return QuadratureRule::gauss_legendre_log;
    if (s == "trapezoid-log") return QuadratureRule::trapezoid_log;
    throw ParameterError("operator", "unknown quadrature rule '" + s + "'");
}

SpectralOperator assemble(std::shared_ptr<const ManifoldModel> model, OuterBoundary bc) {
    if (!model) throw ParameterError("operator", "null model");
    const auto nodes = static_cast<Eigen::Index>(model->size());
    if (nodes > kMaxDenseNodes)
        throw ParameterError("operator", "dense eigendecomposition is capped at " + std::to_string(kMaxDenseNodes) +
                                             " nodes");
    const auto& r = model->grid();
    const auto& w = model->measure_weights();

    SpectralOperator op;
    op.model_ = model;
    op.bc_ = bc;
    const Eigen::Index n = bc == OuterBoundary::dirichlet ? nodes - 1 : nodes;

    // face conductances J(r_{i+1/2}) / (r_{i+1} − r_i)
    Eigen::VectorXd face(nodes - 1);
    for (Eigen::Index i = 0; i + 1 < nodes; ++i) {
        const auto a = static_cast<std::size_t>(i);
        face(i) = model->density(0.5 * (r[a] + r[a + 1])) / (r[a + 1] - r[a]);
    }

    op.mass_.resize(n);
    op.k_diag_.setZero(n);
    op.k_off_.resize(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        op.mass_(i) = w[static_cast<std::size_t>(i)];
        if (i > 0) op.k_diag_(i) += face(i - 1);
        if (i < nodes - 1) op.k_diag_(i) += face(i);
        if (i < n - 1) op.k_off_(i) = -face(i);
    }

    const Eigen::VectorXd inv_sqrt = op.mass_.cwiseSqrt().cwiseInverse();
    Eigen::VectorXd diag = op.k_diag_.cwiseProduct(inv_sqrt).cwiseProduct(inv_sqrt);
    Eigen::VectorXd sub = op.k_off_.cwiseProduct(inv_sqrt.head(n - 1)).cwiseProduct(inv_sqrt.tail(n - 1));

    // divide-and-conquer tridiagonal eigensolver
    Eigen::VectorXd lambda = diag;
    Eigen::VectorXd work_sub = sub;
    Eigen::MatrixXd q(n, n);
    const lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(n), lambda.data(),
                                           work_sub.data(), q.data(), static_cast<lapack_int>(n));

    // residual of the symmetrized tridiagonal problem, S Q − Q Λ
    Eigen::MatrixXd sq = diag.asDiagonal() * q;
    sq.topRows(n - 1) += sub.asDiagonal() * q.bottomRows(n - 1);
    sq.bottomRows(n - 1) += sub.asDiagonal() * q.topRows(n - 1);
    sq -= q * lambda.asDiagonal();
    op.eigen_residual_ = sq.cwiseAbs().maxCoeff();

    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if (info != 0 || !(op.eigen_residual_ <= 1e-8 * scale))
        throw OperatorError("symmetric tridiagonal eigensolver failed", op.eigen_residual_);

    op.eigenvalues_ = lambda;
    op.eigenvectors_ = inv_sqrt.asDiagonal() * q;
    return op;
}

double SpectralOperator::smallest_positive_eigenvalue() const {
    const double floor = 1e-12 * std::max(1.0, largest_eigenvalue());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
        if (eigenvalues_(k) > floor) return eigenvalues_(k);
    return largest_eigenvalue();
}

void SpectralOperator::check_field(const Field& f) const {
    if (f.size() != static_cast<Eigen::Index>(model_->size()))
        throw ParameterError("operator", "field has " + std::to_string(f.size()) + " entries, grid has " +
                                             std::to_string(model_->size()));
}

Eigen::VectorXd SpectralOperator::stiffness_times(const Eigen::VectorXd& x) const {
    const Eigen::Index n = dofs();
    Eigen::VectorXd y = k_diag_.cwiseProduct(x);
    y.head(n - 1) += k_off_.cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += k_off_.cwiseProduct(x.head(n - 1));
    return y;
}

Field SpectralOperator::apply_matrix(const Field& f) const {
    check_field(f);
    Field out = Field::Zero(f.size());
    out.head(dofs()) = stiffness_times(f.head(dofs())).cwiseQuotient(mass_);
    return out;
}

Eigen::VectorXd SpectralOperator::coefficients(const Field& f) const {
    check_field(f);
    return eigenvectors_.transpose() * mass_.cwiseProduct(f.head(dofs()));
}

Field SpectralOperator::synthesize(const Eigen::VectorXd& c) const {
    Field out = Field::Zero(static_cast<Eigen::Index>(model_->size()));
    out.head(dofs()) = eigenvectors_ * c;
    return out;
}

Field apply_fractional(const SpectralOperator& op, double alpha, const Field& f) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw ParameterError("operator", "fractional order alpha must lie in (0, 2], got " + std::to_string(alpha));
    const double half = 0.5 * alpha;
    return op.spectral_map(f, [half](double lambda) { return lambda > 0.0 ? std::pow(lambda, half) : 0.0; });
}

void QuadratureScheme::validate() const {
    if (!(s_min > 0.0)) throw ParameterError("operator", "quadrature s_min must be positive");
    if (!(s_max > s_min)) throw ParameterError("operator", "quadrature s_max must exceed s_min");
    if (panels < 16) throw ParameterError("operator", "quadrature needs at least 16 panels");
}

QuadratureScheme QuadratureScheme::defaults_for(const SpectralOperator& op, double min_factor, double max_factor) {
    QuadratureScheme q;
    q.s_min = min_factor * op.smallest_positive_eigenvalue();
    q.s_max = max_factor * op.largest_eigenvalue();
    return q;
}

Eigen::VectorXd shifted_solve(const SpectralOperator& op, double s, const Eigen::VectorXd& b) {
    const Eigen::Index n = op.dofs();
    const Eigen::VectorXd& kd = op.stiffness_diagonal();
    const Eigen::VectorXd& ko = op.stiffness_offdiagonal();
    Eigen::VectorXd c(n), x(n);
    Eigen::VectorXd d = s * op.mass() + kd;
    // forward elimination
    double pivot = d(0);
    if (!(pivot > 0.0)) throw OperatorError("shifted solve hit a non-positive pivot", pivot);
    x(0) = b(0) / pivot;
    for (Eigen::Index i = 1; i < n; ++i) {
        c(i - 1) = ko(i - 1) / pivot;
        pivot = d(i) - ko(i - 1) * c(i - 1);
        if (!(pivot > 0.0)) throw OperatorError("shifted solve hit a non-positive pivot", pivot);
        x(i) = (b(i) - ko(i - 1) * x(i - 1)) / pivot;
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c(i) * x(i + 1);
    return x;
}

Field subordination_apply(const SpectralOperator& op, double alpha, const Field& f, const QuadratureScheme& q) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParameterError("operator", "subordination needs alpha strictly inside (0, 2)");
    q.validate();
    if (f.size() != static_cast<Eigen::Index>(op.model().size()))
        throw ParameterError("operator", "field does not match the operator grid");
    const Field active = f.head(op.dofs());
    const Eigen::VectorXd kf = op.stiffness_times(active);
    const double half = 0.5 * alpha;

    // (s − Δ)⁻¹(−Δ) f = (sM + K)⁻¹ K f
    auto resolvent = [&](double s) { return shifted_solve(op, s, kf); };

    const double u0 = std::log(q.s_min), u1 = std::log(q.s_max);
    const quad::Rule rule = q.rule == QuadratureRule::gauss_legendre_log ? quad::gauss_legendre_panels(u0, u1, q.panels)
                                                                          : quad::trapezoid_panels(u0, u1, q.panels);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(op.dofs());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double s = std::exp(rule.nodes[j]);
        acc += (rule.weights[j] * std::pow(s, half)) * resolvent(s);
    }
    if (q.end_corrections) {
        // (0, s_min): λ/(s+λ) ≈ its value at s_min, ∫ s^{α/2−1} = s_min^{α/2}/(α/2)
        acc += (std::pow(q.s_min, half) / half) * resolvent(q.s_min);
        // (s_max, ∞): λ/(s+λ) ≈ (s_max/s)·[value at s_max], ∫ s^{α/2−2} = s_max^{α/2−1}/(1−α/2)
        acc += (q.s_max * std::pow(q.s_max, half - 1.0) / (1.0 - half)) * resolvent(q.s_max);
    }
    Field out = Field::Zero(f.size());
    out.head(op.dofs()) = (std::sin(half * std::numbers::pi) / std::numbers::pi) * acc;
    return out;
}

Field heat_apply(const SpectralOperator& op, double tau, const Field& f) {
    if (!(tau >= 0.0)) throw ParameterError("operator", "heat time must be nonnegative");
    if (tau == 0.0) return f;
    return op.spectral_map(f, [tau](double lambda) { return std::exp(-tau * std::max(lambda, 0.0)); });
}

HeatKernelColumn heat_kernel_column(const SpectralOperator& op, double tau, std::size_t source_node,
                                    double gaussian_rate) {
    if (!(tau > 0.0)) throw ParameterError("operator", "heat kernel needs tau > 0");
    if (static_cast<Eigen::Index>(source_node) >= op.dofs() || source_node + 1 >= op.model().size())
        throw ParameterError("operator", "heat kernel source must be an interior node");
    const auto& model = op.model();
    const auto& r = model.grid();

    HeatKernelColumn col;
    col.tau = tau;
    col.source = source_node;
    col.bound_c = gaussian_rate;

    // δ_{x0}/m_{x0} has eigen-coefficients V(x0, k)
    Eigen::VectorXd c = op.eigenvectors().row(static_cast<Eigen::Index>(source_node)).transpose();
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-tau * std::max(op.eigenvalues()(k), 0.0));
    col.values = op.synthesize(c);
    col.mass = model.integrate(std::span<const double>(col.values.data(), static_cast<std::size_t>(col.values.size())));
    col.contaminated = std::abs(1.0 - col.mass) > 0.01;

    const double ball = model.volume_extended(std::sqrt(tau));
    const double peak = col.values.maxCoeff();
    for (Eigen::Index i = 0; i < col.values.size(); ++i) {
        const double p = col.values(i);
        if (p <= 1e-12 * peak) continue;
        const double d = r[static_cast<std::size_t>(i)] - r[source_node];
        col.bound_C = std::max(col.bound_C, p * ball * std::exp(gaussian_rate * d * d / tau));
    }
    return col;
}

OperatorDiagnostics diagnose(const SpectralOperator& op) {
    OperatorDiagnostics d;
    d.bc = op.bc();
    d.dofs = op.dofs();
    d.lambda_min = op.eigenvalues()(0);
    d.lambda_min_positive = op.smallest_positive_eigenvalue();
    d.lambda_max = op.largest_eigenvalue();
    const Eigen::MatrixXd& v = op.eigenvectors();
    Eigen::MatrixXd gram = v.transpose() * op.mass().asDiagonal() * v;
    gram -= Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    d.orthonormality_residual = gram.cwiseAbs().maxCoeff();
    d.eigen_residual = op.eigen_residual();
    return d;
}

}  // namespace fraclab
