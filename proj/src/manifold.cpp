#include "fraclab/manifold.hpp"

#include "fraclab/error.hpp"
#include "fraclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fraclab {

namespace {

constexpr double kOriginTolerance = 1e-3;

std::size_t segment_index(const std::vector<double>& nodes, double r) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    std::size_t k = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    return std::min(k, nodes.size() - 2);
}

double sphere_area(int n) {
    // |S^{n-1}| = 2 π^{n/2} / Γ(n/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace

// --- WarpingSpec -------------------------------------------------------------

WarpingSpec WarpingSpec::flat() { return WarpingSpec{}; }

WarpingSpec WarpingSpec::log_blend(double c) {
    if (!(c > 0.0 && c <= 1.0))
        throw ParameterError("manifold", "log-blend coefficient must lie in (0, 1], got " + std::to_string(c));
    WarpingSpec w;
    w.kind_ = WarpingKind::log_blend;
    w.c_ = c;
    return w;
}

WarpingSpec WarpingSpec::hyperbolic() {
    WarpingSpec w;
    w.kind_ = WarpingKind::hyperbolic;
    return w;
}

WarpingSpec WarpingSpec::user_sampled(std::vector<double> r_nodes, std::vector<double> psi_values) {
    if (r_nodes.size() != psi_values.size() || r_nodes.size() < 2)
        throw ParameterError("manifold", "user-sampled warping needs matching r/psi arrays with at least two samples");
    if (r_nodes.front() != 0.0)
        throw ParameterError("manifold", "user-sampled warping must start at r = 0");
    for (std::size_t k = 1; k < r_nodes.size(); ++k)
        if (!(r_nodes[k] > r_nodes[k - 1]))
            throw ParameterError("manifold", "user-sampled r-nodes must be strictly increasing");
    WarpingSpec w;
    w.kind_ = WarpingKind::user_sampled;
    w.nodes_ = std::move(r_nodes);
    w.values_ = std::move(psi_values);
    return w;
}

double WarpingSpec::psi(double r) const {
    switch (kind_) {
        case WarpingKind::flat: return r;
        case WarpingKind::log_blend: return c_ * r + (1.0 - c_) * std::log1p(r);
        case WarpingKind::hyperbolic: return std::sinh(r);
        case WarpingKind::user_sampled: {
            const std::size_t k = segment_index(nodes_, r);
            const double s = (r - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
            return values_[k] + s * (values_[k + 1] - values_[k]);
        }
    }
    return r;
}

double WarpingSpec::dpsi(double r) const {
    switch (kind_) {
        case WarpingKind::flat: return 1.0;
        case WarpingKind::log_blend: return c_ + (1.0 - c_) / (1.0 + r);
        case WarpingKind::hyperbolic: return std::cosh(r);
        case WarpingKind::user_sampled: {
            const std::size_t k = segment_index(nodes_, r);
            return (values_[k + 1] - values_[k]) / (nodes_[k + 1] - nodes_[k]);
        }
    }
    return 1.0;
}

double WarpingSpec::d2psi(double r) const {
    switch (kind_) {
        case WarpingKind::flat: return 0.0;
        case WarpingKind::log_blend: return (c_ - 1.0) / ((1.0 + r) * (1.0 + r));
        case WarpingKind::hyperbolic: return std::sinh(r);
        case WarpingKind::user_sampled: {
            // Second divided difference at the nearest interior sample.
            if (nodes_.size() < 3) return 0.0;
            std::size_t k = segment_index(nodes_, r);
            k = std::clamp<std::size_t>(k, 1, nodes_.size() - 2);
            if (r - nodes_[k] > nodes_[k + 1] - r && k + 1 < nodes_.size() - 1) ++k;
            const double hl = nodes_[k] - nodes_[k - 1], hr = nodes_[k + 1] - nodes_[k];
            const double sl = (values_[k] - values_[k - 1]) / hl;
            const double sr = (values_[k + 1] - values_[k]) / hr;
            return 2.0 * (sr - sl) / (hl + hr);
        }
    }
    return 0.0;
}

double WarpingSpec::slope_at_origin() const {
    if (kind_ == WarpingKind::user_sampled) {
        const double h1 = nodes_[1];
        if (nodes_.size() >= 3) {
            // second-order one-sided formula on a nonuniform stencil
            const double h2 = nodes_[2];
            const double a = -(h1 + h2) / (h1 * h2), b = h2 / (h1 * (h2 - h1)), c = -h1 / (h2 * (h2 - h1));
            return a * values_[0] + b * values_[1] + c * values_[2];
        }
        return (values_[1] - values_[0]) / h1;
    }
    constexpr double h = 1e-6;
    return (psi(h) - psi(0.0)) / h;
}

std::string WarpingSpec::name() const {
    switch (kind_) {
        case WarpingKind::flat: return "flat";
        case WarpingKind::log_blend: return "log-blend";
        case WarpingKind::hyperbolic: return "hyperbolic";
        case WarpingKind::user_sampled: return "user-sampled";
    }
    return "flat";
}

// --- ManifoldModel -----------------------------------------------------------

double ManifoldModel::density(double r) const {
    if (dim_ == 1) return omega_;
    return omega_ * std::pow(warping_.psi(r), dim_ - 1);
}

double ManifoldModel::integrate(std::span<const double> f) const {
    if (f.size() != weights_.size())
        throw ParameterError("manifold", "field size does not match the model grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += weights_[i] * f[i];
    return sum;
}

double ManifoldModel::volume(double r) const {
    if (r < 0.0) throw RangeError("manifold", "negative radius");
    if (r > r_max_ * (1.0 + 1e-14))
        throw RangeError("manifold", "radius " + std::to_string(r) + " beyond r_max " + std::to_string(r_max_));
    r = std::min(r, r_max_);
    auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    double v = cumulative_[k];
    if (r > grid_[k]) v += quad::gauss8([this](double s) { return density(s); }, grid_[k], r);
    return v;
}

double ManifoldModel::volume_extended(double r) const {
    if (r <= r_max_) return volume(r);
    if (!warping_.closed_form())
        throw RangeError("manifold", "user-sampled warping cannot be evaluated beyond r_max");
    // geometric panels keep the rule accurate for exponential growth
    double v = cumulative_.back();
    double a = r_max_;
    while (a < r) {
        const double b = std::min(r, a + std::max(0.5, 0.1 * a));
        v += quad::gauss8([this](double s) { return density(s); }, a, b);
        a = b;
    }
    return v;
}

std::string ManifoldModel::describe() const {
    std::ostringstream os;
    os << "n=" << dim_ << " warping=" << warping_.name() << " r_max=" << r_max_ << " nodes=" << grid_.size();
    return os.str();
}

ManifoldModel make_model(int n, const WarpingSpec& warping, double r_max, int nodes, GridSpec grid) {
    if (n < 1) throw ParameterError("manifold", "dimension must be at least 1");
    if (n == 1 && warping.kind() != WarpingKind::flat)
        throw ParameterError("manifold", "dimension 1 is only available as the flat oracle line");
    if (!(r_max > 0.0)) throw ParameterError("manifold", "r_max must be positive");
    if (nodes < 64) throw ParameterError("manifold", "at least 64 radial nodes are required");
    if (grid.kind == GridKind::graded && !(grid.scale > 0.0))
        throw ParameterError("manifold", "graded grid scale must be positive");
    if (warping.kind() == WarpingKind::user_sampled && warping.sample_nodes().back() < r_max * (1.0 - 1e-12))
        throw ConstructionError("manifold", "user-sampled warping does not cover r_max");

    if (std::abs(warping.psi(0.0)) > 1e-12)
        throw ConstructionError("manifold", "warping must vanish at r = 0");
    const double slope0 = warping.slope_at_origin();
    if (std::abs(slope0 - 1.0) > kOriginTolerance)
        throw ConstructionError("manifold", "warping slope at r = 0 is " + std::to_string(slope0) + ", expected 1");

    ManifoldModel m;
    m.dim_ = n;
    m.warping_ = warping;
    m.r_max_ = r_max;
    m.grid_spec_ = grid;
    m.omega_ = sphere_area(n);

    const auto count = static_cast<std::size_t>(nodes);
    m.grid_.resize(count);
    const double b = grid.kind == GridKind::graded ? std::asinh(r_max / grid.scale) : 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(count - 1);
        m.grid_[i] = grid.kind == GridKind::uniform ? r_max * s : grid.scale * std::sinh(b * s);
    }
    m.grid_.front() = 0.0;
    m.grid_.back() = r_max;

    m.psi_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double value = warping.psi(m.grid_[i]);
        if (i > 0 && !(value > 0.0 && std::isfinite(value)))
            throw ConstructionError("manifold", "warping is not positive and finite at node " + std::to_string(i) +
                                                    " (r = " + std::to_string(m.grid_[i]) + ")");
        m.psi_[i] = value;
    }

    // Each interval is split at its midpoint; both halves feed the dual cells and the
    // cumulative volume, so Σ m_i equals V(r_max) to round-off.
    auto dens = [&m](double s) { return m.density(s); };
    m.weights_.assign(count, 0.0);
    m.cumulative_.assign(count, 0.0);
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double mid = 0.5 * (m.grid_[i] + m.grid_[i + 1]);
        const double left = quad::gauss8(dens, m.grid_[i], mid);
        const double right = quad::gauss8(dens, mid, m.grid_[i + 1]);
        m.weights_[i] += left;
        m.weights_[i + 1] += right;
        m.cumulative_[i + 1] = m.cumulative_[i] + left + right;
    }
    return m;
}

// --- operations --------------------------------------------------------------

namespace {

double correction_unchecked(const ManifoldModel& m, double r) {
    if (r == 0.0 || m.dim() == 1) return 0.0;
    const auto& w = m.warping();
    if (w.kind() == WarpingKind::flat) return 0.0;
    return (m.dim() - 1) * (w.dpsi(r) / w.psi(r) - 1.0 / r);
}

}  // namespace

double correction_term(const ManifoldModel& m, double r) {
    if (r < 0.0 || r > m.r_max() * (1.0 + 1e-14))
        throw RangeError("manifold", "correction_term radius outside [0, r_max]");
    return correction_unchecked(m, r);
}

double volume_ball(const ManifoldModel& m, double r) {
    if (!(r > 0.0)) throw RangeError("manifold", "volume_ball needs r > 0");
    return m.volume(r);
}

AssumptionReport check_assumptions(const ManifoldModel& m, const AssumptionThresholds& thresholds) {
    AssumptionReport rep;
    rep.thresholds = thresholds;
    const auto& grid = m.grid();
    const auto& w = m.warping();

    // bound on r·(∂_r √G)/√G: grid nodes, plus an analytic tail out to 10·r_max
    std::vector<double> radii(grid.begin() + 1, grid.end());
    if (w.closed_form()) {
        auto tail = quad::log_spaced(m.r_max(), 10.0 * m.r_max(), 64);
        radii.insert(radii.end(), tail.begin(), tail.end());
    }
    for (double r : radii) {
        const double value = std::abs(r * correction_unchecked(m, r));
        rep.sup_correction = std::isfinite(value) ? std::max(rep.sup_correction, value)
                                                  : std::numeric_limits<double>::infinity();
    }

    // V(r)/(ω rⁿ/n) over three decades below r_max, extended analytically to 10·r_max
    const double n = m.dim();
    auto euclid = [&](double r) { return m.omega() * std::pow(r, n) / n; };
    const double r_lo = std::max(grid[1], 1e-3 * m.r_max());
    auto vol_radii = quad::log_spaced(r_lo, m.r_max(), 32);
    if (w.closed_form()) {
        auto tail = quad::log_spaced(m.r_max(), 10.0 * m.r_max(), 16);
        for (std::size_t k = 1; k < tail.size(); ++k) vol_radii.push_back(tail[k]);
    }
    rep.volume_ratio_min = std::numeric_limits<double>::infinity();
    rep.volume_ratio_max = 0.0;
    for (double r : vol_radii) {
        const double ratio = m.volume_extended(r) / euclid(r);
        rep.volume_ratio_min = std::min(rep.volume_ratio_min, ratio);
        rep.volume_ratio_max = std::isfinite(ratio) ? std::max(rep.volume_ratio_max, ratio)
                                                    : std::numeric_limits<double>::infinity();
    }

    // nonnegative Ricci curvature of the warped product ⇔ ψ'' ≤ 0
    rep.ricci_ok = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double r = grid[i];
        if (w.d2psi(r) > 1e-12 * std::max(1.0, std::abs(w.psi(r)))) {
            rep.ricci_ok = false;
            break;
        }
    }
    rep.slope_bound_ok = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double r = grid[i];
        if (w.dpsi(r) > w.psi(r) / r + 1e-8) {
            rep.slope_bound_ok = false;
            break;
        }
    }

    const bool correction_ok = std::isfinite(rep.sup_correction) && rep.sup_correction <= thresholds.c_max;
    const bool volume_ok = rep.volume_ratio_min >= thresholds.v_lo && rep.volume_ratio_max <= thresholds.v_hi;
    if (!correction_ok) rep.failures.emplace_back("radial_correction_bound");
    if (!volume_ok) rep.failures.emplace_back("volume_growth");
    if (!rep.ricci_ok) rep.failures.emplace_back("ricci_sign");
    if (rep.ricci_ok && !rep.slope_bound_ok) rep.failures.emplace_back("slope_bound");
    rep.passes = rep.failures.empty();
    return rep;
}

}  // namespace fraclab
