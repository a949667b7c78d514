#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fraclab/error.hpp"
#include "fraclab/lemmas.hpp"
#include "fraclab/weight.hpp"
#include "oracles.hpp"

using namespace fraclab;

namespace {

SpectralOperator flat_op(int n, double r_max, int nodes, GridSpec g) {
    return assemble(std::make_shared<const ManifoldModel>(make_model(n, WarpingSpec::flat(), r_max, nodes, g)),
                    OuterBoundary::dirichlet);
}

}  // namespace

TEST_CASE("h is normalized and matches its closed form") {
    WeightParams wp{1.5, 3, 0, 1.0};
    CHECK(eval_h(2.0, 0.0, wp) == doctest::Approx(1.0));
    const double t = 2.0, r = 1.3;
    const double direct = std::pow(t, 1.0 + 3.0 / 1.5) / std::pow(r * r + std::pow(t, 2.0 / 1.5), 0.5 * 4.5);
    CHECK(eval_h(t, r, wp) == doctest::Approx(direct).epsilon(1e-13));
    CHECK_THROWS_AS(eval_h(0.0, 1.0, wp), ParameterError);
}

TEST_CASE("time derivative of h") {
    for (double alpha : {0.5, 1.0, 1.7}) {
        WeightParams wp{alpha, 2, 0, 1.0};
        for (double r : {0.0, 0.5, 3.0}) {
            const double t = 1.4, e = 1e-6;
            const double fd = (eval_h(t + e, r, wp) - eval_h(t - e, r, wp)) / (2 * e);
            CHECK(eval_dt_h(t, r, wp) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((WeightParams{0.0, 2, 0, 1.0}).validate(), ParameterError);
    CHECK_THROWS_AS((WeightParams{2.5, 2, 0, 1.0}).validate(), ParameterError);
    CHECK_THROWS_AS((WeightParams{1.0, 2, 3, 1.0}).validate(), ParameterError);
    CHECK_THROWS_AS((WeightParams{1.0, 2, 0, 0.0}).validate(), ParameterError);
    CHECK_NOTHROW((WeightParams{2.0, 2, 0, 1.0}).validate());
    CHECK((WeightParams{2.0, 2, 0, 1.0}).diagnostic_only());
}

TEST_CASE("half-Laplacian of h on the line") {
    auto op = flat_op(1, 40.0, 1024, {GridKind::graded, 1.0});
    const std::vector<double> ts{0.5, 1.0, 2.0};
    auto rep = check_poisson_identity(op, ts);
    CHECK(rep.passes);
    for (double e : rep.max_error) CHECK(e < 1e-3);
    for (double s : rep.sup_ratio) CHECK(s == doctest::Approx(1.0).epsilon(0.1));
    const auto& r = op.model().grid();
    const Field lh = apply_fractional(op, 1.0, h_field(op.model(), 1.0, WeightParams{1.0, 1, 0, 1.0}));
    CHECK(lh(0) == doctest::Approx(oracle::poisson_half_laplacian(1.0, r[0])).epsilon(2e-3));
}

TEST_CASE("plane ratio at the origin") {
    auto op = flat_op(2, 1e5, 1024, {GridKind::graded, 0.1});
    for (double alpha : {0.5, 1.0, 1.5}) {
        WeightParams wp{alpha, 2, 0, 1.0};
        const std::vector<double> ts{0.25, 1.0, 4.0, 16.0};
        auto rep = verify_frac_bound(op, wp, ts);
        CHECK(rep.passes);
        CHECK(rep.asserted);
        for (double s : rep.sup_ratio) CHECK(s == doctest::Approx(oracle::plane_ratio_at_origin(alpha)).epsilon(0.02));
        CHECK(rep.ratios.size() == ts.size() * rep.interior_nodes);
    }
}

TEST_CASE("coarse core radius is refused and alpha = 2 is diagnostic") {
    auto op = flat_op(2, 100.0, 128, {GridKind::uniform, 1.0});
    WeightParams wp{1.0, 2, 0, 1.0};
    const std::vector<double> tiny{0.01};
    CHECK_THROWS_AS(verify_frac_bound(op, wp, tiny), ResolutionError);
    WeightParams two{2.0, 2, 0, 1.0};
    const std::vector<double> ts{100.0, 400.0};
    CHECK_FALSE(verify_frac_bound(op, two, ts).asserted);
    WeightParams wrong{1.0, 3, 0, 1.0};
    CHECK_THROWS_AS(verify_frac_bound(op, wrong, ts), ParameterError);
}

TEST_CASE("weighted integral of a Gaussian") {
    auto m = make_model(1, WarpingSpec::flat(), 40.0, 2048, {GridKind::graded, 0.5});
    FieldState s;
    s.t = 0.5;
    s.u.resize(static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) s.u(static_cast<Eigen::Index>(i)) = {std::exp(-m.grid()[i] * m.grid()[i]), 5.0};
    // T = t + N = 1; imaginary part must not contribute
    CHECK(phi_of_state(m, s, WeightParams{1.0, 1, 0, 0.5}) == doctest::Approx(oracle::gauss_over_lorentz()).epsilon(1e-6));
}

TEST_CASE("L2 norm of h") {
    auto line = make_model(1, WarpingSpec::flat(), 1e5, 1024, {GridKind::graded, 0.5});
    for (double T : {1.0, 10.0, 100.0})
        CHECK(h_l2_norm(line, WeightParams{1.0, 1, 0, 1.0}, T) == doctest::Approx(oracle::h_norm_line(T)).epsilon(1e-4));
    auto plane = make_model(2, WarpingSpec::flat(), 1e5, 1024, {GridKind::graded, 0.5});
    for (double T : {1.0, 3.0, 10.0})
        CHECK(h_l2_norm(plane, WeightParams{0.5, 2, 0, 1.0}, T) ==
              doctest::Approx(oracle::h_norm_plane_half(T)).epsilon(1e-4));
}

TEST_CASE("norm scaling exponent") {
    const auto Ts = log_spaced(1.0, 100.0, 9);
    for (int n : {1, 2}) {
        auto m = make_model(n, WarpingSpec::flat(), 1e5, 1024, {GridKind::graded, 0.5});
        for (double alpha : {0.5, 1.0, 1.5}) {
            auto rep = h_norm_scaling(m, WeightParams{alpha, n, 0, 1.0}, Ts);
            CHECK(rep.fitted_exponent == doctest::Approx(n / (2.0 * alpha)).epsilon(0.01));
            CHECK(rep.matches_prediction);
            CHECK_FALSE(rep.matches_claim);
        }
    }
}
