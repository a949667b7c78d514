#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fraclab/error.hpp"
#include "fraclab/manifold.hpp"
#include "oracles.hpp"

#include <algorithm>

using namespace fraclab;

TEST_CASE("flat measure weights reproduce Euclidean ball volumes") {
    for (auto grid : {GridSpec{GridKind::uniform, 1.0}, GridSpec{GridKind::graded, 0.5}}) {
        auto m1 = make_model(1, WarpingSpec::flat(), 10.0, 256, grid);
        auto m2 = make_model(2, WarpingSpec::flat(), 10.0, 256, grid);
        auto m3 = make_model(3, WarpingSpec::flat(), 10.0, 256, grid);
        auto sum = [](const ManifoldModel& m) {
            double s = 0.0;
            for (double w : m.measure_weights()) s += w;
            return s;
        };
        CHECK(sum(m1) == doctest::Approx(20.0).epsilon(1e-12));
        CHECK(sum(m2) == doctest::Approx(oracle::pi * 100.0).epsilon(1e-12));
        CHECK(sum(m3) == doctest::Approx(4.0 * oracle::pi * 1000.0 / 3.0).epsilon(1e-12));
        CHECK(volume_ball(m2, 3.7) == doctest::Approx(oracle::pi * 3.7 * 3.7).epsilon(1e-10));
    }
}

TEST_CASE("log-blend volume against its antiderivative") {
    auto m = make_model(2, WarpingSpec::log_blend(0.5), 20.0, 512);
    for (double r : {0.3, 1.0, 10.0, 20.0}) CHECK(m.volume(r) == doctest::Approx(oracle::log_blend_area(0.5, r)).epsilon(1e-10));
    CHECK(m.volume_extended(50.0) == doctest::Approx(oracle::log_blend_area(0.5, 50.0)).epsilon(1e-10));
    CHECK_THROWS_AS(m.volume(25.0), RangeError);
}

TEST_CASE("omega is the unit sphere area") {
    CHECK(make_model(1, WarpingSpec::flat(), 1.0, 64).omega() == doctest::Approx(2.0));
    CHECK(make_model(2, WarpingSpec::flat(), 1.0, 64).omega() == doctest::Approx(2.0 * oracle::pi));
    CHECK(make_model(3, WarpingSpec::flat(), 1.0, 64).omega() == doctest::Approx(4.0 * oracle::pi));
    CHECK(make_model(4, WarpingSpec::flat(), 1.0, 64).omega() == doctest::Approx(2.0 * oracle::pi * oracle::pi));
}

TEST_CASE("user-sampled warping equal to r behaves like the flat model") {
    std::vector<double> r, psi;
    for (int k = 0; k <= 100; ++k) {
        r.push_back(0.1 * k);
        psi.push_back(0.1 * k);
    }
    auto m = make_model(2, WarpingSpec::user_sampled(r, psi), 10.0, 128);
    CHECK(m.volume(10.0) == doctest::Approx(oracle::pi * 100.0).epsilon(1e-10));
    CHECK(m.warping().name() == "user-sampled");
    CHECK_THROWS_AS(make_model(2, WarpingSpec::user_sampled(r, psi), 12.0, 128), ConstructionError);
}

TEST_CASE("construction rejects invalid warpings") {
    std::vector<double> r{0.0, 1.0, 2.0}, steep{0.0, 2.0, 4.0}, neg{0.0, 1.0, -1.0}, shifted{0.5, 1.0, 2.0};
    CHECK_THROWS_AS(make_model(2, WarpingSpec::user_sampled(r, steep), 2.0, 64), ConstructionError);
    CHECK_THROWS_AS(make_model(2, WarpingSpec::user_sampled(r, neg), 2.0, 64), ConstructionError);
    CHECK_THROWS_AS(make_model(2, WarpingSpec::user_sampled(r, shifted), 2.0, 64), ConstructionError);
    CHECK_THROWS_AS(WarpingSpec::user_sampled(shifted, r), ParameterError);
    CHECK_THROWS_AS(WarpingSpec::log_blend(0.0), ParameterError);
    CHECK_THROWS_AS(WarpingSpec::log_blend(1.5), ParameterError);
    CHECK_THROWS_AS(make_model(1, WarpingSpec::hyperbolic(), 2.0, 64), ParameterError);
    CHECK_THROWS_AS(make_model(2, WarpingSpec::flat(), 2.0, 32), ParameterError);
    CHECK_THROWS_AS(make_model(2, WarpingSpec::flat(), -1.0, 64), ParameterError);
}

TEST_CASE("correction term") {
    auto flat = make_model(3, WarpingSpec::flat(), 5.0, 64);
    CHECK(correction_term(flat, 2.0) == 0.0);
    auto lb = make_model(3, WarpingSpec::log_blend(0.25), 5.0, 64);
    const double r = 2.0, c = 0.25;
    const double psi = c * r + (1 - c) * std::log1p(r), dpsi = c + (1 - c) / (1 + r);
    CHECK(correction_term(lb, r) == doctest::Approx(2.0 * (dpsi / psi - 1.0 / r)).epsilon(1e-12));
    CHECK(correction_term(lb, 0.0) == 0.0);
    CHECK_THROWS_AS(correction_term(lb, 6.0), RangeError);
    CHECK_THROWS_AS(correction_term(lb, -1.0), RangeError);
}

TEST_CASE("assumption gate") {
    auto flat = check_assumptions(make_model(2, WarpingSpec::flat(), 100.0, 256, {GridKind::graded, 1.0}));
    CHECK(flat.passes);
    CHECK(flat.sup_correction == 0.0);
    CHECK(flat.volume_ratio_min == doctest::Approx(1.0).epsilon(1e-8));

    auto lb = check_assumptions(make_model(2, WarpingSpec::log_blend(0.5), 100.0, 256, {GridKind::graded, 1.0}));
    CHECK(lb.passes);
    CHECK(lb.ricci_ok);
    CHECK(lb.slope_bound_ok);
    CHECK(lb.volume_ratio_min >= 0.5);

    auto hm = make_model(2, WarpingSpec::hyperbolic(), 10.0, 512);
    auto hyp = check_assumptions(hm);
    CHECK_FALSE(hyp.passes);
    CHECK(std::find(hyp.failures.begin(), hyp.failures.end(), "volume_growth") != hyp.failures.end());
    CHECK_FALSE(hyp.ricci_ok);
    const double growth = (hm.volume(10.0) / 100.0) / (hm.volume(5.0) / 25.0);
    CHECK(growth > 10.0);
}

TEST_CASE("slope at origin") {
    CHECK(WarpingSpec::flat().slope_at_origin() == doctest::Approx(1.0));
    CHECK(WarpingSpec::log_blend(0.3).slope_at_origin() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(WarpingSpec::hyperbolic().slope_at_origin() == doctest::Approx(1.0).epsilon(1e-5));
}
