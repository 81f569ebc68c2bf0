#include "whsid/errors.hpp"
#include "whsid/rng.hpp"
#include "whsid/static_nonlinearity.hpp"

#include <doctest.h>

#include <algorithm>

using namespace whsid;

TEST_CASE("pointwise evaluation of the three variants") {
    const StaticNonlinearity sat{Saturation{-3.0, 3.0}};
    CHECK(sat(5.0) == 3.0);
    CHECK(sat(-7.0) == -3.0);
    CHECK(sat(1.25) == 1.25);

    const StaticNonlinearity dz{DeadZone{-1.0, 1.0}};
    CHECK(dz(0.5) == 0.0);
    CHECK(dz(2.0) == 1.0);
    CHECK(dz(-3.0) == -2.0);

    const StaticNonlinearity poly{Polynomial{{0.0, 0.01, 0.02, -0.008}}};
    CHECK(poly(1.0) == doctest::Approx(0.022).epsilon(1e-14));
}

TEST_CASE("eval_nl maps a sequence and validates it") {
    const StaticNonlinearity sat{Saturation{-3.0, 3.0}};
    const auto y = eval_nl(sat, std::vector<double>{-5.0, 0.0, 5.0});
    CHECK(y == std::vector<double>{-3.0, 0.0, 3.0});

    CHECK_THROWS_AS(eval_nl(sat, std::vector<double>{1.0, std::nan("")}), Error);
    CHECK(eval_nl(sat, std::vector<double>{}).empty());
}

TEST_CASE("polynomial_coefficients is only available for polynomials") {
    const StaticNonlinearity poly{Polynomial{{0.0, 0.01, 0.02, -0.008}}};
    REQUIRE(polynomial_coefficients(poly).has_value());
    CHECK(*polynomial_coefficients(poly) == std::vector<double>{0.0, 0.01, 0.02, -0.008});

    CHECK(!polynomial_coefficients(StaticNonlinearity{Saturation{-3, 3}}).has_value());
    CHECK(*polynomial_coefficients(StaticNonlinearity{Polynomial{{2.5}}}) ==
          std::vector<double>{2.5});
}

TEST_CASE("construction validates bounds and coefficients") {
    CHECK_THROWS_AS((StaticNonlinearity{Saturation{3.0, -3.0}}), Error);
    CHECK_THROWS_AS((StaticNonlinearity{DeadZone{1.0, 1.0}}), Error);
    CHECK_THROWS_AS((StaticNonlinearity{Polynomial{{}}}), Error);
}

TEST_CASE("saturation and dead-zone are monotone nondecreasing") {
    Rng rng(99);
    std::vector<double> xs(500);
    for (auto& v : xs) v = 8.0 * (rng.uniform01() - 0.5);
    std::sort(xs.begin(), xs.end());

    for (const auto& f : {StaticNonlinearity{Saturation{-3, 3}},
                          StaticNonlinearity{DeadZone{-1, 1}}}) {
        const auto ys = eval_nl(f, xs);
        CHECK(std::is_sorted(ys.begin(), ys.end()));
    }
}

TEST_CASE("dead-zone is null inside and continuous at the knots") {
    const StaticNonlinearity dz{DeadZone{-1.0, 1.0}};
    for (double x = -0.999; x < 1.0; x += 0.111) CHECK(dz(x) == 0.0);
    const double eps = 1e-9;
    CHECK(std::abs(dz(1.0 + eps)) <= eps * 1.01);  // slack for the 1+eps rounding
    CHECK(std::abs(dz(-1.0 - eps)) <= eps * 1.01);
    CHECK(dz(1.0) == 0.0);
    CHECK(dz(-1.0) == 0.0);
}

TEST_CASE("saturation output stays within bounds") {
    const StaticNonlinearity sat{Saturation{-2.5, 1.5}};
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double y = sat(20.0 * rng.gaussian());
        CHECK(y >= -2.5);
        CHECK(y <= 1.5);
    }
}

TEST_CASE("Horner evaluation matches the naive power sum") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> coeffs(1 + static_cast<std::size_t>(rng.uniform01() * 6));
        for (auto& c : coeffs) c = rng.gaussian();
        const StaticNonlinearity poly{Polynomial{coeffs}};
        for (int i = 0; i < 50; ++i) {
            const double x = 4.0 * (rng.uniform01() - 0.5);
            double naive = 0.0, xp = 1.0;
            for (double c : coeffs) {
                naive += c * xp;
                xp *= x;
            }
            CHECK(poly(x) == doctest::Approx(naive).epsilon(1e-12));
        }
    }
}
