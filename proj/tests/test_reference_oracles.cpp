#include <doctest.h>

#include <cmath>
#include <numbers>

#include "decay/errors.hpp"
#include "decay/reference_oracles.hpp"

using namespace decay;

namespace {
constexpr double kPi = std::numbers::pi;
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("extended-precision Faddeyeva: tabulated values") {
    CHECK(rel(oracle::faddeyeva_reference(cplx(1.0, 1.0)), cplx(0.30474420525691259, 0.20821893820283163)) < 1e-15);
    CHECK(rel(oracle::faddeyeva_reference(cplx(0.0, 1.0)), cplx(0.42758357615580700, 0.0)) < 1e-15);
    CHECK(rel(oracle::faddeyeva_reference(cplx(0.0, 0.0)), 1.0) < 1e-16);
    // Re w(x) = exp(-x^2) on the real axis, across the series/fraction boundaries
    for (double x : {0.5, 4.9, 5.1, 20.0}) CHECK(std::abs(oracle::faddeyeva_reference(x).real() - std::exp(-x * x)) < 1e-16 + 1e-15 * std::exp(-x * x));
    // Dawson function value D(1) = 0.53807950691276841 through Im w(x) = 2 D(x)/sqrt(pi)
    CHECK(std::abs(oracle::faddeyeva_reference(1.0).imag() - 2.0 * 0.53807950691276841 / std::sqrt(kPi)) < 1e-15);
    // lower half plane: w(z) + w(-z) = 2 exp(-z^2)
    const cplx z(1.5, -0.7);
    CHECK(rel(oracle::faddeyeva_reference(z) + oracle::faddeyeva_reference(-z), 2.0 * std::exp(-z * z)) < 1e-14);
}

TEST_CASE("adaptive quadrature") {
    CHECK(rel(oracle::adaptive_integral([](double x) { return cplx(std::cos(x), std::sin(x)); }, 0.0, kPi), cplx(0.0, 2.0)) < 1e-13);
    CHECK(std::abs(oracle::adaptive_integral([](double x) { return cplx(std::exp(-x * x)); }, -10.0, 10.0).real() - std::sqrt(kPi)) < 1e-13);
}

TEST_CASE("finite-difference derivatives") {
    auto f = [](double k) { return cplx(std::sin(2.0 * k), std::sinh(k)); };
    CHECK(rel(oracle::odd_derivative_at_zero(f, 1), cplx(2.0, 1.0)) < 1e-10);
    CHECK(rel(oracle::odd_derivative_at_zero(f, 3), cplx(-8.0, 1.0)) < 1e-8);
    CHECK(rel(oracle::odd_derivative_at_zero(f, 5), cplx(32.0, 1.0)) < 1e-6);
    CHECK_THROWS_AS(oracle::odd_derivative_at_zero(f, 2), OracleError);
}

TEST_CASE("initial norm and Moshinsky contour") {
    CHECK(oracle::initial_norm({Kind::EntangledSymmetric, 2, 5}, 1.5) == doctest::Approx(1.0).epsilon(1e-13));
    // free-particle limit of the defining integral: kappa on the real axis is not allowed, slightly off works
    const cplx k(2.0, -0.3);
    CHECK(rel(oracle::moshinsky_contour(k, 0.5), moshinsky(k, 0.5)) < 1e-9);
}

TEST_CASE("Crank-Nicolson: norm conservation and free motion") {
    ModelParams free;
    free.lambda = 0.0;
    oracle::GridTDSESpec g;
    g.length = 12.0;
    const std::vector<double> ts{0.0, 0.05, 0.2, 0.5};
    const auto res = oracle::tdse_single_particle(free, 1, ts, g);
    REQUIRE(res.survival.size() == ts.size());
    CHECK(res.max_norm_drift < 1e-10);
    CHECK(res.survival[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double want = std::norm(oracle::free_survival_amplitude(1, ts[i], 1.0, 96));
        CHECK(std::abs(res.survival[i] - want) < 2e-4);
    }
    g.width = 0.003;  // not a multiple of dx
    CHECK_THROWS_AS(oracle::tdse_single_particle(free, 1, ts, g), OracleError);
}

TEST_CASE("quadrature observables report their own convergence") {
    const PoleTable t(ModelParams{});
    const auto q = oracle::quadrature_observables(t, {Kind::EntangledSymmetric, 1, 6}, t.tau1());
    CHECK(q.error_estimate < 1e-10);
    CHECK(q.P >= q.S);
}
