#include <doctest.h>

#include <cmath>

#include "decay/errors.hpp"
#include "decay/reference_oracles.hpp"
#include "decay/two_particle.hpp"

using namespace decay;

namespace {
const PoleTable& table() {
    static const PoleTable t(ModelParams{});
    return t;
}
const InitialStateSpec kFac{Kind::FactorizedSymmetric, 6, 6};
const InitialStateSpec kSym{Kind::EntangledSymmetric, 1, 6};
const InitialStateSpec kAnti{Kind::EntangledAntisymmetric, 1, 6};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("state kinds") {
    CHECK(parse_kind("fac") == Kind::FactorizedSymmetric);
    CHECK(parse_kind("symmetric") == Kind::EntangledSymmetric);
    CHECK(parse_kind("anti") == Kind::EntangledAntisymmetric);
    CHECK_THROWS_AS(parse_kind("boson"), InvalidSpecError);
    CHECK(std::string(kind_name(Kind::EntangledAntisymmetric)) == "antisymmetric");
    CHECK(kAnti.parity() == -1);
    CHECK(kSym.parity() == 1);
    CHECK_THROWS_AS((InitialStateSpec{Kind::EntangledAntisymmetric, 2, 2}.validate()), InvalidSpecError);
    CHECK_THROWS_AS((InitialStateSpec{Kind::EntangledSymmetric, 2, 2}.validate()), InvalidSpecError);
    CHECK_THROWS_AS((InitialStateSpec{Kind::FactorizedSymmetric, 0, 0}.validate()), InvalidSpecError);
    CHECK_NOTHROW((InitialStateSpec{Kind::FactorizedSymmetric, 3, 3}.validate()));
}

TEST_CASE("initial states are normalized and have the right exchange parity") {
    for (const auto& s : {kFac, kSym, kAnti}) {
        CHECK(oracle::initial_norm(s, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(initial_wavefunction(s, 0.2, 0.7, 1.0) == doctest::Approx(s.parity() * initial_wavefunction(s, 0.7, 0.2, 1.0)));
    }
}

TEST_CASE("two-particle coefficients B") {
    const auto Bs = two_particle_coefficients(table(), kSym);
    const auto Ba = two_particle_coefficients(table(), kAnti);
    CHECK((Bs - Bs.transpose()).norm() < 1e-15);
    CHECK((Ba + Ba.transpose()).norm() < 1e-15);
    for (int p = 0; p < Ba.rows(); ++p) CHECK(std::abs(Ba(p, p)) == 0.0);
}

TEST_CASE("wave function: product form, double sum and separable form agree") {
    const PoleTable& t = table();
    const SeparableBasis basis(t);
    CHECK(basis.dim() == 43);
    for (const auto& s : {kFac, kSym, kAnti})
        for (double x : {0.2, 1.0, 5.0}) {
            const double tt = x * t.tau1();
            const cplx prod = psi_exact(t, s, 0.3, 0.7, tt);
            CHECK(rel(psi_exact_double_sum(t, s, 0.3, 0.7, tt), prod) < 1e-11);
            const SeparableState st = separable_state(basis, s, tt, Form::Exact);
            CHECK(rel(evaluate(basis, st, 0.3, 0.7), prod) < 1e-11);
            CHECK(std::abs(psi_exact(t, s, 0.7, 0.3, tt) - static_cast<double>(s.parity()) * prod) <= 1e-14 * std::abs(prod));
        }
    // antisymmetric vanishes on the diagonal
    CHECK(std::abs(psi_exact(t, kAnti, 0.4, 0.4, t.tau1())) < 1e-16);
}

TEST_CASE("separable basis Gram matrix against quadrature") {
    const PoleTable& t = table();
    const SeparableBasis basis(t);
    const auto& W = basis.gram();
    CHECK((W - W.adjoint()).norm() < 1e-13);
    for (int i : {0, 25, 40, 42})
        for (int k : {3, 21, 41}) {
            const cplx q = oracle::adaptive_integral([&](double r) { return basis.values(r)(i) * std::conj(basis.values(r)(k)); }, 0.0, 1.0);
            CHECK(std::abs(W(i, k) - q) < 1e-11 * std::max(1.0, std::abs(q)));
        }
    const auto o = basis.box_overlap(6);
    for (int i : {2, 30, 41}) {
        const cplx q = oracle::adaptive_integral([&](double r) { return basis.values(r)(i) * box_state_value(6, r, 1.0); }, 0.0, 1.0);
        CHECK(std::abs(o(i) - q) < 1e-11);
    }
}

TEST_CASE("asymptotic wave function") {
    const PoleTable& t = table();
    const SeparableBasis basis(t);
    const ExpansionOptions opt{true, 40.0};
    for (const auto& s : {kFac, kSym, kAnti}) {
        const double tt = 1000.0 * t.tau1();
        const cplx ex = psi_exact(t, s, 0.3, 0.7, tt, opt);
        const cplx as = psi_asymptotic(t, s, 0.3, 0.7, tt);
        CHECK(rel(as, ex) < 1e-2);
        // the separable asymptotic form is the same function
        CHECK(rel(evaluate(basis, separable_state(basis, s, tt, Form::Asymptotic), 0.3, 0.7), as) < 1e-9);
    }
    CHECK_THROWS_AS(psi_asymptotic(t, kSym, 0.3, 0.7, 0.0), DomainError);
    CHECK_THROWS_AS(psi_asymptotic(t, kSym, 0.3, 1.7, 1.0), DomainError);
    const auto e = asymptotic_coefficients();
    CHECK(std::abs(antisymmetric_power_coefficient() - (e.eta2 * e.eta2 - 10.0 * e.eta1 * e.eta3 / 3.0)) < 1e-18);
}

TEST_CASE("free two-particle wave function") {
    const cplx s = psi_free(kSym, 0.3, 0.7, 1e3, 1.0), s2 = psi_free(kSym, 0.3, 0.7, 1e4, 1.0);
    const cplx a = psi_free(kAnti, 0.3, 0.7, 1e3, 1.0), a2 = psi_free(kAnti, 0.3, 0.7, 1e4, 1.0);
    CHECK(std::log10(std::abs(s2) / std::abs(s)) == doctest::Approx(-3.0).epsilon(0.02));
    CHECK(std::log10(std::abs(a2) / std::abs(a)) == doctest::Approx(-5.0).epsilon(0.02));
    CHECK(std::abs(psi_free(kAnti, 0.5, 0.5, 10.0, 1.0)) < 1e-16);
}
