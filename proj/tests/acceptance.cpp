// One line per acceptance criterion; exit status is the number of failures.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "decay/errors.hpp"
#include "decay/observables.hpp"
#include "decay/reference_oracles.hpp"

using namespace decay;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const PoleTable& table() {
    static const PoleTable t(ModelParams{});
    return t;
}

const InitialStateSpec kFac{Kind::FactorizedSymmetric, 6, 6};
const InitialStateSpec kSym{Kind::EntangledSymmetric, 1, 6};
const InitialStateSpec kAnti{Kind::EntangledAntisymmetric, 1, 6};
const InitialStateSpec kKinds[] = {kFac, kSym, kAnti};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

Outcome poles() {
    const PoleTable& t = table();
    const ModelParams& p = t.params();
    double worst = 0.0, mirror_err = 0.0;
    for (int i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(pole_residual(t.kappa(i), p)));
    for (int i = 0; i < t.n(); ++i) {
        const int m = t.mirror_index(i);
        mirror_err = std::max(mirror_err, std::abs(t.kappa(m) + std::conj(t.kappa(i))));
        mirror_err = std::max(mirror_err, std::abs(t.amplitude(m) + std::conj(t.amplitude(i))));
        for (double r : {0.25, 0.5, 1.0})
            mirror_err = std::max(mirror_err, std::abs(state_value(t.state(m), r, p.a) - std::conj(state_value(t.state(i), r, p.a))));
    }
    double max_b = 0.0;
    for (int i = 0; i < t.n(); ++i) max_b = std::max(max_b, -t.kappa(i).imag());
    const int count = count_zeros(p, 0.25 * kPi / p.a, (p.n_poles + 0.5) * kPi / p.a, -(1.5 * max_b + 0.5 / p.a), 0.5 / p.a);
    return {worst <= 1e-12 && count == 20 && mirror_err <= 1e-14,
            "max residual " + fmt("%.2e", worst) + ", argument-principle count " + std::to_string(count) + ", mirror error " + fmt("%.2e", mirror_err) +
                ", kappa_1 = " + fmt("%.16f", t.kappa(0).real()) + fmt("%+.16fi", t.kappa(0).imag())};
}

Outcome greens_derivatives() {
    const ModelParams p;
    std::mt19937 rng(20240613);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
        const double r = u(rng), rp = u(rng);
        const GreensDerivatives g = greens_derivatives_at_zero(r, rp, p);
        const cplx d[3] = {g.d1, g.d3, g.d5};
        for (int k = 0; k < 3; ++k) {
            const cplx ref = oracle::greens_derivative_reference(r, rp, 2 * k + 1, p);
            worst = std::max(worst, std::abs(d[k] - ref) / std::abs(ref));
        }
    }
    return {worst <= 1e-6, "20 random (r, r') pairs, worst relative error " + fmt("%.2e", worst) + " over d1, d3, d5 (h1 = " +
                               fmt("%g", h_coefficients(p).h1) + ")"};
}

Outcome representation() {
    const PoleTable& t = table();
    double worst = 0.0;
    for (double x : log_grid(0.1, 50.0, 40))
        for (auto [r, rp] : {std::pair{0.3, 0.7}, std::pair{0.05, 0.95}, std::pair{0.5, 0.5}, std::pair{0.9, 0.2}}) {
            const double tt = x * t.tau1();
            const cplx e = propagator_exact(t, r, rp, tt);
            worst = std::max(worst, std::abs(propagator_split(t, r, rp, tt) - e) / std::abs(e));
        }
    return {worst <= 1e-10, "40 times in [0.1, 50] tau1 x 4 point pairs, worst relative difference " + fmt("%.2e", worst)};
}

Outcome sum_rule() {
    const PoleTable& t = table();
    const cplx s1 = sum_rule_sum(t, 1), s6 = sum_rule_sum(t, 6);
    const double d1 = std::abs(s1.real() - 1.0), d6 = std::abs(s6.real() - 1.0);
    return {d1 <= 1e-3 && d6 <= 1e-3, "s=1: " + fmt("%.3e", d1) + ", s=6: " + fmt("%.3e", d6) + " (imaginary parts " + fmt("%.3e", s1.imag()) +
                                          ", " + fmt("%.3e", s6.imag()) + ", not constrained)"};
}

Outcome oracle_equivalence() {
    const PoleTable& t = table();
    double worst = 0.0;
    for (const auto& s : kKinds) {
        const DecayModel m(t, s);
        for (const ExpansionOptions& opt : {ExpansionOptions{}, ExpansionOptions{true, 40.0}})
            for (double x : {0.1, 1.0, 5.0}) {
                const double tt = x * t.tau1();
                const Observables o = m.observe(tt, Form::Exact, opt);
                const auto q = oracle::quadrature_observables(t, s, tt, opt);
                worst = std::max({worst, std::abs(o.S - q.S) / q.S, std::abs(o.P - q.P) / q.P});
            }
    }
    return {worst <= 1e-8, "3 kinds x t in {0.1, 1, 5} tau1 (plain and tail-completed), worst relative difference " + fmt("%.2e", worst)};
}

Outcome ordering() {
    const PoleTable& t = table();
    double worst = -1e300;
    int rows = 0;
    for (const auto& s : kKinds) {
        const DecayModel m(t, s);
        for (FormPolicy pol : {FormPolicy::Auto, FormPolicy::Exact}) {
            SeriesOptions opt;
            opt.policy = pol;
            try {
                const DecaySeries ser = decay_series(m, log_grid(1e-3, 1e3, 400), opt);
                for (const auto& r : ser.rows) worst = std::max(worst, r.S - r.P);
                rows += static_cast<int>(ser.rows.size());
            } catch (const DataIntegrityError& e) {
                return {false, e.what()};
            }
        }
    }
    return {worst <= 1e-12, std::to_string(rows) + " rows, max(S - P) = " + fmt("%.3e", worst)};
}

Outcome regimes() {
    const PoleTable& t = table();
    const std::vector<std::vector<std::string>> expected = {{"exp(6,6)", "exp(1,1)"}, {"exp(1,6)", "exp(1,1)"}, {"exp(1,6)", "exp(1,2)", "mixed(1)"}};
    bool ok = true;
    std::string detail;
    for (int k = 0; k < 3; ++k) {
        const DecayModel m(t, kKinds[k]);
        const DecaySeries ser = decay_series(m, log_grid(1e-3, 1e3, 400));
        const auto regs = detect_regimes(m, ser);
        detail += std::string(k ? "; " : "") + kind_name(kKinds[k].kind) + ":";
        std::size_t pos = 0;
        for (const auto& want : expected[k]) {
            while (pos < regs.size() && regs[pos].label() != want) ++pos;
            if (pos == regs.size()) {
                ok = false;
                detail += " " + want + " missing";
                pos = 0;
                continue;
            }
            const Regime& r = regs[pos];
            ok &= r.relative_error() <= 0.05;
            detail += " " + want + " " + fmt("%.4g", r.fit.slope * t.tau1()) + "/" + fmt("%.4g", r.target * t.tau1()) + " Gamma1";
        }
        if (kKinds[k].kind == Kind::EntangledAntisymmetric) {
            bool diagonal = false;
            for (const auto& r : regs) diagonal |= r.type == Regime::Type::Pair && r.p == r.q;
            ok &= !diagonal;
            detail += diagonal ? ", a -2 Gamma_p segment is present" : ", no -2 Gamma_p segment";
        }
    }
    return {ok, detail};
}

Outcome power_laws() {
    const PoleTable& t = table();
    bool ok = true;
    std::string detail;
    for (const auto& s : kKinds) {
        const DecayModel m(t, s);
        const DecaySeries ser = decay_series(m, log_grid(1e-3, 1e3, 400));
        const auto tt = ser.times();
        const double target = s.kind == Kind::EntangledAntisymmetric ? -10.0 : -6.0;
        const double tol = s.kind == Kind::EntangledAntisymmetric ? 0.3 : 0.2;
        const SlopeFit fs = fit_slope(tt, ser.S(), tt.back() / 10.0, tt.back(), Axis::Loglog);
        const SlopeFit fp = fit_slope(tt, ser.P(), tt.back() / 10.0, tt.back(), Axis::Loglog);
        ok &= std::abs(fs.slope - target) <= tol && std::abs(fp.slope - target) <= tol;
        detail += std::string(kind_name(s.kind)) + " S " + fmt("%.3f", fs.slope) + " P " + fmt("%.3f", fp.slope) + "; ";
    }
    // single particle, box state 1
    std::vector<double> ts, ss;
    for (double x : log_grid(100.0, 1000.0, 60)) {
        ts.push_back(x * t.tau1());
        ss.push_back(oracle::resonance_survival(t, 1, ts.back()));
    }
    const SlopeFit f1 = fit_slope(ts, ss, ts.front(), ts.back(), Axis::Loglog);
    ok &= std::abs(f1.slope + 3.0) <= 0.1;
    detail += "single particle S " + fmt("%.3f", f1.slope);
    return {ok, detail};
}

Outcome free_limit() {
    std::vector<double> ts, ms, ma;
    for (double t : log_grid(1e3, 1e4, 40)) {
        ts.push_back(t);
        ms.push_back(std::abs(psi_free(kSym, 0.3, 0.7, t, 1.0)));
        ma.push_back(std::abs(psi_free(kAnti, 0.3, 0.7, t, 1.0)));
    }
    const double s = fit_slope(ts, ms, ts.front(), ts.back(), Axis::Loglog).slope;
    const double a = fit_slope(ts, ma, ts.front(), ts.back(), Axis::Loglog).slope;
    return {std::abs(s + 3.0) <= 0.1 && std::abs(a + 5.0) <= 0.1,
            "|Psi(0.3a, 0.7a)| over t in [1e3, 1e4] a^2: symmetric " + fmt("%.4f", s) + ", antisymmetric " + fmt("%.4f", a)};
}

Outcome crossover() {
    const PoleTable& t = table();
    const auto grid = log_grid(1.0, 1e4, 300);
    bool ok = true;
    std::string detail = "at (0.3a, 0.7a), grid [1, 1e4] tau1: ";
    for (const auto& s : kKinds) {
        const Crossover c = psi_crossover(t, s, 0.3, 0.7, grid);
        ok &= c.found;
        detail += std::string(kind_name(s.kind)) + (c.found ? " T* = " + fmt("%.4g", c.threshold_tau1) + " tau1" : " none") + "; ";
    }
    const cplx fit = fit_antisymmetric_coefficient(t, kAnti, 0.3, 0.7, log_grid(1e3, 1e4, 40));
    const cplx want = antisymmetric_power_coefficient();
    const auto eta = asymptotic_coefficients();
    const double rel = std::abs(fit - want) / std::abs(want);
    ok &= rel <= 1e-3;
    detail += "fitted t^-5 coefficient " + fmt("%.6e", fit.real()) + fmt("%+.6ei", fit.imag()) + " vs eta2^2 - 10 eta1 eta3/3 = " +
              fmt("%.6e", want.real()) + fmt("%+.6ei", want.imag()) + " (rel " + fmt("%.1e", rel) + "; eta2^2 alone = " +
              fmt("%.3e", (eta.eta2 * eta.eta2).imag()) + "i)";
    return {ok, detail};
}

Outcome cross_method() {
    const PoleTable& t = table();
    const double tau = t.tau1();
    std::vector<double> samples;
    for (double x : linspace(0.1, 3.0, 30)) samples.push_back(x * tau);
    // a dt that lands on every sample time
    oracle::GridTDSESpec g;
    const double widths[] = {0.04, 0.02, 0.01};
    std::vector<std::vector<double>> S;
    for (double w : widths) {
        g.width = w;
        S.push_back(oracle::tdse_single_particle(t.params(), 1, samples, g).survival);
    }
    // observed order of the barrier-width error, then Richardson to w -> 0
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        num += std::abs(S[0][i] - S[1][i]);
        den += std::abs(S[1][i] - S[2][i]);
    }
    const double ratio = num / den;
    const double order = std::log2(ratio);
    const double fac = std::pow(2.0, order);
    double worst_raw[3] = {0, 0, 0}, worst_extrap = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double ref = oracle::resonance_survival(t, 1, samples[i]);
        for (int k = 0; k < 3; ++k) worst_raw[k] = std::max(worst_raw[k], std::abs(S[k][i] - ref) / ref);
        const double ex = S[2][i] + (S[2][i] - S[1][i]) / (fac - 1.0);
        worst_extrap = std::max(worst_extrap, std::abs(ex - ref) / ref);
    }
    const bool converging = worst_raw[2] < worst_raw[1] && worst_raw[1] < worst_raw[0];
    return {worst_extrap <= 1e-2 && converging,
            "s=1, t <= 3 tau1: |S_CN/S_res - 1| at w = 0.04, 0.02, 0.01: " + fmt("%.2e", worst_raw[0]) + ", " + fmt("%.2e", worst_raw[1]) + ", " +
                fmt("%.2e", worst_raw[2]) + "; observed order " + fmt("%.2f", order) + ", extrapolated " + fmt("%.2e", worst_extrap)};
}

Outcome special_functions() {
    // quadrant grid: 20 x 20 over x, y in {0} U [1e-3, 1e2] log-spaced
    std::vector<double> axis{0.0};
    for (double v : log_grid(1e-3, 1e2, 19)) axis.push_back(v);
    double worst = 0.0;
    int points = 0;
    for (double x : axis)
        for (double y : axis) {
            const cplx z(x, y);
            const cplx ref = oracle::faddeyeva_reference(z);
            worst = std::max(worst, std::abs(faddeyeva(z) - ref) / std::abs(ref));
            ++points;
        }
    // pairing identity, measured against the largest of the three terms
    const PoleTable& t = table();
    double pair_worst = 0.0;
    int pairs = 0;
    for (int i = 0; i < t.size(); ++i)
        for (double x : log_grid(1e-3, 1e3, 60)) {
            const double tt = x * t.tau1();
            const cplx k = t.kappa(i);
            const MoshinskySplit s = moshinsky_split(k, tt);
            const cplx e = std::exp(cplx(0.0, -1.0) * k * k * tt);
            const cplx m_minus = -s.remainder;
            const double scale = std::max({std::abs(s.value), std::abs(m_minus), std::abs(e)});
            pair_worst = std::max(pair_worst, std::abs(s.value + m_minus - e) / scale);
            ++pairs;
        }
    return {worst <= 1e-12 && pair_worst <= 1e-10 && points == 400,
            std::to_string(points) + "-point quadrant grid, worst relative error " + fmt("%.2e", worst) + "; pairing identity over " +
                std::to_string(pairs) + " (pole, t) pairs, worst scaled defect " + fmt("%.2e", pair_worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"pole solver", poles},
        {"Green-function derivatives at k = 0", greens_derivatives},
        {"exact vs split representation", representation},
        {"sum rule", sum_rule},
        {"coefficient sums vs 2-D quadrature", oracle_equivalence},
        {"ordering P >= S", ordering},
        {"exponential regimes", regimes},
        {"asymptotic power laws", power_laws},
        {"free limit", free_limit},
        {"exact vs asymptotic crossover", crossover},
        {"Crank-Nicolson vs resonance expansion", cross_method},
        {"special functions", special_functions},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("[%s] %2zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
