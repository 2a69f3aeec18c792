#pragma once

#include <functional>
#include <vector>

#include "decay/two_particle.hpp"

// Brute-force reference implementations used by the tests.  Not part of the
// production path.
namespace decay::oracle {

// w(z) in binary128 arithmetic: Taylor series for |z| <= 5, the Laplace
// continued fraction for Im z >= 1, and the exp(-z^2)(1 + 2i/sqrt(pi) sum
// z^(2n+1)/(n!(2n+1))) series near the real axis, the large-argument series
// beyond |z| = 100 there.  Lower half plane by reflection.
cplx faddeyeva_reference(cplx z);

// Adaptive Gauss-Kronrod (GSL qag) for a complex integrand on [lo, hi].
cplx adaptive_integral(const std::function<cplx(double)>& f, double lo, double hi, double abs_tol = 1e-14,
                       double rel_tol = 1e-13);

// M(kappa, t) from its defining k-integral, taken along k = exp(-i pi/4) s
// plus the residue of any pole swept by the rotation.
cplx moshinsky_contour(cplx kappa, double t);

// (i/(2 pi)) Int_{C_l} G+(r, r'; k) exp(-i k^2 t) 2k dk over the full 45-degree line.
cplx integral_term_contour(double r, double rp, double t, const ModelParams& params);

// Odd k-derivative (order 1, 3 or 5) of f at k = 0 by central differences with
// Richardson extrapolation over halving steps; returns the diagonal entry
// that changed least from its predecessor.
cplx odd_derivative_at_zero(const std::function<cplx(double)>& f, int order, double h0 = 0.4, int levels = 7);
// Same scheme applied to the closed-form G+(r, r'; k) evaluated in long double.
cplx greens_derivative_reference(double r, double rp, int order, const ModelParams& params, double h0 = 0.4, int levels = 7);

struct QuadratureSpec {
    int order = 96;  // Gauss-Legendre points per axis
    double tolerance = 1e-10;
};

struct QuadratureResult {
    cplx amplitude;
    double S = 0.0, P = 0.0;
    double error_estimate = 0.0;
};

// Survival amplitude and nonescape probability by 2-D Gauss-Legendre over
// [0, a]^2 of the Moshinsky-form two-particle wave function.
QuadratureResult quadrature_observables(const PoleTable& table, const InitialStateSpec& spec, double t,
                                        const ExpansionOptions& opt = {}, const QuadratureSpec& q = {});

// Norm of the initial two-particle state by 2-D Gauss-Legendre.
double initial_norm(const InitialStateSpec& spec, double a, int order = 64);

struct GridTDSESpec {
    double dx = 0.0025;
    double dt = 5e-4;
    double length = 40.0;  // domain [0, L], u(0) = u(L) = 0
    double width = 0.02;   // barrier width replacing the delta shell
};

struct TDSEResult {
    std::vector<double> times;
    std::vector<double> survival;
    double max_norm_drift = 0.0;
};

// Crank-Nicolson evolution of the box state s with the delta shell replaced by
// a barrier of width w and height lambda / w centred at a.
TDSEResult tdse_single_particle(const ModelParams& params, int s, const std::vector<double>& t_samples,
                                const GridTDSESpec& grid = {});

// Single-particle survival from the resonance expansion, for comparison.
double resonance_survival(const PoleTable& table, int s, double t, const ExpansionOptions& opt = {true, 40.0});

// Free-motion survival amplitude Int psi_s(r) phi_s(r, t) dr with phi_s from the free propagator.
cplx free_survival_amplitude(int s, double t, double a, int order = 64);

}  // namespace decay::oracle
