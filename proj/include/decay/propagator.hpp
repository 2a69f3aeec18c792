#pragma once

#include <array>
#include <vector>

#include "decay/pole_solver.hpp"
#include "decay/states_overlaps.hpp"

namespace decay {

struct HCoefficients {
    double h1 = 1.0, h2 = 0.0, h3 = 0.0, h4 = 0.0;
};
HCoefficients h_coefficients(const ModelParams& params);

// k-derivatives of G+(r, r'; k) at k = 0
struct GreensDerivatives {
    cplx d1, d3, d5;
    double h1 = 1.0, h2 = 0.0, h3 = 0.0, h4 = 0.0;
};

// eta_1 = 1/sqrt(4 pi i), eta_2 = -sqrt(i/(64 pi)), eta_3 = -1/sqrt(4096 pi i),
// principal square roots (sqrt(i) = exp(i pi/4)).
struct AsymptoticCoefficients {
    cplx eta1, eta2, eta3;
    cplx eta(int m) const;
};
AsymptoticCoefficients asymptotic_coefficients();

// Leading coefficients of the large-t expansion of the Moshinsky function:
// M(kappa, t) ~ sum_j nu_j t^{-(2j+1)/2} kappa^{-(2j+1)} (exponential part excluded).
cplx moshinsky_tail_coefficient(int j);

cplx greens_outgoing(double r, double rp, cplx k, const ModelParams& params);
GreensDerivatives greens_derivatives_at_zero(double r, double rp, const ModelParams& params);

// Options for the pole expansions.  With complete_tail the truncated pole sum
// has its large-t Moshinsky tail (orders t^{-1/2}..t^{-7/2}) replaced by the
// k = 0 saddle contribution, once |kappa_N|^2 t >= tail_threshold.  This
// removes the slowly converging t^{-1/2} artefact of a finite pole set.
struct ExpansionOptions {
    bool complete_tail = false;
    double tail_threshold = 40.0;
};

bool tail_active(const PoleTable& table, double t, const ExpansionOptions& opt);

cplx propagator_exact(const PoleTable& table, double r, double rp, double t, const ExpansionOptions& opt = {});
cplx propagator_split(const PoleTable& table, double r, double rp, double t);
// The non-exponential part of the split form.
cplx split_integral_term(const PoleTable& table, double r, double rp, double t);
cplx propagator_asymptotic(const PoleTable& table, double r, double rp, double t, int m_max);
// Radial free propagator (lambda = 0, u(0) = 0).
cplx free_propagator(double r, double rp, double t);

enum class Form { Exact, Split, Asymptotic };
const char* form_name(Form f);

// Single-particle state evolved from a box state, as
//   Psi(r, t) = sum_i pole[i] u_i(r) + poly[0] r + poly[1] r^3 + poly[2] r^5.
struct EvolvedState {
    std::vector<cplx> pole;
    std::array<cplx, 3> poly{};
};

// Coefficients of the k = 0 saddle term  Int d_{2m-1}(r, y) psi_s(y) dy  in r, r^3, r^5.
std::array<cplx, 3> saddle_projection(int m, const BoxOverlaps& ov, const HCoefficients& h);

EvolvedState evolve_coefficients(const PoleTable& table, const BoxOverlaps& ov, double t, Form form,
                                 const ExpansionOptions& opt = {}, int m_max = 3);
cplx evaluate(const PoleTable& table, const EvolvedState& st, double r);

cplx evolve_single(const PoleTable& table, int s, double r, double t, Form form, const ExpansionOptions& opt = {});

// Free evolution of a box state, by composite Gauss-Legendre quadrature of the free propagator.
cplx evolve_free(int s, double r, double t, double a);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

}  // namespace decay
