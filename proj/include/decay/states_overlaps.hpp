#pragma once

#include <vector>

#include "decay/pole_solver.hpp"

namespace decay {

// psi_s(y) = sqrt(2/a) sin(s pi y / a)
double box_state_value(int s, double y, double a);

// Int_0^a sin(k1 y) sin(k2 y) dy, series branch near k1 = k2 (and k1 = -k2).
cplx sine_product_integral(cplx k1, cplx k2, double a);

// Int_0^a y^n sin(k y) dy
cplx sine_power_integral(int n, cplx k, double a);

// C for basis index i of the table (0..2N-1), box state s.
cplx overlap_C(const PoleTable& table, int i, int s);
std::vector<cplx> overlap_C_all(const PoleTable& table, int s);

// Int_0^a y^n psi_s(y) dy
double monomial_moment(int n, int s, double a);
double moment_D(int s, double a);
double moment_G(int s, double a);
double moment_H(int s, double a);

// U_ij = Int_0^a u_i u_j dr (no conjugation)
cplx overlap_U(const PoleTable& table, int i, int j);

// Int_0^a r^n u_i(r) dr
cplx resonant_power_overlap(const PoleTable& table, int i, int n);

// Sum over proper poles of C_{n,s}^2
cplx sum_rule_sum(const PoleTable& table, int s);
// |Re(sum) - 1|
double sum_rule_defect(const PoleTable& table, int s);

// Everything the expansions need for one box state.
struct BoxOverlaps {
    int s = 0;
    std::vector<cplx> C;  // indexed like the pole table
    double D = 0.0, G = 0.0, H = 0.0;
};
BoxOverlaps box_overlaps(const PoleTable& table, int s);

}  // namespace decay
