#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "decay/special_functions.hpp"

namespace decay {

// Units hbar = 2m = 1.
struct ModelParams {
    double lambda = 6.0;
    double a = 1.0;
    int n_poles = 20;

    void validate() const;
};

struct Pole {
    int index = 0;  // nonzero; negative indices are mirror poles
    cplx kappa;

    cplx energy() const { return kappa * kappa; }
    double resonance_energy() const { return energy().real(); }
    double width() const { return -2.0 * energy().imag(); }
    double lifetime() const { return 1.0 / width(); }
    bool proper() const { return kappa.real() > -kappa.imag(); }
};

// kappa_{-p} = -conj(kappa_p)
Pole mirror(const Pole& p);

cplx pole_residual(cplx kappa, const ModelParams& params);
cplx pole_residual_derivative(cplx kappa, const ModelParams& params);

// Poles p = 1..n_poles ordered by Re kappa.  Throws SolverError on
// non-convergence, duplicates or an argument-principle count mismatch.
std::vector<Pole> solve_poles(const ModelParams& params);

// Winding number of the residual around the rectangle
// [re_lo, re_hi] x [im_lo, im_hi] in the kappa plane.
int count_zeros(const ModelParams& params, double re_lo, double re_hi, double im_lo, double im_hi);

struct ResonantState {
    Pole pole;
    cplx amplitude;
};

ResonantState normalize_state(const Pole& pole, const ModelParams& params);

// Closed-form left side of the normalization condition; equals 1 for a normalized state.
cplx normalization_integral(const ResonantState& state, const ModelParams& params);

// u_p(r) = A_p sin(kappa_p r), 0 <= r <= a.
cplx state_value(const ResonantState& state, double r, double a);

// u_{-p} = conj(u_p) requires A_{-p} = -conj(A_p).
ResonantState mirror(const ResonantState& s);

// Solved and normalized resonant states.  Index i in [0, N) is pole p = i + 1,
// index i in [N, 2N) is the mirror pole p = -(i - N + 1).
class PoleTable {
public:
    explicit PoleTable(const ModelParams& params);
    PoleTable(const ModelParams& params, std::vector<Pole> poles);

    const ModelParams& params() const { return params_; }
    int n() const { return static_cast<int>(states_.size()); }
    int size() const { return 2 * n(); }

    const ResonantState& proper(int p) const { return states_.at(p - 1); }
    const std::vector<ResonantState>& states() const { return states_; }

    cplx kappa(int i) const { return all_.at(i).pole.kappa; }
    cplx amplitude(int i) const { return all_.at(i).amplitude; }
    const ResonantState& state(int i) const { return all_.at(i); }
    int mirror_index(int i) const { return i < n() ? i + n() : i - n(); }

    double tau1() const { return states_.front().pole.lifetime(); }

    // Same table with A_p -> -A_p for the listed proper poles (and their mirrors).
    PoleTable with_flipped_branches(const std::vector<int>& proper_indices) const;

private:
    void build();
    ModelParams params_;
    std::vector<ResonantState> states_;
    std::vector<ResonantState> all_;
};

// CSV: p, Re kappa, Im kappa, E, Gamma, tau, Re A, Im A with 17 significant digits.
void write_pole_table(std::ostream& os, const PoleTable& table);

}  // namespace decay
