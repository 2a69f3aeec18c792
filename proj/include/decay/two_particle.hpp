#pragma once

#include <Eigen/Dense>
#include <string>

#include "decay/propagator.hpp"

namespace decay {

enum class Kind { FactorizedSymmetric, EntangledSymmetric, EntangledAntisymmetric };

const char* kind_name(Kind k);
Kind parse_kind(const std::string& s);

struct InitialStateSpec {
    Kind kind = Kind::FactorizedSymmetric;
    int alpha = 1;
    int beta = 1;  // ignored for the factorized kind

    void validate() const;
    // +1 for the symmetric kinds, -1 for the antisymmetric one
    int parity() const { return kind == Kind::EntangledAntisymmetric ? -1 : 1; }
    bool factorized() const { return kind == Kind::FactorizedSymmetric; }
};

double initial_wavefunction(const InitialStateSpec& spec, double y1, double y2, double a);

// B_pq over the full mirrored pole set (2N x 2N)
Eigen::MatrixXcd two_particle_coefficients(const PoleTable& table, const InitialStateSpec& spec);

// Functions f_i: u_i for i < 2N, then r, r^3, r^5.
class SeparableBasis {
public:
    explicit SeparableBasis(const PoleTable& table);

    int dim() const { return dim_; }
    int poles() const { return np_; }
    int index_r(int power) const { return np_ + (power - 1) / 2; }  // power in {1, 3, 5}

    Eigen::VectorXcd values(double r) const;
    // W_ik = Int_0^a f_i conj(f_k) dr
    const Eigen::MatrixXcd& gram() const { return gram_; }
    // o_i = Int_0^a psi_s f_i dr
    Eigen::VectorXcd box_overlap(int s) const;
    const PoleTable& table() const { return *table_; }

private:
    const PoleTable* table_;
    int np_;
    int dim_;
    Eigen::MatrixXcd gram_;
};

// Psi(r1, r2, t) = sum_ij K_ij f_i(r1) f_j(r2)
struct SeparableState {
    Eigen::MatrixXcd K;
    Form form = Form::Exact;
};

Eigen::VectorXcd single_particle_vector(const SeparableBasis& basis, const EvolvedState& st);

SeparableState separable_state(const SeparableBasis& basis, const InitialStateSpec& spec, double t, Form form,
                               const ExpansionOptions& opt = {});

cplx evaluate(const SeparableBasis& basis, const SeparableState& st, double r1, double r2);

// Moshinsky-form solution.  Factorized kind is evaluated as a product of
// single-particle sums; with the default options this is the plain truncated
// pole expansion.
cplx psi_exact(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2, double t,
               const ExpansionOptions& opt = {});
// Same, as the literal double sum over B_pq.
cplx psi_exact_double_sum(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2, double t);

// Long-time form: exponential double sum over proper poles, the pure power
// term (t^-3 for the symmetric kinds, t^-5 for the antisymmetric kind) and the
// mixed t^{-3/2} x exponential term.
cplx psi_asymptotic(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2, double t);

// Coefficient multiplying (r1^3 r2 - r2^3 r1)(D_b G_a - G_b D_a)/(sqrt2 h1^2 t^5)
// in the antisymmetric long-time form: eta2^2 - 10 eta1 eta3 / 3.
cplx antisymmetric_power_coefficient();

// Free (lambda = 0) two-particle wave function from free single-particle evolutions.
cplx psi_free(const InitialStateSpec& spec, double r1, double r2, double t, double a);

}  // namespace decay
