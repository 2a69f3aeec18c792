#include "decay/two_particle.hpp"

#include <cmath>
#include <numbers>

#include "decay/errors.hpp"

namespace decay {

namespace {

constexpr cplx kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

cplx single(const PoleTable& table, const BoxOverlaps& ov, double r, double t, const ExpansionOptions& opt) {
    return evaluate(table, evolve_coefficients(table, ov, t, Form::Exact, opt), r);
}

}  // namespace

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::FactorizedSymmetric: return "factorized";
        case Kind::EntangledSymmetric: return "symmetric";
        case Kind::EntangledAntisymmetric: return "antisymmetric";
    }
    return "?";
}

Kind parse_kind(const std::string& s) {
    if (s == "factorized" || s == "fac") return Kind::FactorizedSymmetric;
    if (s == "symmetric" || s == "sym") return Kind::EntangledSymmetric;
    if (s == "antisymmetric" || s == "anti") return Kind::EntangledAntisymmetric;
    throw InvalidSpecError("unknown state kind '" + s + "' (expected factorized, symmetric or antisymmetric)");
}

void InitialStateSpec::validate() const {
    if (alpha < 1) throw InvalidSpecError("alpha must be >= 1");
    if (factorized()) return;
    if (beta < 1) throw InvalidSpecError("beta must be >= 1");
    if (alpha == beta && kind == Kind::EntangledAntisymmetric)
        throw InvalidSpecError("antisymmetric state with alpha == beta vanishes identically");
    if (alpha == beta) throw InvalidSpecError("entangled symmetric state with alpha == beta is not normalized; use the factorized kind");
}

double initial_wavefunction(const InitialStateSpec& spec, double y1, double y2, double a) {
    spec.validate();
    if (spec.factorized()) return box_state_value(spec.alpha, y1, a) * box_state_value(spec.alpha, y2, a);
    const double ab = box_state_value(spec.alpha, y1, a) * box_state_value(spec.beta, y2, a);
    const double ba = box_state_value(spec.beta, y1, a) * box_state_value(spec.alpha, y2, a);
    return (ab + spec.parity() * ba) * kInvSqrt2;
}

Eigen::MatrixXcd two_particle_coefficients(const PoleTable& table, const InitialStateSpec& spec) {
    spec.validate();
    const auto ca = overlap_C_all(table, spec.alpha);
    const int n = table.size();
    Eigen::Map<const Eigen::VectorXcd> va(ca.data(), n);
    if (spec.factorized()) return va * va.transpose();
    const auto cb = overlap_C_all(table, spec.beta);
    Eigen::Map<const Eigen::VectorXcd> vb(cb.data(), n);
    return (va * vb.transpose() + static_cast<double>(spec.parity()) * vb * va.transpose()) * kInvSqrt2;
}

SeparableBasis::SeparableBasis(const PoleTable& table)
    : table_(&table), np_(table.size()), dim_(table.size() + 3), gram_(dim_, dim_) {
    const double a = table.params().a;
    for (int i = 0; i < np_; ++i)
        for (int k = 0; k < np_; ++k) gram_(i, k) = overlap_U(table, i, table.mirror_index(k));
    const int pw[3] = {1, 3, 5};
    for (int i = 0; i < np_; ++i)
        for (int j = 0; j < 3; ++j) {
            const cplx v = resonant_power_overlap(table, i, pw[j]);
            gram_(i, np_ + j) = v;
            gram_(np_ + j, i) = std::conj(v);
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int e = pw[i] + pw[j] + 1;
            gram_(np_ + i, np_ + j) = std::pow(a, e) / e;
        }
}

Eigen::VectorXcd SeparableBasis::values(double r) const {
    Eigen::VectorXcd f(dim_);
    const double a = table_->params().a;
    for (int i = 0; i < np_; ++i) f(i) = state_value(table_->state(i), r, a);
    f(np_) = r;
    f(np_ + 1) = r * r * r;
    f(np_ + 2) = r * r * r * r * r;
    return f;
}

Eigen::VectorXcd SeparableBasis::box_overlap(int s) const {
    const BoxOverlaps ov = box_overlaps(*table_, s);
    Eigen::VectorXcd o(dim_);
    for (int i = 0; i < np_; ++i) o(i) = ov.C[i];
    o(np_) = ov.D;
    o(np_ + 1) = ov.G;
    o(np_ + 2) = ov.H;
    return o;
}

Eigen::VectorXcd single_particle_vector(const SeparableBasis& basis, const EvolvedState& st) {
    Eigen::VectorXcd c(basis.dim());
    for (int i = 0; i < basis.poles(); ++i) c(i) = st.pole[i];
    for (int j = 0; j < 3; ++j) c(basis.poles() + j) = st.poly[j];
    return c;
}

SeparableState separable_state(const SeparableBasis& basis, const InitialStateSpec& spec, double t, Form form,
                               const ExpansionOptions& opt) {
    spec.validate();
    const PoleTable& table = basis.table();
    const int dim = basis.dim();
    SeparableState out;
    out.form = form;

    if (form != Form::Asymptotic) {
        const Eigen::VectorXcd ca = single_particle_vector(basis, evolve_coefficients(table, box_overlaps(table, spec.alpha), t, form, opt));
        if (spec.factorized()) {
            out.K = ca * ca.transpose();
            return out;
        }
        const Eigen::VectorXcd cb = single_particle_vector(basis, evolve_coefficients(table, box_overlaps(table, spec.beta), t, form, opt));
        out.K = (ca * cb.transpose() + static_cast<double>(spec.parity()) * cb * ca.transpose()) * kInvSqrt2;
        return out;
    }

    if (!(t > 0.0)) throw DomainError("asymptotic form needs t > 0");
    const int n = table.n();
    const double a = table.params().a;
    const HCoefficients h = h_coefficients(table.params());
    const cplx e1 = asymptotic_coefficients().eta1;
    const int iR = basis.index_r(1), iR3 = basis.index_r(3);
    out.K = Eigen::MatrixXcd::Zero(dim, dim);

    Eigen::VectorXcd E(n);
    for (int i = 0; i < n; ++i) E(i) = std::exp(-kI * table.kappa(i) * table.kappa(i) * t);
    auto proper_C = [&](int s) {
        Eigen::VectorXcd c(n);
        for (int i = 0; i < n; ++i) c(i) = overlap_C(table, i, s);
        return c;
    };
    const double t32 = std::pow(t, 1.5), t3 = t * t * t;

    if (spec.factorized()) {
        const double D = moment_D(spec.alpha, a);
        const Eigen::VectorXcd x = proper_C(spec.alpha).cwiseProduct(E);
        out.K.topLeftCorner(n, n) = x * x.transpose();
        out.K(iR, iR) = -D * D * e1 * e1 / (h.h1 * h.h1 * t3);
        const Eigen::VectorXcd w = (-kI * e1 * D / (h.h1 * t32)) * x;
        out.K.block(0, iR, n, 1) += w;
        out.K.block(iR, 0, 1, n) += w.transpose();
        return out;
    }

    const double sg = spec.parity();
    const double Da = moment_D(spec.alpha, a), Db = moment_D(spec.beta, a);
    const Eigen::VectorXcd xa = proper_C(spec.alpha).cwiseProduct(E);
    const Eigen::VectorXcd xb = proper_C(spec.beta).cwiseProduct(E);
    out.K.topLeftCorner(n, n) = (xa * xb.transpose() + sg * xb * xa.transpose()) * kInvSqrt2;
    const Eigen::VectorXcd w = (-kI * e1 * kInvSqrt2 / (h.h1 * t32)) * (Db * xa + sg * Da * xb);
    out.K.block(0, iR, n, 1) += w;
    out.K.block(iR, 0, 1, n) += sg * w.transpose();
    if (spec.kind == Kind::EntangledSymmetric) {
        out.K(iR, iR) = -std::numbers::sqrt2 * Da * Db * e1 * e1 / (h.h1 * h.h1 * t3);
    } else {
        const double Ga = moment_G(spec.alpha, a), Gb = moment_G(spec.beta, a);
        const cplx c = antisymmetric_power_coefficient() * (Db * Ga - Gb * Da) * kInvSqrt2 / (h.h1 * h.h1 * std::pow(t, 5));
        out.K(iR3, iR) = c;
        out.K(iR, iR3) = -c;
    }
    return out;
}

cplx evaluate(const SeparableBasis& basis, const SeparableState& st, double r1, double r2) {
    return basis.values(r1).transpose() * st.K * basis.values(r2);
}

cplx psi_exact(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2, double t, const ExpansionOptions& opt) {
    spec.validate();
    const BoxOverlaps oa = box_overlaps(table, spec.alpha);
    if (spec.factorized()) return single(table, oa, r1, t, opt) * single(table, oa, r2, t, opt);
    const BoxOverlaps ob = box_overlaps(table, spec.beta);
    const cplx ab = single(table, oa, r1, t, opt) * single(table, ob, r2, t, opt);
    const cplx ba = single(table, ob, r1, t, opt) * single(table, oa, r2, t, opt);
    return (ab + static_cast<double>(spec.parity()) * ba) * kInvSqrt2;
}

cplx psi_exact_double_sum(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2, double t) {
    const Eigen::MatrixXcd B = two_particle_coefficients(table, spec);
    const double a = table.params().a;
    const int n = table.size();
    Eigen::VectorXcd v1(n), v2(n);
    for (int i = 0; i < n; ++i) {
        const cplx m = moshinsky(table.kappa(i), t);
        v1(i) = state_value(table.state(i), r1, a) * m;
        v2(i) = state_value(table.state(i), r2, a) * m;
    }
    return v1.transpose() * B * v2;
}

cplx antisymmetric_power_coefficient() {
    const auto eta = asymptotic_coefficients();
    return eta.eta2 * eta.eta2 - 10.0 * eta.eta1 * eta.eta3 / 3.0;
}

cplx psi_asymptotic(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2, double t) {
    spec.validate();
    if (!(t > 0.0)) throw DomainError("asymptotic form needs t > 0");
    const double a = table.params().a;
    if (!(r1 >= 0.0 && r1 <= a && r2 >= 0.0 && r2 <= a)) throw DomainError("psi_asymptotic: r outside [0, a]");
    const int n = table.n();
    const HCoefficients h = h_coefficients(table.params());
    const cplx e1 = asymptotic_coefficients().eta1;
    const double t32 = std::pow(t, 1.5), t3 = t * t * t;

    // sums S(c, g) = sum_p c_p g_p E_p over proper poles
    std::vector<cplx> u1(n), u2(n), E(n);
    for (int i = 0; i < n; ++i) {
        u1[i] = state_value(table.state(i), r1, a);
        u2[i] = state_value(table.state(i), r2, a);
        E[i] = std::exp(-kI * table.kappa(i) * table.kappa(i) * t);
    }
    auto sum = [&](int s, const std::vector<cplx>& u) {
        cplx v = 0.0;
        for (int i = 0; i < n; ++i) v += overlap_C(table, i, s) * u[i] * E[i];
        return v;
    };

    if (spec.factorized()) {
        const double D = moment_D(spec.alpha, a);
        const cplx x1 = sum(spec.alpha, u1), x2 = sum(spec.alpha, u2);
        return x1 * x2 - r1 * r2 * D * D * e1 * e1 / (h.h1 * h.h1 * t3) - kI * e1 / (h.h1 * t32) * D * (r2 * x1 + r1 * x2);
    }
    const double sg = spec.parity();
    const double Da = moment_D(spec.alpha, a), Db = moment_D(spec.beta, a);
    const cplx a1 = sum(spec.alpha, u1), a2 = sum(spec.alpha, u2), b1 = sum(spec.beta, u1), b2 = sum(spec.beta, u2);
    const cplx ex = (a1 * b2 + sg * b1 * a2) * kInvSqrt2;
    // mixed: sum_p (D_b C_pa + sg D_a C_pb) E_p (r2 u1 + sg r1 u2)
    const cplx mixed = -kI * e1 * kInvSqrt2 / (h.h1 * t32) * (Db * (r2 * a1 + sg * r1 * a2) + sg * Da * (r2 * b1 + sg * r1 * b2));
    cplx power;
    if (spec.kind == Kind::EntangledSymmetric) {
        power = -std::numbers::sqrt2 * r1 * r2 * Da * Db * e1 * e1 / (h.h1 * h.h1 * t3);
    } else {
        const double Ga = moment_G(spec.alpha, a), Gb = moment_G(spec.beta, a);
        power = antisymmetric_power_coefficient() * (r1 * r1 * r1 * r2 - r2 * r2 * r2 * r1) * (Db * Ga - Gb * Da) * kInvSqrt2 /
                (h.h1 * h.h1 * std::pow(t, 5));
    }
    return ex + mixed + power;
}

cplx psi_free(const InitialStateSpec& spec, double r1, double r2, double t, double a) {
    spec.validate();
    if (spec.factorized()) return evolve_free(spec.alpha, r1, t, a) * evolve_free(spec.alpha, r2, t, a);
    const cplx ab = evolve_free(spec.alpha, r1, t, a) * evolve_free(spec.beta, r2, t, a);
    const cplx ba = evolve_free(spec.beta, r1, t, a) * evolve_free(spec.alpha, r2, t, a);
    return (ab + static_cast<double>(spec.parity()) * ba) * kInvSqrt2;
}

}  // namespace decay
