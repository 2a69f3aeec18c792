#include "decay/special_functions.hpp"

#include <cmath>
#include <numbers>

#include "decay/errors.hpp"

namespace decay {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

// Trapezoid spacing and node cutoff.  exp(-49) is below 1e-21, far under the
// size of w anywhere inside |z| < 30.
constexpr double kStep = 0.5;
constexpr double kNodeCut = 7.0;
constexpr double kFractionRadius = 30.0;
constexpr int kFractionDepth = 24;

cplx continued_fraction(cplx z) {
    cplx r = z;
    for (int k = kFractionDepth; k >= 1; --k) r = z - (0.5 * k) / r;
    return cplx(0.0, kInvSqrtPi) / r;
}

cplx trapezoid(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    // shift the node grid so that x sits halfway between two nodes
    const double t0 = x - 0.5 * kStep - kStep * std::floor((x - 0.5 * kStep) / kStep);
    const int n_lo = static_cast<int>(std::ceil((-kNodeCut - t0) / kStep));
    const int n_hi = static_cast<int>(std::floor((kNodeCut - t0) / kStep));
    cplx sum = 0.0;
    for (int n = n_lo; n <= n_hi; ++n) {
        const double tn = t0 + n * kStep;
        sum += std::exp(-tn * tn) / (z - tn);
    }
    cplx w = cplx(0.0, kStep / kPi) * sum;
    if (y < kPi / kStep) {
        const cplx phase = std::exp(cplx(2.0 * kPi * y / kStep, -2.0 * kPi * (x - t0) / kStep));
        w += 2.0 * exp_minus_square(z) / (1.0 - phase);
    }
    return w;
}

cplx upper(cplx z) {
    if (std::abs(z) >= kFractionRadius) return continued_fraction(z);
    return trapezoid(z);
}

}  // namespace

cplx exp_minus_square(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double re = (y - x) * (y + x);
    const double im = -2.0 * x * y;
    const double mag = std::exp(re);
    return {mag * std::cos(im), mag * std::sin(im)};
}

cplx faddeyeva(cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("faddeyeva: non-finite argument");
    if (z.imag() >= 0.0) return upper(z);
    return 2.0 * exp_minus_square(z) - upper(-z);
}

MoshinskyArgument moshinsky_argument(cplx kappa, double t) {
    if (!(t >= 0.0)) throw DomainError("moshinsky: negative time");
    const cplx rot = std::polar(1.0, -0.25 * kPi);
    return {kappa, t, -rot * kappa * std::sqrt(t)};
}

cplx moshinsky(cplx kappa, double t) { return moshinsky_split(kappa, t).value; }

MoshinskySplit moshinsky_split(cplx kappa, double t) {
    const MoshinskyArgument arg = moshinsky_argument(kappa, t);
    const cplx iz = cplx(0.0, 1.0) * arg.z;
    const cplx e = std::exp(cplx(0.0, -1.0) * kappa * kappa * t);
    if (t == 0.0) return {0.5, 1.0, -0.5};
    if (iz.imag() >= 0.0) {
        const cplx m = 0.5 * upper(iz);
        return {m, e, m - e};
    }
    // decaying side: M(z) = e - M(-z), with M(-z) evaluated in the upper half plane
    const cplx rem = -0.5 * upper(-iz);
    return {e + rem, e, rem};
}

cplx moshinsky_reduced(cplx kappa, double t, int drop) {
    if (drop < 0) throw DomainError("moshinsky_reduced: negative term count");
    if (!(t > 0.0)) throw DomainError("moshinsky_reduced: needs t > 0");
    const cplx zeta = cplx(0.0, 1.0) * moshinsky_argument(kappa, t).z;
    const cplx pre(0.0, 0.5 / std::sqrt(kPi));
    const cplx q = 1.0 / (2.0 * zeta * zeta);
    if (std::norm(zeta) < 30.0) {
        cplx head = 0.0, term = 1.0 / zeta;
        for (int j = 0; j < drop; ++j) {
            head += term;
            term *= (2.0 * j + 1.0) * q;
        }
        return moshinsky(kappa, t) - pre * head;
    }
    // the series is odd in zeta, so on the decaying side only the exponential changes
    cplx term = 1.0 / zeta;
    for (int j = 0; j < drop; ++j) term *= (2.0 * j + 1.0) * q;
    cplx tail = 0.0;
    double last = std::abs(term);
    for (int j = drop; j < drop + 200; ++j) {
        tail += term;
        const cplx next = term * ((2.0 * j + 1.0) * q);
        const double mag = std::abs(next);
        if (mag >= last || mag <= 1e-18 * std::abs(tail)) break;
        term = next;
        last = mag;
    }
    cplx m = pre * tail;
    if (zeta.imag() < 0.0) m += std::exp(cplx(0.0, -1.0) * kappa * kappa * t);
    return m;
}

}  // namespace decay
