#include "decay/reference_oracles.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "decay/errors.hpp"
#include "decay/observables.hpp"

namespace decay::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

using q128 = __float128;

struct Q {
    q128 re = 0, im = 0;
};
Q operator+(Q a, Q b) { return {a.re + b.re, a.im + b.im}; }
Q operator-(Q a, Q b) { return {a.re - b.re, a.im - b.im}; }
Q operator*(Q a, Q b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Q operator*(Q a, q128 s) { return {a.re * s, a.im * s}; }
Q operator/(Q a, Q b) {
    const q128 d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
q128 qabs(Q a) { return sqrtq(a.re * a.re + a.im * a.im); }
Q qexp_minus_square(Q z) {
    const q128 re = (z.im - z.re) * (z.im + z.re);
    const q128 im = -2 * z.re * z.im;
    const q128 m = expq(re);
    return {m * cosq(im), m * sinq(im)};
}

const q128 kSqrtPiQ = sqrtq(M_PIq);

Q taylor(Q z) {
    const Q iz{-z.im, z.re};
    const Q iz2 = iz * iz;
    Q even{1, 0};
    Q odd = iz * (2 / kSqrtPiQ);
    Q sum = even + odd;
    for (int n = 0; n < 2000; n += 2) {
        // t_{n+2} = t_n (iz)^2 / (n/2 + 1)
        even = even * iz2 * (1 / (q128(n) / 2 + 1));
        odd = odd * iz2 * (1 / (q128(n + 1) / 2 + 1));
        sum = sum + even + odd;
        if (n > 20 && qabs(even) + qabs(odd) < 1e-40Q * qabs(sum)) return sum;
    }
    throw OracleError("faddeyeva_reference: Taylor series did not converge");
}

Q fraction(Q z, int depth) {
    Q r = z;
    for (int k = depth; k >= 1; --k) r = z - Q{q128(k) / 2, 0} / r;
    return Q{0, 1 / kSqrtPiQ} / r;
}

Q fraction_converged(Q z) {
    Q prev = fraction(z, 64);
    for (int depth = 128; depth <= (1 << 18); depth *= 2) {
        const Q cur = fraction(z, depth);
        if (qabs(cur - prev) <= 1e-30Q * qabs(cur)) return cur;
        prev = cur;
    }
    throw OracleError("faddeyeva_reference: continued fraction did not converge");
}

Q dawson_series(Q z) {
    const Q z2 = z * z;
    Q power = z;  // z^(2n+1)/n!
    Q sum{0, 0};
    for (int n = 0; n < 200000; ++n) {
        const Q term = power * (1 / q128(2 * n + 1));
        sum = sum + term;
        if (n > 2 && qabs(term) < 1e-40Q * qabs(sum) && q128(n) > z2.re) break;
        power = power * z2 * (1 / q128(n + 1));
    }
    const Q e = qexp_minus_square(z);
    return e + e * Q{0, 2 / kSqrtPiQ} * sum;
}

// (i/sqrt(pi)) sum (2j-1)!!/(2z^2)^j / z plus the exp(-z^2) piece; its smallest
// term is ~exp(-|z|^2), far below binary128 precision for |z| > 100
Q large_argument(Q z) {
    const Q q = Q{1, 0} / (z * z * q128(2));
    Q term = Q{1, 0} / z;
    Q sum{0, 0};
    for (int j = 0; j < 400; ++j) {
        sum = sum + term;
        const Q next = term * q * q128(2 * j + 1);
        if (qabs(next) < 1e-36Q * qabs(sum)) break;
        term = next;
    }
    return Q{0, 1 / kSqrtPiQ} * sum + qexp_minus_square(z);
}

Q upper(Q z) {
    const q128 r = qabs(z);
    if (r <= 5) return taylor(z);
    if (z.im >= 1) return fraction_converged(z);
    if (r > 100) return large_argument(z);
    return dawson_series(z);
}

struct GslFunction {
    const std::function<double(double)>* f;
    static double call(double x, void* p) { return (*static_cast<GslFunction*>(p)->f)(x); }
};

double gsl_integral(const std::function<double(double)>& f, double lo, double hi, double abs_tol, double rel_tol) {
    gsl_set_error_handler_off();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
    GslFunction holder{&f};
    gsl_function F{&GslFunction::call, &holder};
    double result = 0.0, err = 0.0;
    const int status = gsl_integration_qag(&F, lo, hi, abs_tol, rel_tol, 4000, GSL_INTEG_GAUSS61, ws, &result, &err);
    gsl_integration_workspace_free(ws);
    if (status != 0 && status != GSL_EROUND) throw OracleError(std::string("adaptive quadrature failed: ") + gsl_strerror(status));
    return result;
}

}  // namespace

cplx faddeyeva_reference(cplx zd) {
    Q z{zd.real(), zd.imag()};
    Q w;
    if (z.im >= 0) {
        w = upper(z);
    } else {
        const Q e = qexp_minus_square(z);
        w = e * q128(2) - upper(Q{-z.re, -z.im});
    }
    return {static_cast<double>(w.re), static_cast<double>(w.im)};
}

cplx adaptive_integral(const std::function<cplx(double)>& f, double lo, double hi, double abs_tol, double rel_tol) {
    const std::function<double(double)> re = [&](double x) { return f(x).real(); };
    const std::function<double(double)> im = [&](double x) { return f(x).imag(); };
    return {gsl_integral(re, lo, hi, abs_tol, rel_tol), gsl_integral(im, lo, hi, abs_tol, rel_tol)};
}

cplx moshinsky_contour(cplx kappa, double t) {
    if (!(t > 0.0)) throw OracleError("moshinsky_contour needs t > 0");
    const cplx rot = std::polar(1.0, -0.25 * kPi);
    const double L = std::sqrt(80.0 / t);
    auto f = [&](double s) { return std::exp(-s * s * t) * rot / (rot * s - kappa); };
    // split at the point of the line closest to kappa
    const double s0 = std::clamp((std::conj(rot) * kappa).real(), -L, L);
    cplx I = 0.0;
    if (s0 > -L) I += adaptive_integral(f, -L, s0);
    if (s0 < L) I += adaptive_integral(f, s0, L);
    cplx m = kI / (2.0 * kPi) * I;
    const double arg = std::arg(kappa);
    const cplx e = std::exp(-kI * kappa * kappa * t);
    if (arg < 0.0 && arg > -0.25 * kPi) m += e;        // swept by the s > 0 half
    if (arg > 0.75 * kPi && arg < kPi) m -= e;         // swept by the s < 0 half
    return m;
}

cplx integral_term_contour(double r, double rp, double t, const ModelParams& params) {
    if (!(t > 0.0)) throw OracleError("integral_term_contour needs t > 0");
    const cplx rot = std::polar(1.0, -0.25 * kPi);
    const double L = std::sqrt(80.0 / t);
    auto f = [&](double s) {
        const cplx k = rot * s;
        return greens_outgoing(r, rp, k, params) * std::exp(-s * s * t) * 2.0 * k * rot;
    };
    const cplx I = adaptive_integral(f, -L, 0.0, 1e-16, 1e-12) + adaptive_integral(f, 0.0, L, 1e-16, 1e-12);
    return kI / (2.0 * kPi) * I;
}

namespace {

template <class C, class F>
C richardson_odd(F&& f, int order, double h0, int levels) {
    using R = typename C::value_type;
    auto stencil = [&](R h) -> C {
        switch (order) {
            case 1: return (f(h) - f(-h)) / (R(2) * h);
            case 3: return (f(2 * h) - R(2) * f(h) + R(2) * f(-h) - f(-2 * h)) / (R(2) * h * h * h);
            case 5:
                return (f(3 * h) - R(4) * f(2 * h) + R(5) * f(h) - R(5) * f(-h) + R(4) * f(-2 * h) - f(-3 * h)) /
                       (R(2) * h * h * h * h * h);
            default: throw OracleError("odd derivative: order must be 1, 3 or 5");
        }
    };
    if (levels < 2) throw OracleError("odd derivative: need at least 2 levels");
    std::vector<std::vector<C>> T(levels);
    R h = h0;
    // keep the diagonal entry that changed least; deeper levels lose to roundoff
    C best = 0;
    R best_change = std::numeric_limits<R>::infinity();
    for (int i = 0; i < levels; ++i, h /= 2) {
        T[i].push_back(stencil(h));
        R fac = 4;
        for (int j = 1; j <= i; ++j, fac *= 4) T[i].push_back(T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (fac - 1));
        if (i == 0) continue;
        const R change = std::abs(T[i][i] - T[i - 1][i - 1]);
        if (change < best_change) {
            best_change = change;
            best = T[i][i];
        }
    }
    return best;
}

}  // namespace

cplx odd_derivative_at_zero(const std::function<cplx(double)>& f, int order, double h0, int levels) {
    return richardson_odd<cplx>(f, order, h0, levels);
}

cplx greens_derivative_reference(double r, double rp, int order, const ModelParams& params, double h0, int levels) {
    using L = long double;
    using CL = std::complex<L>;
    if (r > rp) std::swap(r, rp);
    const L lam = params.lambda, a = params.a, x = r, xp = rp;
    const CL i(0, 1);
    auto g = [&](L k) -> CL {
        if (k == 0) return CL(-x * (1 + lam * a - lam * xp) / (1 + lam * a));
        const CL eika = std::exp(i * k * a);
        const CL num = k * std::exp(i * k * xp) - lam * std::sin(k * (xp - a)) * eika;
        const CL den = k + lam * std::sin(k * a) * eika;
        return -(std::sin(k * x) / k) * num / den;
    };
    const CL d = richardson_odd<CL>(g, order, h0, levels);
    return {static_cast<double>(d.real()), static_cast<double>(d.imag())};
}

QuadratureResult quadrature_observables(const PoleTable& table, const InitialStateSpec& spec, double t,
                                        const ExpansionOptions& opt, const QuadratureSpec& q) {
    spec.validate();
    const double a = table.params().a;
    auto run = [&](int order) {
        const GaussRule& g = gauss_legendre(order);
        std::vector<double> y(order), w(order);
        for (int i = 0; i < order; ++i) {
            y[i] = 0.5 * a * (g.x[i] + 1.0);
            w[i] = 0.5 * a * g.w[i];
        }
        // single-particle pieces at the nodes
        auto phi = [&](int s) {
            const EvolvedState st = evolve_coefficients(table, box_overlaps(table, s), t, Form::Exact, opt);
            std::vector<cplx> v(order);
            for (int i = 0; i < order; ++i) v[i] = evaluate(table, st, y[i]);
            return v;
        };
        const auto pa = phi(spec.alpha);
        const auto pb = spec.factorized() ? pa : phi(spec.beta);
        QuadratureResult res;
        double P = 0.0;
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j) {
                cplx psi;
                if (spec.factorized()) psi = pa[i] * pa[j];
                else psi = (pa[i] * pb[j] + static_cast<double>(spec.parity()) * pb[i] * pa[j]) / std::numbers::sqrt2;
                const double ww = w[i] * w[j];
                res.amplitude += ww * initial_wavefunction(spec, y[i], y[j], a) * psi;
                P += ww * std::norm(psi);
            }
        res.P = P;
        res.S = std::norm(res.amplitude);
        return res;
    };
    QuadratureResult hi = run(q.order + q.order / 2);
    const QuadratureResult lo = run(q.order);
    hi.error_estimate = std::max(std::abs(hi.amplitude - lo.amplitude), std::abs(hi.P - lo.P));
    if (hi.error_estimate > q.tolerance) throw OracleError("quadrature_observables: tolerance not met");
    return hi;
}

double initial_norm(const InitialStateSpec& spec, double a, int order) {
    const GaussRule& g = gauss_legendre(order);
    double sum = 0.0;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
            const double y1 = 0.5 * a * (g.x[i] + 1.0), y2 = 0.5 * a * (g.x[j] + 1.0);
            const double v = initial_wavefunction(spec, y1, y2, a);
            sum += 0.25 * a * a * g.w[i] * g.w[j] * v * v;
        }
    return sum;
}

TDSEResult tdse_single_particle(const ModelParams& params, int s, const std::vector<double>& t_samples, const GridTDSESpec& grid) {
    const double a = params.a, dx = grid.dx, dt = grid.dt;
    const int n = static_cast<int>(std::lround(grid.length / dx)) - 1;  // interior points r_j = (j+1) dx
    const int ja = static_cast<int>(std::lround(a / dx)) - 1;
    const int half = static_cast<int>(std::lround(0.5 * grid.width / dx));
    if (std::abs((ja + 1) * dx - a) > 1e-9 * a || half < 1 || std::abs(2 * half * dx - grid.width) > 1e-9)
        throw OracleError("tdse: a and the barrier width must be integer multiples of dx (width of at least 2 cells)");

    // barrier of height lambda/w; trapezoid weights at its two edges keep the integrated strength at lambda
    std::vector<double> V(n, 0.0);
    const double height = params.lambda / grid.width;
    for (int j = ja - half; j <= ja + half; ++j) V[j] = (j == ja - half || j == ja + half) ? 0.5 * height : height;

    std::vector<cplx> psi(n, 0.0), ref(n, 0.0);
    for (int j = 0; j <= ja; ++j) psi[j] = box_state_value(s, (j + 1) * dx, a);
    ref = psi;
    auto norm = [&](const std::vector<cplx>& v) {
        double sum = 0.0;
        for (const auto& x : v) sum += std::norm(x);
        return sum * dx;
    };
    auto survival = [&]() {
        cplx sum = 0.0;
        for (int j = 0; j <= ja; ++j) sum += ref[j] * psi[j];
        return std::norm(sum * dx);
    };
    // discrete normalization of the initial state
    const double n0 = norm(psi);
    for (auto& x : psi) x /= std::sqrt(n0);
    for (auto& x : ref) x /= std::sqrt(n0);

    // (1 + i H dt/2) psi_new = (1 - i H dt/2) psi,  H = -d^2/dr^2 + V
    const cplx alpha = kI * dt / 2.0;
    const cplx off = -alpha / (dx * dx);
    std::vector<cplx> diag(n), rhs(n), cprime(n), dprime(n);
    for (int j = 0; j < n; ++j) diag[j] = 1.0 + alpha * (2.0 / (dx * dx) + V[j]);

    TDSEResult out;
    double t = 0.0;
    double prev_norm = norm(psi);
    std::size_t next = 0;
    while (next < t_samples.size() && t_samples[next] <= 0.0) {
        out.times.push_back(0.0);
        out.survival.push_back(survival());
        ++next;
    }
    while (next < t_samples.size()) {
        for (int j = 0; j < n; ++j) {
            const cplx d = 1.0 - alpha * (2.0 / (dx * dx) + V[j]);
            rhs[j] = d * psi[j];
            if (j > 0) rhs[j] -= off * psi[j - 1];
            if (j + 1 < n) rhs[j] -= off * psi[j + 1];
        }
        cprime[0] = off / diag[0];
        dprime[0] = rhs[0] / diag[0];
        for (int j = 1; j < n; ++j) {
            const cplx m = diag[j] - off * cprime[j - 1];
            cprime[j] = off / m;
            dprime[j] = (rhs[j] - off * dprime[j - 1]) / m;
        }
        psi[n - 1] = dprime[n - 1];
        for (int j = n - 2; j >= 0; --j) psi[j] = dprime[j] - cprime[j] * psi[j + 1];
        t += dt;
        const double nn = norm(psi);
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(nn - prev_norm));
        if (std::abs(nn - prev_norm) > 1e-8) throw OracleError("tdse: norm drift above 1e-8 in one step");
        prev_norm = nn;
        while (next < t_samples.size() && t_samples[next] <= t + 0.5 * dt) {
            out.times.push_back(t);
            out.survival.push_back(survival());
            ++next;
        }
    }
    return out;
}

double resonance_survival(const PoleTable& table, int s, double t, const ExpansionOptions& opt) {
    const EvolvedState st = evolve_coefficients(table, box_overlaps(table, s), t, Form::Exact, opt);
    const SeparableBasis basis(table);
    const Eigen::VectorXcd c = single_particle_vector(basis, st);
    return std::norm(basis.box_overlap(s).cwiseProduct(c).sum());
}

cplx free_survival_amplitude(int s, double t, double a, int order) {
    const GaussRule& g = gauss_legendre(order);
    cplx sum = 0.0;
    for (int i = 0; i < order; ++i) {
        const double r = 0.5 * a * (g.x[i] + 1.0);
        sum += 0.5 * a * g.w[i] * box_state_value(s, r, a) * evolve_free(s, r, t, a);
    }
    return sum;
}

}  // namespace decay::oracle
