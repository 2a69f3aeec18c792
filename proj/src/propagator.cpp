#include "decay/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "decay/errors.hpp"

namespace decay {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

void check_pair(double r, double rp, double a) {
    if (!(r >= 0.0 && r <= a && rp >= 0.0 && rp <= a)) throw DomainError("propagator: r, r' must lie in [0, a]");
    if (r == a && rp == a) throw DomainError("propagator: the point r = r' = a is excluded (the expansion diverges there)");
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

double double_factorial(int n) {
    double v = 1.0;
    for (int k = n; k > 1; k -= 2) v *= k;
    return v;
}

cplx saddle_derivative(int m, double r, double rp, const HCoefficients& h) {
    const double rr = r * rp, r2 = r * r, p2 = rp * rp;
    switch (m) {
        case 1: return -kI * rr / h.h1;
        case 2: return kI * rr * (h.h1 * (r2 + p2) - h.h2) / (h.h1 * h.h1);
        case 3:
            return -kI * rr / (3.0 * h.h1 * h.h1 * h.h1) *
                   (h.h1 * h.h1 * (3.0 * r2 * r2 + 3.0 * p2 * p2 + 10.0 * r2 * p2) + h.h3 * (r2 + p2) + h.h4);
        default: throw DomainError("saddle order must be 1..3");
    }
}

}  // namespace

HCoefficients h_coefficients(const ModelParams& p) {
    const double l = p.lambda, a = p.a;
    const double l2 = l * l, l3 = l2 * l, l4 = l3 * l;
    HCoefficients h;
    h.h1 = (1.0 + l * a) * (1.0 + l * a);
    h.h2 = 8.0 * l * std::pow(a, 3) + 2.0 * l2 * std::pow(a, 4);
    h.h3 = -120.0 * l3 * std::pow(a, 5) - 80.0 * l * std::pow(a, 3) - 20.0 * l4 * std::pow(a, 6) - 180.0 * l2 * std::pow(a, 4);
    h.h4 = 192.0 * l3 * std::pow(a, 7) - 96.0 * l * std::pow(a, 5) + 24.0 * l4 * std::pow(a, 8) + 432.0 * l2 * std::pow(a, 6);
    return h;
}

cplx AsymptoticCoefficients::eta(int m) const {
    switch (m) {
        case 1: return eta1;
        case 2: return eta2;
        case 3: return eta3;
        default: throw DomainError("eta index must be 1..3");
    }
}

AsymptoticCoefficients asymptotic_coefficients() {
    const cplx sqrt_i = std::polar(1.0, 0.25 * kPi);
    return {1.0 / (std::sqrt(4.0 * kPi) * sqrt_i), -sqrt_i / std::sqrt(64.0 * kPi), -1.0 / (std::sqrt(4096.0 * kPi) * sqrt_i)};
}

cplx moshinsky_tail_coefficient(int j) {
    const cplx pre = -kI * std::polar(1.0, -0.25 * kPi) / (2.0 * std::sqrt(kPi));
    return pre * double_factorial(2 * j - 1) / std::pow(2.0 * kI, j);
}

cplx greens_outgoing(double r, double rp, cplx k, const ModelParams& params) {
    const double a = params.a, lam = params.lambda;
    check_pair(r, rp, a);
    if (r > rp) std::swap(r, rp);
    if (k == 0.0) return -r * (1.0 + lam * a - lam * rp) / (1.0 + lam * a);
    const cplx eika = std::exp(kI * k * a);
    const cplx rel = 1.0 + (lam / k) * std::sin(k * a) * eika;
    if (std::abs(rel) < 1e-13) throw PoleProximityError("greens_outgoing: k is at a pole");
    const cplx num = k * std::exp(kI * k * rp) - lam * std::sin(k * (rp - a)) * eika;
    const cplx den = k + lam * std::sin(k * a) * eika;
    return -(std::sin(k * r) / k) * num / den;
}

GreensDerivatives greens_derivatives_at_zero(double r, double rp, const ModelParams& params) {
    check_pair(r, rp, params.a);
    const HCoefficients h = h_coefficients(params);
    return {saddle_derivative(1, r, rp, h), saddle_derivative(2, r, rp, h), saddle_derivative(3, r, rp, h), h.h1, h.h2, h.h3, h.h4};
}

bool tail_active(const PoleTable& table, double t, const ExpansionOptions& opt) {
    if (!opt.complete_tail || t <= 0.0) return false;
    const double kn = std::abs(table.kappa(table.n() - 1));
    return kn * kn * t >= opt.tail_threshold;
}

cplx propagator_exact(const PoleTable& table, double r, double rp, double t, const ExpansionOptions& opt) {
    const double a = table.params().a;
    check_pair(r, rp, a);
    check_time(t);
    const bool tail = tail_active(table, t, opt);
    cplx g = 0.0;
    for (int i = 0; i < table.size(); ++i) {
        const cplx m = tail ? moshinsky_reduced(table.kappa(i), t, 4) : moshinsky(table.kappa(i), t);
        g += state_value(table.state(i), r, a) * state_value(table.state(i), rp, a) * m;
    }
    if (tail) {
        const auto eta = asymptotic_coefficients();
        const HCoefficients h = h_coefficients(table.params());
        for (int m = 1; m <= 3; ++m) g += eta.eta(m) * std::pow(t, -(2 * m + 1) / 2.0) * saddle_derivative(m, r, rp, h);
    }
    return g;
}

cplx split_integral_term(const PoleTable& table, double r, double rp, double t) {
    const double a = table.params().a;
    check_pair(r, rp, a);
    check_time(t);
    cplx I = 0.0;
    for (int i = 0; i < table.n(); ++i) {
        const ResonantState& s = table.state(i);
        if (!s.pole.proper()) throw RepresentationError("split form requires proper poles; pole " + std::to_string(s.pole.index) + " is not");
        const cplx u = state_value(s, r, a) * state_value(s, rp, a);
        const cplx m_neg = -moshinsky_split(s.pole.kappa, t).remainder;  // M(-z_p)
        const cplx m_mirror = moshinsky(table.kappa(table.mirror_index(i)), t);
        I -= u * m_neg - std::conj(u) * m_mirror;
    }
    return I;
}

cplx propagator_split(const PoleTable& table, double r, double rp, double t) {
    const double a = table.params().a;
    cplx g = split_integral_term(table, r, rp, t);
    for (int i = 0; i < table.n(); ++i) {
        const ResonantState& s = table.state(i);
        g += state_value(s, r, a) * state_value(s, rp, a) * std::exp(-kI * s.pole.energy() * t);
    }
    return g;
}

cplx propagator_asymptotic(const PoleTable& table, double r, double rp, double t, int m_max) {
    const double a = table.params().a;
    check_pair(r, rp, a);
    if (!(t > 0.0)) throw DomainError("asymptotic form needs t > 0");
    if (m_max < 1 || m_max > 3) throw DomainError("m_max must be 1, 2 or 3");
    cplx g = 0.0;
    for (int i = 0; i < table.n(); ++i) {
        const ResonantState& s = table.state(i);
        g += state_value(s, r, a) * state_value(s, rp, a) * std::exp(-kI * s.pole.energy() * t);
    }
    const auto eta = asymptotic_coefficients();
    const HCoefficients h = h_coefficients(table.params());
    for (int m = 1; m <= m_max; ++m) g += eta.eta(m) * std::pow(t, -(2 * m + 1) / 2.0) * saddle_derivative(m, r, rp, h);
    return g;
}

cplx free_propagator(double r, double rp, double t) {
    if (!(t > 0.0)) throw DomainError("free_propagator needs t > 0");
    const cplx pre = 1.0 / std::sqrt(4.0 * kPi * kI * t);
    const double dm = r - rp, dp = r + rp;
    return pre * (std::exp(kI * (dm * dm / (4.0 * t))) - std::exp(kI * (dp * dp / (4.0 * t))));
}

const char* form_name(Form f) {
    switch (f) {
        case Form::Exact: return "exact";
        case Form::Split: return "split";
        case Form::Asymptotic: return "asymptotic";
    }
    return "?";
}

std::array<cplx, 3> saddle_projection(int m, const BoxOverlaps& ov, const HCoefficients& h) {
    const double D = ov.D, G = ov.G, H = ov.H;
    const double h1 = h.h1;
    switch (m) {
        case 1: return {-kI * D / h1, 0.0, 0.0};
        case 2: return {kI * (h1 * G - h.h2 * D) / (h1 * h1), kI * D / h1, 0.0};
        case 3:
            return {-kI * (3.0 * h1 * h1 * H + h.h3 * G + h.h4 * D) / (3.0 * h1 * h1 * h1),
                    -kI * (10.0 * h1 * h1 * G + h.h3 * D) / (3.0 * h1 * h1 * h1), -kI * D / h1};
        default: throw DomainError("saddle order must be 1..3");
    }
}

EvolvedState evolve_coefficients(const PoleTable& table, const BoxOverlaps& ov, double t, Form form,
                                 const ExpansionOptions& opt, int m_max) {
    check_time(t);
    const int n = table.n();
    EvolvedState st;
    st.pole.assign(table.size(), 0.0);
    const auto eta = asymptotic_coefficients();
    const HCoefficients h = h_coefficients(table.params());
    auto add_saddle = [&](int upto) {
        for (int m = 1; m <= upto; ++m) {
            const cplx f = eta.eta(m) * std::pow(t, -(2 * m + 1) / 2.0);
            const auto q = saddle_projection(m, ov, h);
            for (int j = 0; j < 3; ++j) st.poly[j] += f * q[j];
        }
    };

    if (form == Form::Asymptotic) {
        if (!(t > 0.0)) throw DomainError("asymptotic form needs t > 0");
        if (m_max < 1 || m_max > 3) throw DomainError("m_max must be 1, 2 or 3");
        for (int i = 0; i < n; ++i) st.pole[i] = ov.C[i] * std::exp(-kI * table.kappa(i) * table.kappa(i) * t);
        add_saddle(m_max);
        return st;
    }

    const bool tail = tail_active(table, t, opt);
    for (int i = 0; i < table.size(); ++i) {
        cplx m;
        if (tail) {
            m = moshinsky_reduced(table.kappa(i), t, 4);
        } else if (form == Form::Split && i < n) {
            if (!table.state(i).pole.proper()) throw RepresentationError("split form requires proper poles");
            const MoshinskySplit sp = moshinsky_split(table.kappa(i), t);
            m = sp.exponential + sp.remainder;
        } else {
            m = moshinsky(table.kappa(i), t);
        }
        st.pole[i] = ov.C[i] * m;
    }
    if (tail) add_saddle(3);
    return st;
}

cplx evaluate(const PoleTable& table, const EvolvedState& st, double r) {
    const double a = table.params().a;
    cplx v = 0.0;
    for (int i = 0; i < table.size(); ++i)
        if (st.pole[i] != 0.0) v += st.pole[i] * state_value(table.state(i), r, a);
    const double r2 = r * r;
    return v + r * (st.poly[0] + r2 * (st.poly[1] + r2 * st.poly[2]));
}

cplx evolve_single(const PoleTable& table, int s, double r, double t, Form form, const ExpansionOptions& opt) {
    const double a = table.params().a;
    if (!(r >= 0.0 && r <= a)) throw DomainError("evolve_single: r outside [0, a]");
    return evaluate(table, evolve_coefficients(table, box_overlaps(table, s), t, form, opt), r);
}

cplx evolve_free(int s, double r, double t, double a) {
    check_time(t);
    if (!(r >= 0.0)) throw DomainError("evolve_free: r must be >= 0");
    if (t == 0.0) return r <= a ? box_state_value(s, r, a) : 0.0;
    const GaussRule& g = gauss_legendre(24);
    const double phase = (r + a) * (r + a) / (4.0 * t) + s * kPi;
    const int panels = std::clamp(static_cast<int>(std::ceil(phase / 2.0)), 4, 20000);
    const double hw = 0.5 * a / panels;
    cplx sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = (2 * k + 1) * hw;
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double y = mid + hw * g.x[j];
            sum += g.w[j] * hw * free_propagator(r, y, t) * box_state_value(s, y, a);
        }
    }
    return sum;
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.x[i] = x;
        rule.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace decay
