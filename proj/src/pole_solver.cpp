#include "decay/pole_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "decay/errors.hpp"

namespace decay {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
constexpr int kMaxNewton = 100;

struct NewtonResult {
    cplx root;
    bool converged = false;
};

NewtonResult newton(cplx k, const ModelParams& params) {
    const double scale = std::max({1.0, params.lambda * params.a}) / params.a;
    for (int it = 0; it < kMaxNewton; ++it) {
        const cplx f = pole_residual(k, params);
        const cplx df = pole_residual_derivative(k, params);
        if (df == 0.0 || !std::isfinite(std::abs(df))) return {k, false};
        const cplx step = f / df;
        k -= step;
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) return {k, false};
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(k))) {
            // a couple of extra polishing steps are cheap
            for (int j = 0; j < 2; ++j) k -= pole_residual(k, params) / pole_residual_derivative(k, params);
            return {k, std::abs(pole_residual(k, params)) <= 1e-12 * scale * std::max(1.0, std::abs(k) * params.a)};
        }
    }
    return {k, false};
}

// The residual vanishes when exp(2 i k a) = 1 - 2 i k / lambda, i.e. on the
// fixed point of k = n pi / a + log(1 - 2 i k / lambda) / (2 i a).
cplx fixed_point_seed(int n, const ModelParams& params) {
    cplx k = n * kPi / params.a;
    for (int it = 0; it < 8; ++it)
        k = n * kPi / params.a + std::log(1.0 - 2.0 * kI * k / params.lambda) / (2.0 * kI * params.a);
    return k;
}

bool acceptable(cplx k, int n, const ModelParams& params, const std::vector<Pole>& found) {
    if (std::abs(k) * params.a < 1e-6) return false;  // the spurious root at kappa = 0
    if (!(k.imag() < 0.0) || !(k.real() > 0.0)) return false;
    // the n-th resonance sits between (n-1)pi/a and roughly n pi/a
    const double x = k.real() * params.a / kPi;
    if (!(x > n - 1.0 && x < n + 0.25)) return false;
    for (const auto& p : found)
        if (std::abs(p.kappa - k) < 1e-8) return false;
    return true;
}

std::string seed_text(cplx k) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << k.real() << ", " << k.imag() << ")";
    return os.str();
}

double arg_change(const ModelParams& params, cplx z0, cplx z1) {
    for (int m = 2048; m <= (1 << 22); m *= 2) {
        double total = 0.0;
        bool ok = true;
        cplx prev = pole_residual(z0, params);
        for (int j = 1; j <= m; ++j) {
            const cplx z = z0 + (z1 - z0) * (static_cast<double>(j) / m);
            const cplx cur = pole_residual(z, params);
            const double d = std::arg(cur / prev);
            if (std::abs(d) > kPi / 4.0) {
                ok = false;
                break;
            }
            total += d;
            prev = cur;
        }
        if (ok) return total;
    }
    throw SolverError("argument principle: phase could not be resolved along a rectangle edge");
}

}  // namespace

void ModelParams::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("a must be finite and > 0");
    if (n_poles < 1) throw DomainError("n_poles must be >= 1");
}

Pole mirror(const Pole& p) { return {-p.index, -std::conj(p.kappa)}; }

cplx pole_residual(cplx kappa, const ModelParams& params) {
    return 2.0 * kI * kappa + params.lambda * (std::exp(2.0 * kI * kappa * params.a) - 1.0);
}

cplx pole_residual_derivative(cplx kappa, const ModelParams& params) {
    return 2.0 * kI + 2.0 * kI * params.lambda * params.a * std::exp(2.0 * kI * kappa * params.a);
}

int count_zeros(const ModelParams& params, double re_lo, double re_hi, double im_lo, double im_hi) {
    const cplx c0{re_lo, im_lo}, c1{re_hi, im_lo}, c2{re_hi, im_hi}, c3{re_lo, im_hi};
    const double total = arg_change(params, c0, c1) + arg_change(params, c1, c2) +
                         arg_change(params, c2, c3) + arg_change(params, c3, c0);
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

std::vector<Pole> solve_poles(const ModelParams& params) {
    params.validate();
    if (params.lambda == 0.0) throw SolverError("no resonant poles for lambda = 0 (free motion)");

    std::vector<Pole> poles;
    for (int n = 1; n <= params.n_poles; ++n) {
        const cplx seed = cplx(n * kPi / params.a, -0.1 / params.a);
        NewtonResult r = newton(seed, params);
        if (!r.converged || !acceptable(r.root, n, params, poles)) {
            const cplx alt = fixed_point_seed(n, params);
            r = newton(alt, params);
            if (!r.converged) throw SolverError("Newton did not converge from seed " + seed_text(seed) + " or " + seed_text(alt));
            if (!acceptable(r.root, n, params, poles))
                throw SolverError("root from seed " + seed_text(alt) + " is spurious or duplicate: " + seed_text(r.root));
        }
        poles.push_back({n, r.root});
    }
    std::sort(poles.begin(), poles.end(), [](const Pole& x, const Pole& y) { return x.kappa.real() < y.kappa.real(); });
    for (std::size_t i = 0; i < poles.size(); ++i) {
        poles[i].index = static_cast<int>(i) + 1;
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(poles[i].kappa - poles[j].kappa) < 1e-8) throw SolverError("duplicate pole " + seed_text(poles[i].kappa));
    }

    double max_b = 0.0;
    for (const auto& p : poles) max_b = std::max(max_b, -p.kappa.imag());
    const double re_lo = 0.25 * kPi / params.a;
    const double re_hi = (params.n_poles + 0.5) * kPi / params.a;
    const int count = count_zeros(params, re_lo, re_hi, -(1.5 * max_b + 0.5 / params.a), 0.5 / params.a);
    if (count != params.n_poles)
        throw SolverError("argument principle counts " + std::to_string(count) + " zeros, expected " +
                          std::to_string(params.n_poles));
    return poles;
}

ResonantState normalize_state(const Pole& pole, const ModelParams& params) {
    const cplx k = pole.kappa;
    const double a = params.a;
    const cplx s = std::sin(k * a);
    const cplx den = a / 2.0 - std::sin(2.0 * k * a) / (4.0 * k) + kI * s * s / (2.0 * k);
    if (std::abs(den) < 1e-14 * a) throw DegenerateStateError("vanishing normalization for pole " + std::to_string(pole.index));
    cplx amp = std::sqrt(1.0 / den);
    if (amp.real() < 0.0 || (amp.real() == 0.0 && amp.imag() < 0.0)) amp = -amp;
    return {pole, amp};
}

cplx normalization_integral(const ResonantState& state, const ModelParams& params) {
    const cplx k = state.pole.kappa;
    const double a = params.a;
    const cplx a2 = state.amplitude * state.amplitude;
    const cplx s = std::sin(k * a);
    return a2 * (a / 2.0 - std::sin(2.0 * k * a) / (4.0 * k)) + kI * a2 * s * s / (2.0 * k);
}

cplx state_value(const ResonantState& state, double r, double a) {
    if (!(r >= 0.0 && r <= a)) throw DomainError("state_value: r outside [0, a]");
    return state.amplitude * std::sin(state.pole.kappa * r);
}

ResonantState mirror(const ResonantState& s) { return {mirror(s.pole), -std::conj(s.amplitude)}; }

PoleTable::PoleTable(const ModelParams& params) : PoleTable(params, solve_poles(params)) {}

PoleTable::PoleTable(const ModelParams& params, std::vector<Pole> poles) : params_(params) {
    params_.n_poles = static_cast<int>(poles.size());
    for (const auto& p : poles) states_.push_back(normalize_state(p, params_));
    build();
}

void PoleTable::build() {
    all_ = states_;
    for (const auto& s : states_) all_.push_back(mirror(s));
}

PoleTable PoleTable::with_flipped_branches(const std::vector<int>& proper_indices) const {
    PoleTable out = *this;
    for (int p : proper_indices) out.states_.at(p - 1).amplitude *= -1.0;
    out.build();
    return out;
}

void write_pole_table(std::ostream& os, const PoleTable& table) {
    os << "p,re_kappa,im_kappa,resonance_energy,width,lifetime,re_A,im_A\n";
    char buf[512];
    for (const auto& s : table.states()) {
        const Pole& p = s.pole;
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.index, p.kappa.real(),
                      p.kappa.imag(), p.resonance_energy(), p.width(), p.lifetime(), s.amplitude.real(),
                      s.amplitude.imag());
        os << buf;
    }
}

}  // namespace decay
