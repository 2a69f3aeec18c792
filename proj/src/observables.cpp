#include "decay/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "decay/errors.hpp"

namespace decay {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

DecayModel::DecayModel(const PoleTable& table, const InitialStateSpec& spec)
    : table_(&table), spec_(spec), basis_(table) {
    spec_.validate();
    oa_ = basis_.box_overlap(spec_.alpha);
    if (spec_.factorized()) {
        ob_ = oa_;
        weights_ = oa_ * oa_.transpose();
    } else {
        ob_ = basis_.box_overlap(spec_.beta);
        weights_ = (oa_ * ob_.transpose() + static_cast<double>(spec_.parity()) * ob_ * oa_.transpose()) * kInvSqrt2;
    }
}

SeparableState DecayModel::state(double t, Form form, const ExpansionOptions& opt) const {
    return separable_state(basis_, spec_, t, form, opt);
}

Observables DecayModel::observe(const SeparableState& st) const {
    Observables o;
    o.amplitude = (st.K.cwiseProduct(weights_)).sum();
    o.S = std::norm(o.amplitude);
    const Eigen::MatrixXcd& W = basis_.gram();
    o.P = (W.cwiseProduct(st.K * W * st.K.adjoint())).sum().real();
    return o;
}

Observables DecayModel::observe(double t, Form form, const ExpansionOptions& opt) const { return observe(state(t, form, opt)); }

cplx DecayModel::survival_amplitude(double t, Form form, const ExpansionOptions& opt) const { return observe(t, form, opt).amplitude; }
double DecayModel::survival_probability(double t, Form form, const ExpansionOptions& opt) const { return observe(t, form, opt).S; }
double DecayModel::nonescape_probability(double t, Form form, const ExpansionOptions& opt) const { return observe(t, form, opt).P; }

Observables factorized_product_observables(const DecayModel& model, double t, const ExpansionOptions& opt) {
    if (!model.spec().factorized()) throw InvalidSpecError("product evaluation needs the factorized kind");
    const PoleTable& table = model.table();
    const SeparableBasis& basis = model.basis();
    const Eigen::VectorXcd c = single_particle_vector(basis, evolve_coefficients(table, box_overlaps(table, model.spec().alpha), t, Form::Exact, opt));
    const Eigen::VectorXcd o = basis.box_overlap(model.spec().alpha);
    const cplx a1 = o.cwiseProduct(c).sum();
    const double p1 = (c.transpose() * basis.gram() * c.conjugate()).value().real();
    Observables out;
    out.amplitude = a1 * a1;
    out.S = std::norm(out.amplitude);
    out.P = p1 * p1;
    return out;
}

AmplitudeParts asymptotic_parts(const DecayModel& model, double t) {
    const SeparableState st = model.state(t, Form::Asymptotic);
    const Eigen::MatrixXcd A = st.K.cwiseProduct(model.amplitude_weights());
    const int np = model.basis().poles();
    const int m = model.basis().dim() - np;
    AmplitudeParts parts;
    parts.exponential = A.topLeftCorner(np, np).sum();
    parts.mixed = A.topRightCorner(np, m).sum() + A.bottomLeftCorner(m, np).sum();
    parts.power = A.bottomRightCorner(m, m).sum();
    return parts;
}

const char* policy_name(FormPolicy p) {
    switch (p) {
        case FormPolicy::Exact: return "exact";
        case FormPolicy::Asymptotic: return "asymptotic";
        case FormPolicy::Auto: return "auto";
    }
    return "?";
}

FormPolicy parse_policy(const std::string& s) {
    if (s == "exact") return FormPolicy::Exact;
    if (s == "asymptotic") return FormPolicy::Asymptotic;
    if (s == "auto") return FormPolicy::Auto;
    throw ConfigError("unknown form policy '" + s + "' (expected exact, asymptotic or auto)");
}

std::vector<double> DecaySeries::times() const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.t);
    return v;
}
std::vector<double> DecaySeries::S() const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.S);
    return v;
}
std::vector<double> DecaySeries::P() const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.P);
    return v;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("log_grid needs 0 < lo < hi and at least 2 points");
    std::vector<double> g(points);
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < points; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
    return g;
}

DecaySeries decay_series(const DecayModel& model, const std::vector<double>& grid, const SeriesOptions& opt) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    DecaySeries out;
    out.tau1 = model.tau1();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        DecayRow row;
        row.t_over_tau1 = grid[i];
        row.t = grid[i] * out.tau1;
        switch (opt.policy) {
            case FormPolicy::Exact: row.form = Form::Exact; break;
            case FormPolicy::Asymptotic: row.form = Form::Asymptotic; break;
            case FormPolicy::Auto: row.form = grid[i] <= opt.switch_tau ? Form::Exact : Form::Asymptotic; break;
        }
        const Observables o = model.observe(row.t, row.form, opt.expansion);
        row.S = o.S;
        row.P = o.P;
        if (!(row.P >= row.S - 1e-12)) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "P < S at row %zu (t/tau1 = %.6g): P = %.17g, S = %.17g", i, row.t_over_tau1, row.P, row.S);
            throw DataIntegrityError(buf);
        }
        if (row.S < -1e-12 || row.S > 1.0 + 1e-9 || row.P < -1e-12 || row.P > 1.0 + 1e-9) ++out.range_violations;
        out.rows.push_back(row);
    }
    return out;
}

void write_series_csv(std::ostream& os, const DecaySeries& series) {
    os << "t_abs,t_over_tau1,S,lnS,P,lnP,form\n";
    char buf[512];
    for (const auto& r : series.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.t, r.t_over_tau1, r.S, std::log(r.S), r.P,
                      std::log(r.P), form_name(r.form));
        os << buf;
    }
}

SlopeFit fit_slope(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi, Axis axis, int min_points) {
    if (t.size() != y.size()) throw FitError("fit_slope: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (!(y[i] > 0.0)) throw FitError("fit_slope: nonpositive value in window");
        if (y[i] < 1e-250) continue;
        xs.push_back(axis == Axis::Semilog ? t[i] : std::log(t[i]));
        ys.push_back(std::log(y[i]));
    }
    const int n = static_cast<int>(xs.size());
    if (n < std::max(min_points, 3)) throw FitError("fit_slope: " + std::to_string(n) + " points in window, need " + std::to_string(min_points));
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("fit_slope: degenerate abscissae");
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (icpt + slope * xs[i]);
        ss += r * r;
    }
    SlopeFit f;
    f.t_lo = t_lo;
    f.t_hi = t_hi;
    f.axis = axis;
    f.slope = slope;
    f.std_error = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    f.points = n;
    return f;
}

std::string Regime::label() const {
    switch (type) {
        case Type::Pair: return "exp(" + std::to_string(p) + "," + std::to_string(q) + ")";
        case Type::Mixed: return "mixed(" + std::to_string(p) + ")";
        case Type::Power: return "power";
    }
    return "?";
}

double Regime::relative_error() const { return std::abs(fit.slope - target) / std::abs(target); }

std::vector<Regime> detect_regimes(const DecayModel& model, const DecaySeries& series, const RegimeOptions& opt) {
    const PoleTable& table = model.table();
    const int n = table.n();
    const int np = model.basis().poles();
    const int dim = model.basis().dim();
    // group ids: pairs p <= q -> p*n + q, mixed p -> n*n + p, power -> n*n + n
    const int n_groups = n * n + n + 1;
    const int power_id = n * n + n;

    std::vector<int> leader(series.rows.size(), -1);
    std::vector<char> clear(series.rows.size(), 0);
    for (std::size_t r = 0; r < series.rows.size(); ++r) {
        const double t = series.rows[r].t;
        const Eigen::MatrixXcd A = model.state(t, Form::Asymptotic).K.cwiseProduct(model.amplitude_weights());
        std::vector<cplx> g(n_groups, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[std::min(i, j) * n + std::max(i, j)] += A(i, j);
        for (int i = 0; i < n; ++i)
            for (int j = np; j < dim; ++j) g[n * n + i] += A(i, j) + A(j, i);
        for (int i = np; i < dim; ++i)
            for (int j = np; j < dim; ++j) g[power_id] += A(i, j);
        double total = 0.0;
        int best = 0, second = -1;
        for (int k = 0; k < n_groups; ++k) {
            total += std::abs(g[k]);
            if (std::abs(g[k]) > std::abs(g[best])) best = k;
        }
        for (int k = 0; k < n_groups; ++k)
            if (k != best && (second < 0 || std::abs(g[k]) > std::abs(g[second]))) second = k;
        leader[r] = best;
        const double lead = std::abs(g[best]);
        clear[r] = total > 0.0 && lead >= opt.share * total && lead >= opt.ratio * std::abs(g[second]);
    }

    const auto t_all = series.times();
    const auto S_all = series.S();
    std::vector<Regime> out;
    std::size_t i = 0;
    while (i < series.rows.size()) {
        std::size_t j = i;
        while (j < series.rows.size() && leader[j] == leader[i]) ++j;
        std::vector<double> ts, ys;
        const int id = leader[i];
        Regime reg;
        if (id == power_id) {
            reg.type = Regime::Type::Power;
        } else if (id >= n * n) {
            reg.type = Regime::Type::Mixed;
            reg.p = id - n * n + 1;
        } else {
            reg.type = Regime::Type::Pair;
            reg.p = id / n + 1;
            reg.q = id % n + 1;
        }
        for (std::size_t k = i; k < j; ++k) {
            if (!clear[k]) continue;
            ts.push_back(t_all[k]);
            double y = S_all[k];
            if (reg.type == Regime::Type::Mixed) y *= std::pow(t_all[k], 3);  // strip the t^-3 prefactor of |mixed|^2
            ys.push_back(y);
        }
        if (static_cast<int>(ts.size()) >= opt.min_points && std::all_of(ys.begin(), ys.end(), [](double v) { return v > 0.0; })) {
            const Axis axis = reg.type == Regime::Type::Power ? Axis::Loglog : Axis::Semilog;
            reg.fit = fit_slope(ts, ys, ts.front(), ts.back(), axis, opt.min_points);
            switch (reg.type) {
                case Regime::Type::Pair:
                    reg.target = -(table.proper(reg.p).pole.width() + table.proper(reg.q).pole.width());
                    break;
                case Regime::Type::Mixed: reg.target = -table.proper(reg.p).pole.width(); break;
                case Regime::Type::Power: reg.target = model.spec().kind == Kind::EntangledAntisymmetric ? -10.0 : -6.0; break;
            }
            out.push_back(reg);
        }
        i = j;
    }
    return out;
}

Crossover psi_crossover(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2,
                        const std::vector<double>& grid_over_tau1, double tol) {
    const ExpansionOptions opt{true, 40.0};
    Crossover c;
    for (auto it = grid_over_tau1.rbegin(); it != grid_over_tau1.rend(); ++it) {
        const double t = *it * table.tau1();
        const cplx ex = psi_exact(table, spec, r1, r2, t, opt);
        const double rel = std::abs(psi_asymptotic(table, spec, r1, r2, t) - ex) / std::abs(ex);
        if (!(rel <= tol)) break;
        c.found = true;
        c.threshold_tau1 = *it;
        c.worst = std::max(c.worst, rel);
    }
    // a threshold at the last grid point says nothing about later times
    if (c.found && c.threshold_tau1 == grid_over_tau1.back()) c.found = false;
    return c;
}

cplx fit_antisymmetric_coefficient(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2,
                                   const std::vector<double>& grid_over_tau1) {
    if (spec.kind != Kind::EntangledAntisymmetric) throw InvalidSpecError("coefficient fit needs the antisymmetric kind");
    if (grid_over_tau1.size() < 3) throw FitError("coefficient fit needs at least 3 times");
    const double a = table.params().a;
    const double h1 = h_coefficients(table.params()).h1;
    const double geom = (r1 * r1 * r1 * r2 - r2 * r2 * r2 * r1) *
                        (moment_D(spec.beta, a) * moment_G(spec.alpha, a) - moment_G(spec.beta, a) * moment_D(spec.alpha, a)) /
                        (std::numbers::sqrt2 * h1 * h1);
    if (geom == 0.0) throw FitError("coefficient fit: the power term vanishes at this point");
    // least squares for y = c0 + c1 x with x = tau1 / t
    double sx = 0, sxx = 0;
    cplx sy = 0, sxy = 0;
    const double n = static_cast<double>(grid_over_tau1.size());
    for (double g : grid_over_tau1) {
        const double t = g * table.tau1();
        const cplx y = psi_exact(table, spec, r1, r2, t, {true, 40.0}) * std::pow(t, 5) / geom;
        const double x = 1.0 / g;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    return (sxx * sy - sx * sxy) / det;
}

}  // namespace decay
