#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decay/two_particle.hpp"

namespace decay {

struct Observables {
    cplx amplitude;
    double S = 0.0;
    double P = 0.0;
};

// Survival and nonescape probabilities of a two-particle state, evaluated as
// contractions of the separable coefficient matrix K with the initial-state
// overlaps and the Gram matrix of the basis.
class DecayModel {
public:
    DecayModel(const PoleTable& table, const InitialStateSpec& spec);

    const PoleTable& table() const { return *table_; }
    const InitialStateSpec& spec() const { return spec_; }
    const SeparableBasis& basis() const { return basis_; }
    double tau1() const { return table_->tau1(); }

    SeparableState state(double t, Form form, const ExpansionOptions& opt = {}) const;
    Observables observe(const SeparableState& st) const;
    Observables observe(double t, Form form, const ExpansionOptions& opt = {}) const;

    cplx survival_amplitude(double t, Form form = Form::Exact, const ExpansionOptions& opt = {}) const;
    double survival_probability(double t, Form form = Form::Exact, const ExpansionOptions& opt = {}) const;
    double nonescape_probability(double t, Form form = Form::Exact, const ExpansionOptions& opt = {}) const;

    // Weight of K_ij in the survival amplitude: A = sum_ij K_ij weight_ij.
    const Eigen::MatrixXcd& amplitude_weights() const { return weights_; }

private:
    const PoleTable* table_;
    InitialStateSpec spec_;
    SeparableBasis basis_;
    Eigen::VectorXcd oa_, ob_;
    Eigen::MatrixXcd weights_;
};

// Factorized kind only: S and P from single-particle quantities, A = a1^2 and
// P = p1^2, with a1, p1 the single-particle survival amplitude and nonescape probability.
Observables factorized_product_observables(const DecayModel& model, double t, const ExpansionOptions& opt = {});

// Long-time survival amplitude split into its purely exponential, mixed and
// pure power parts (asymptotic form).
struct AmplitudeParts {
    cplx exponential, mixed, power;
};
AmplitudeParts asymptotic_parts(const DecayModel& model, double t);

// Earliest grid time beyond which the long-time wave function stays within
// `tol` (relative) of the tail-completed exact one at the point (r1, r2).
struct Crossover {
    bool found = false;
    double threshold_tau1 = 0.0;
    double worst = 0.0;  // largest relative deviation beyond the threshold
};
Crossover psi_crossover(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2,
                        const std::vector<double>& grid_over_tau1, double tol = 1e-2);

// Antisymmetric kind: fits Psi_exact t^5 / [(r1^3 r2 - r2^3 r1)(D_b G_a - G_b D_a) / (sqrt2 h1^2)]
// after removing the exponential and mixed parts, as c0 + c1 / t over the grid,
// and returns c0.
cplx fit_antisymmetric_coefficient(const PoleTable& table, const InitialStateSpec& spec, double r1, double r2,
                                   const std::vector<double>& grid_over_tau1);

enum class FormPolicy { Exact, Asymptotic, Auto };
const char* policy_name(FormPolicy p);
FormPolicy parse_policy(const std::string& s);

struct SeriesOptions {
    FormPolicy policy = FormPolicy::Auto;
    double switch_tau = 300.0;  // Auto: exact form up to this many tau1, asymptotic beyond
    ExpansionOptions expansion{true, 40.0};
};

struct DecayRow {
    double t = 0.0;
    double t_over_tau1 = 0.0;
    double S = 0.0, P = 0.0;
    Form form = Form::Exact;
};

struct DecaySeries {
    std::vector<DecayRow> rows;
    double tau1 = 0.0;
    int range_violations = 0;  // rows with S or P outside [-1e-12, 1 + 1e-9]

    std::vector<double> times() const;
    std::vector<double> S() const;
    std::vector<double> P() const;
};

// Log-spaced grid in units of tau1.
std::vector<double> log_grid(double lo, double hi, int points);

// Throws DataIntegrityError when P < S - 1e-12 on any row.
DecaySeries decay_series(const DecayModel& model, const std::vector<double>& times_over_tau1, const SeriesOptions& opt = {});

void write_series_csv(std::ostream& os, const DecaySeries& series);

enum class Axis { Semilog, Loglog };

struct SlopeFit {
    double t_lo = 0.0, t_hi = 0.0;
    Axis axis = Axis::Semilog;
    double slope = 0.0;
    double std_error = 0.0;
    int points = 0;
};

// Least-squares slope of ln y against t (semilog) or ln t (loglog) over
// points with t in [t_lo, t_hi].  Values below 1e-250 are dropped.
SlopeFit fit_slope(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi, Axis axis,
                   int min_points = 8);

// Regime windows.  At each time the survival amplitude of the long-time form
// is split into groups: each exponential pair (p, q), each mixed term p and
// the pure power term.  A window is a run of grid points with the same
// leading group, keeping points where that group has at least `share` of the
// summed group magnitudes and exceeds the runner-up by `ratio`.  The exact
// survival probability is then fitted inside each window.
struct RegimeOptions {
    double share = 0.4;
    double ratio = 2.0;
    int min_points = 8;
};

struct Regime {
    enum class Type { Pair, Mixed, Power } type = Type::Pair;
    int p = 0, q = 0;  // proper pole indices (q unused for Mixed)
    SlopeFit fit;
    double target = 0.0;  // expected slope (semilog: -(G_p + G_q) or -G_p, loglog: power)
    std::string label() const;
    double relative_error() const;
};

std::vector<Regime> detect_regimes(const DecayModel& model, const DecaySeries& series, const RegimeOptions& opt = {});

}  // namespace decay
