#include "decay/states_overlaps.hpp"

#include <cmath>
#include <numbers>

#include "decay/errors.hpp"

namespace decay {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(x a) / (2 x), continuous through x = 0
cplx half_sinc(cplx x, double a) {
    const cplx xa = x * a;
    if (std::abs(xa) < 1e-4) {
        const cplx x2 = xa * xa;
        return 0.5 * a * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
    }
    return std::sin(xa) / (2.0 * x);
}

void check_box(int s) {
    if (s < 1) throw DomainError("box quantum number must be >= 1");
}

}  // namespace

double box_state_value(int s, double y, double a) {
    check_box(s);
    if (!(y >= 0.0 && y <= a)) throw DomainError("box_state_value: y outside [0, a]");
    return std::sqrt(2.0 / a) * std::sin(s * kPi * y / a);
}

cplx sine_product_integral(cplx k1, cplx k2, double a) { return half_sinc(k1 - k2, a) - half_sinc(k1 + k2, a); }

cplx sine_power_integral(int n, cplx k, double a) {
    if (n < 0) throw DomainError("sine_power_integral: negative power");
    if (std::abs(k) * a < 1.0) {
        // sin(ky) = sum (-1)^j (ky)^(2j+1) / (2j+1)!
        cplx sum = 0.0, term = k;  // k^(2j+1)/(2j+1)! with sign
        double apow = std::pow(a, n + 2);
        for (int j = 0; j < 40; ++j) {
            sum += term * apow / static_cast<double>(n + 2 * j + 2);
            term *= -k * k / static_cast<double>((2 * j + 2) * (2 * j + 3));
            apow *= a * a;
        }
        return sum;
    }
    const cplx c = std::cos(k * a), s = std::sin(k * a);
    cplx I = (1.0 - c) / k;  // Int sin
    cplx J = s / k;          // Int cos
    double an = 1.0;
    for (int m = 1; m <= n; ++m) {
        an *= a;
        const cplx In = -an * c / k + (static_cast<double>(m) / k) * J;
        const cplx Jn = an * s / k - (static_cast<double>(m) / k) * I;
        I = In;
        J = Jn;
    }
    return I;
}

cplx overlap_C(const PoleTable& table, int i, int s) {
    check_box(s);
    const double a = table.params().a;
    return table.amplitude(i) * std::sqrt(2.0 / a) * sine_product_integral(table.kappa(i), s * kPi / a, a);
}

std::vector<cplx> overlap_C_all(const PoleTable& table, int s) {
    std::vector<cplx> c(table.size());
    for (int i = 0; i < table.size(); ++i) c[i] = overlap_C(table, i, s);
    return c;
}

double monomial_moment(int n, int s, double a) {
    check_box(s);
    if (n == 1) return moment_D(s, a);
    return std::sqrt(2.0 / a) * sine_power_integral(n, s * kPi / a, a).real();
}

double moment_D(int s, double a) {
    check_box(s);
    const double sign = (s % 2 == 1) ? 1.0 : -1.0;
    return std::sqrt(2.0 / a) * a * a * sign / (s * kPi);
}

double moment_G(int s, double a) { return monomial_moment(3, s, a); }
double moment_H(int s, double a) { return monomial_moment(5, s, a); }

cplx overlap_U(const PoleTable& table, int i, int j) {
    return table.amplitude(i) * table.amplitude(j) * sine_product_integral(table.kappa(i), table.kappa(j), table.params().a);
}

cplx resonant_power_overlap(const PoleTable& table, int i, int n) {
    return table.amplitude(i) * sine_power_integral(n, table.kappa(i), table.params().a);
}

cplx sum_rule_sum(const PoleTable& table, int s) {
    cplx sum = 0.0;
    for (int i = 0; i < table.n(); ++i) {
        const cplx c = overlap_C(table, i, s);
        sum += c * c;
    }
    return sum;
}

double sum_rule_defect(const PoleTable& table, int s) { return std::abs(sum_rule_sum(table, s).real() - 1.0); }

BoxOverlaps box_overlaps(const PoleTable& table, int s) {
    const double a = table.params().a;
    return {s, overlap_C_all(table, s), moment_D(s, a), moment_G(s, a), moment_H(s, a)};
}

}  // namespace decay
