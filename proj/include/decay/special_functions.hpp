#pragma once

#include <complex>

namespace decay {

using cplx = std::complex<double>;

// w(z) = exp(-z^2) erfc(-iz).
//
// Upper half plane: |z| >= 30 uses the Laplace continued fraction, otherwise a
// shifted-node trapezoidal rule for (i/pi) Int exp(-t^2)/(z-t) dt with the pole
// correction term added when Im z < pi/h.  Lower half plane goes through
// w(z) = 2 exp(-z^2) - w(-z).
cplx faddeyeva(cplx z);

// exp(-z^2) with the real and imaginary parts of the exponent handled separately.
cplx exp_minus_square(cplx z);

struct MoshinskyArgument {
    cplx kappa;
    double t = 0.0;
    cplx z;
};

// z = -exp(-i pi/4) kappa sqrt(t)
MoshinskyArgument moshinsky_argument(cplx kappa, double t);

// M = w(iz)/2.
cplx moshinsky(cplx kappa, double t);

// M(z) = exponential + remainder, with exponential = exp(-i kappa^2 t) and
// remainder = -M(-z).  Both pieces are computed without forming their sum.
struct MoshinskySplit {
    cplx value;
    cplx exponential;
    cplx remainder;
};
MoshinskySplit moshinsky_split(cplx kappa, double t);

// M with the first `drop` terms of its large-argument series removed,
// M - (i/(2 sqrt(pi))) sum_{j<drop} (2j-1)!! / (2^j (iz)^{2j+1}).  For large
// |z| the remainder is summed directly from the series instead of by subtraction.
cplx moshinsky_reduced(cplx kappa, double t, int drop);

}  // namespace decay
