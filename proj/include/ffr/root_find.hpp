#pragma once
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace ffr {

/// Thrown when a root or quadrature routine cannot meet its contract.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RootResult {
    double root = 0.0;
    double f_root = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
template <class F>
RootResult brent(F f, double a, double b, double x_tol = 1e-12, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    if (fa * fb > 0.0)
        throw SolverError("brent: root not bracketed in [" + std::to_string(a) + ", " +
                          std::to_string(b) + "] (f=" + std::to_string(fa) + ", " +
                          std::to_string(fb) + ")");
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 1; iter <= max_iter; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * x_tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return {b, fb, iter, true};
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant step
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = b - a; e = d; }
    }
    return {b, fb, max_iter, false};
}

/// Expands [lo, hi] upward geometrically until f changes sign or hi exceeds cap.
template <class F>
std::pair<double, double> expand_bracket_up(F f, double lo, double hi, double cap,
                                            double grow = 4.0) {
    double flo = f(lo);
    if (flo == 0.0) return {lo, lo};
    double fhi = f(hi);
    while (flo * fhi > 0.0) {
        if (hi >= cap)
            throw SolverError("expand_bracket_up: no sign change below cap " + std::to_string(cap));
        lo = hi; flo = fhi;
        hi = std::min(hi * grow, cap);
        fhi = f(hi);
    }
    return {lo, hi};
}

} // namespace ffr
