#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ffr/root_find.hpp"
#include "ffr/units.hpp"

namespace ffr {

struct QuadratureNode {
    double x = 0.0;
    double w = 0.0;
};

/// Gauss-Legendre rule mapped to [0, 1], nodes by Newton iteration on P_n.
inline std::vector<QuadratureNode> gauss_legendre_unit(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
    std::vector<QuadratureNode> out(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1; p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = {0.5 * (1.0 - x), 0.5 * w};           // descending x -> ascending node
        out[n - 1 - i] = {0.5 * (1.0 + x), 0.5 * w};
    }
    return out;
}

struct QuadratureOptions {
    int radial_nodes = 64;    // Gauss-Legendre nodes for the pdf-weighted radial average
    int angular_nodes = 16;   // uniform nodes over one 60 degree symmetry sector
    double tail_rel_tol = 1e-9;
    int tail_max_depth = 12;
};

/// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double adaptive_integrate(F f, double a, double b, const QuadratureOptions& opts) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, opts.tail_max_depth, opts.tail_rel_tol, &err);
    if (!std::isfinite(v)) throw SolverError("adaptive_integrate: integral did not converge");
    return v;
}

} // namespace ffr
