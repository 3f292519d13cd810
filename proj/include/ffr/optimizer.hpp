#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ffr/analytics.hpp"
#include "ffr/root_find.hpp"
#include "ffr/units.hpp"

namespace ffr {

struct ThresholdSolution {
    double s_opt = 1.0;     // linear
    double s_opt_db = 0.0;
    double objective_value = 0.0;  // coverage probability or rate at s_opt
    enum class Method { closed_form, kkt_root, grid_refine } method = Method::closed_form;
    double residual = 0.0;
    bool set_valued = false;  // the whole set {S_th >= T} is optimal
};

/// Stationarity residual of the hybrid-scheme rate with respect to the
/// classification threshold, in the S_th >= T regime. Positive below the
/// optimum, negative above. exact_k gates the edge factor at s itself instead
/// of using the target-free approximation.
inline double kkt_residual(const SystemParams& p, double s_lin, const QuadratureOptions& opts = {},
                           bool exact_k = false) {
    p.validate();
    if (!(s_lin > 0.0)) throw std::invalid_argument("kkt_residual: threshold must be > 0");
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        const double k = detail::k_kernel(g.phi, exact_k ? s_lin : 0.0, opts);
        double deriv = 0.0;
        for (double aj : g.psi) deriv += aj / (1.0 + s_lin * aj);
        return (k - std::log1p(s_lin)) * detail::cp(g.psi, s_lin) * deriv;
    });
}

/// Solves the stationarity equation for the rate-optimal threshold constant.
/// Brackets around the target and widens up to [-20, +20] dB before failing.
inline ThresholdSolution solve_tprime(const SystemParams& p, const QuadratureOptions& opts = {},
                                      bool exact_k = false) {
    p.validate();
    auto f = [&](double s_db) { return kkt_residual(p, db_to_linear(s_db), opts, exact_k); };
    const double t_db = linear_to_db(p.target_sinr);
    double half = 10.0;
    double lo = std::clamp(t_db - half, -20.0, 20.0);
    double hi = std::clamp(t_db + half, -20.0, 20.0);
    double flo = f(lo), fhi = f(hi);
    while (flo * fhi > 0.0 && (lo > -20.0 || hi < 20.0)) {
        half *= 2.0;
        lo = std::clamp(t_db - half, -20.0, 20.0);
        hi = std::clamp(t_db + half, -20.0, 20.0);
        flo = f(lo);
        fhi = f(hi);
    }
    if (flo * fhi > 0.0)
        throw SolverError("solve_tprime: no sign change in [-20, 20] dB (residuals " +
                          std::to_string(flo) + ", " + std::to_string(fhi) + ")");
    const RootResult res = brent(f, lo, hi, 1e-4);  // well under the 0.01 dB contract
    if (!res.converged) throw SolverError("solve_tprime: root iteration did not converge");
    ThresholdSolution sol;
    sol.s_opt = db_to_linear(res.root);
    sol.s_opt_db = res.root;
    sol.method = ThresholdSolution::Method::kkt_root;
    sol.residual = std::abs(res.f_root);
    SystemParams at = p;
    at.sinr_threshold = std::max(p.target_sinr, sol.s_opt);
    sol.objective_value = rate_ffr(at, SubbandCorrelation::independent, opts);
    return sol;
}

/// Fraction of users whose full-reuse SIR clears the threshold.
inline double centre_user_fraction(const SystemParams& p, double s_lin,
                                   const QuadratureOptions& opts = {}) {
    p.validate();
    if (!(s_lin > 0.0)) throw std::invalid_argument("centre_user_fraction: threshold must be > 0");
    return detail::spatial_average(
        p, opts, [&](const detail::LinkGains& g) { return detail::cp(g.psi, s_lin); });
}

/// Coverage-optimal classification threshold. Independent sub-band fading has
/// the unique optimum S_th = T; fully correlated fading is optimal on the whole
/// set {S_th >= T}, reported as its smallest element.
inline ThresholdSolution optimal_coverage_threshold(const SystemParams& p, SubbandCorrelation mode,
                                                    const QuadratureOptions& opts = {}) {
    p.validate();
    ThresholdSolution sol;
    sol.s_opt = p.target_sinr;
    sol.s_opt_db = linear_to_db(sol.s_opt);
    sol.method = ThresholdSolution::Method::closed_form;
    if (mode == SubbandCorrelation::independent) {
        SystemParams at = p;
        at.sinr_threshold = p.target_sinr;
        sol.objective_value = coverage_ffr_avg(at, mode, opts);
    } else {
        sol.set_valued = true;
        sol.objective_value = coverage_fr3_avg(p, opts);
    }
    return sol;
}

namespace detail {

/// Golden-section maximization on [lo, hi].
template <class F>
double golden_max(F f, double lo, double hi, double x_tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Locates the rate maximizer of the fully correlated scheme on a 0.1 dB grid
/// plus golden-section refinement, probing at a target low enough that the
/// constraint S_th >= T is inactive.
inline double solve_tdoubleprime_db(const SystemParams& p, const QuadratureOptions& opts) {
    SystemParams probe = p;
    probe.target_sinr = std::min(p.target_sinr, db_to_linear(-10.0));
    const double lo_db = linear_to_db(probe.target_sinr);
    auto rate_at = [&](double s_db) {
        SystemParams at = probe;
        at.sinr_threshold = db_to_linear(s_db);
        return rate_ffr(at, SubbandCorrelation::fully_correlated, opts);
    };
    double best_db = lo_db, best = -1.0;
    for (double s = lo_db; s <= 10.0 + 1e-9; s += 0.1) {
        const double v = rate_at(s);
        if (v > best) { best = v; best_db = s; }
    }
    return golden_max(rate_at, best_db - 0.1, best_db + 0.1, 5e-3);
}

} // namespace detail

/// Fully-correlated analogue of solve_tprime, located numerically.
inline ThresholdSolution solve_tdoubleprime(const SystemParams& p,
                                            const QuadratureOptions& opts = {}) {
    p.validate();
    ThresholdSolution sol;
    sol.s_opt_db = detail::solve_tdoubleprime_db(p, opts);
    sol.s_opt = db_to_linear(sol.s_opt_db);
    sol.method = ThresholdSolution::Method::grid_refine;
    SystemParams at = p;
    at.sinr_threshold = std::max(p.target_sinr, sol.s_opt);
    sol.objective_value = rate_ffr(at, SubbandCorrelation::fully_correlated, opts);
    return sol;
}

/// Rate-optimal classification threshold, max(T, T') / max(T, T'') per regime.
inline ThresholdSolution optimal_rate_threshold(const SystemParams& p, SubbandCorrelation mode,
                                                const QuadratureOptions& opts = {}) {
    p.validate();
    ThresholdSolution sol;
    if (mode == SubbandCorrelation::independent) {
        const ThresholdSolution tp = solve_tprime(p, opts);
        sol.s_opt = std::max(p.target_sinr, tp.s_opt);
        sol.method = ThresholdSolution::Method::kkt_root;
        sol.residual = tp.residual;
    } else {
        const double tpp_db = detail::solve_tdoubleprime_db(p, opts);
        sol.s_opt = std::max(p.target_sinr, db_to_linear(tpp_db));
        sol.method = ThresholdSolution::Method::grid_refine;
    }
    sol.s_opt_db = linear_to_db(sol.s_opt);
    SystemParams at = p;
    at.sinr_threshold = sol.s_opt;
    sol.objective_value = rate_ffr(at, mode, opts);
    return sol;
}

} // namespace ffr
