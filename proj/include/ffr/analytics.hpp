#pragma once
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ffr/geometry.hpp"
#include "ffr/quadrature.hpp"
#include "ffr/root_find.hpp"

namespace ffr {

/// Scenario parameters. SINR quantities are stored linear; convert user-facing
/// dB values at the API boundary.
struct SystemParams {
    double alpha = 3.0;            // path loss exponent
    double target_sinr = 1.0;      // T
    double sinr_threshold = 1.0;   // S_th, splits centre/edge users
    double noise_over_power = 0.0; // sigma^2/P, 0 = interference limited
    NetworkLayout layout;
    double min_radius_m = 0.0;     // optional exclusion radius around the site

    void validate() const {
        if (!(alpha >= 2.0)) throw std::invalid_argument("SystemParams: alpha must be >= 2");
        if (!(target_sinr > 0.0)) throw std::invalid_argument("SystemParams: target_sinr must be > 0");
        if (!(sinr_threshold > 0.0))
            throw std::invalid_argument("SystemParams: sinr_threshold must be > 0");
        if (!(noise_over_power >= 0.0))
            throw std::invalid_argument("SystemParams: noise_over_power must be >= 0");
        if (!(layout.cell_radius > 0.0) || layout.fr1_interferers.empty())
            throw std::invalid_argument("SystemParams: layout not initialized");
        if (!(min_radius_m >= 0.0) || min_radius_m >= layout.cell_radius)
            throw std::invalid_argument("SystemParams: min_radius_m out of range");
    }
};

/// Radial law of a uniformly placed user in the cell disc, f(r) = 2r/R^2,
/// optionally truncated below r_min.
struct RadialPdf {
    double R = 1.0;
    double r_min = 0.0;

    double pdf(double r) const {
        if (r < r_min || r > R) return 0.0;
        const double smin = (r_min / R) * (r_min / R);
        return 2.0 * r / (R * R * (1.0 - smin));
    }
    /// Maps u ~ U(0,1) to r; the substitution also drives the quadrature grid.
    double sample(double u) const {
        const double smin = (r_min / R) * (r_min / R);
        return R * std::sqrt(smin + (1.0 - smin) * u);
    }
};

enum class SubbandCorrelation { independent, fully_correlated };

namespace detail {

/// Interference path gains relative to the serving link, a_j = (r/d_j)^alpha,
/// plus the exponent base for the noise term.
struct LinkGains {
    double r = 0.0;
    double noise_base = 0.0;  // r^alpha * sigma^2/P
    std::vector<double> psi;
    std::vector<double> phi;
};

inline LinkGains link_gains(const SystemParams& p, const UserPosition& user) {
    LinkGains g;
    g.r = user.r;
    g.noise_base = std::pow(user.r, p.alpha) * p.noise_over_power;
    const Vec2 pos = user.cartesian();
    g.psi.reserve(p.layout.fr1_interferers.size());
    for (const Vec2& s : p.layout.fr1_interferers)
        g.psi.push_back(std::pow(user.r / distance(pos, s), p.alpha));
    g.phi.reserve(p.layout.fr3_indices.size());
    for (std::size_t i : p.layout.fr3_indices) g.phi.push_back(g.psi[i]);
    return g;
}

/// log of prod_j 1/(1 + s a_j) * exp(-s * noise_base); stable for any s.
inline double log_cp(std::span<const double> a, double s, double noise_base) {
    double acc = -s * noise_base;
    for (double aj : a) acc -= std::log1p(s * aj);
    return acc;
}

inline double cp(std::span<const double> a, double s, double noise_base = 0.0) {
    return std::exp(log_cp(a, s, noise_base));
}

/// int_{ln(1+M)}^inf prod_j 1/(1+(e^t-1) a_j) dt, evaluated after u = e^-t
/// which maps the tail onto (0, 1/(1+M)] with a bounded integrand.
inline double tail_integral(std::span<const double> a, double M, const QuadratureOptions& opts) {
    if (a.size() < 2) throw std::invalid_argument("tail_integral: needs >= 2 interferers");
    for (double aj : a)
        if (!(aj > 0.0)) throw std::invalid_argument("tail_integral: requires r > 0");
    const double u0 = 1.0 / (1.0 + M);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        double prod = 1.0;
        for (double aj : a) prod *= u / (u + (1.0 - u) * aj);
        return prod / u;
    };
    return adaptive_integrate(integrand, 0.0, u0, opts);
}

/// int_0^inf prod_j 1/(1+max{e^t-1, M} a_j) dt under the interference-limited
/// assumption; the flat head contributes ln(1+M) * CP(M).
inline double rate_kernel(std::span<const double> a, double M, const QuadratureOptions& opts) {
    return std::log1p(M) * cp(a, M) + tail_integral(a, M, opts);
}

/// Edge-band rate factor: one third of the reuse-3 rate kernel. exact_target=0
/// gives the target-free approximation.
inline double k_kernel(std::span<const double> phi, double target, const QuadratureOptions& opts) {
    return rate_kernel(phi, target, opts) / 3.0;
}

/// Reuse-3 threshold with the same outage probability as threshold s on the
/// full-reuse band: solves log_cp(phi, x) = log_cp(psi, s) in log-x space.
inline double shat_from_gains(const LinkGains& g, double s) {
    if (!(s > 0.0)) return 0.0;
    const double target = log_cp(g.psi, s, g.noise_base);
    auto f = [&](double y) { return log_cp(g.phi, std::exp(y), g.noise_base) - target; };
    const double y0 = std::log(s);
    if (f(y0) == 0.0) return s;  // degenerate phi == psi layouts
    double hi = y0 + std::log(4.0);
    double lo = y0;
    try {
        double fl = f(lo);
        double fh = f(hi);
        while (fl * fh > 0.0) {
            if (hi > 700.0) throw SolverError("no sign change");
            lo = hi;
            fl = fh;
            hi += std::log(16.0);
            fh = f(hi);
        }
    } catch (const SolverError&) {
        throw SolverError("shat_threshold: could not bracket the matching threshold (s=" +
                          std::to_string(s) + ", r=" + std::to_string(g.r) + ")");
    }
    const RootResult res = brent(f, lo, hi, 1e-13);
    if (!res.converged)
        throw SolverError("shat_threshold: root iteration did not converge at r=" +
                          std::to_string(g.r));
    return std::exp(res.root);
}

/// Uniform theta nodes over one 60 degree symmetry sector.
inline std::vector<double> theta_nodes(int n) {
    std::vector<double> th(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) th[static_cast<std::size_t>(k)] = (k + 0.5) * (pi / 3.0) / n;
    return th;
}

/// Average of f(gains) over theta at fixed radius.
template <class F>
double theta_average(const SystemParams& p, double r, const QuadratureOptions& opts, F f) {
    const auto th = theta_nodes(opts.angular_nodes);
    double acc = 0.0;
    for (double t : th) acc += f(link_gains(p, UserPosition(r, t)));
    return acc / static_cast<double>(th.size());
}

/// Average of f(gains) over the cell: pdf-weighted Gauss-Legendre radius
/// (exact via the s = (r/R)^2 substitution) times the uniform theta rule.
template <class F>
double spatial_average(const SystemParams& p, const QuadratureOptions& opts, F f) {
    const auto s_nodes = gauss_legendre_unit(opts.radial_nodes);
    const RadialPdf pdf{p.layout.cell_radius, p.min_radius_m};
    double acc = 0.0;
    for (const auto& n : s_nodes)
        acc += n.w * theta_average(p, pdf.sample(n.x), opts, f);
    return acc;
}

inline double coverage_ffr_from_gains(const LinkGains& g, const SystemParams& p,
                                      SubbandCorrelation mode) {
    const double T = p.target_sinr, S = p.sinr_threshold;
    if (mode == SubbandCorrelation::independent) {
        const double centre = cp(g.psi, std::max(T, S), g.noise_base);
        const double cp3 = cp(g.phi, T, g.noise_base);
        return centre + cp3 - cp3 * cp(g.psi, S, g.noise_base);
    }
    // fully correlated: above the target the scheme collapses to reuse-3 coverage
    if (S >= T) return cp(g.phi, T, g.noise_base);
    const double shat = shat_from_gains(g, S);
    return cp(g.psi, T, g.noise_base) + cp(g.phi, T, g.noise_base) -
           cp(g.phi, std::max(shat, T), g.noise_base);
}

inline double coverage_ffr_edge_from_gains(const LinkGains& g, const SystemParams& p,
                                           SubbandCorrelation mode) {
    const double T = p.target_sinr, S = p.sinr_threshold;
    if (mode == SubbandCorrelation::independent) return cp(g.phi, T, g.noise_base);
    const double denom = 1.0 - cp(g.psi, S, g.noise_base);
    if (denom <= 0.0) return 0.0;
    const double shat = shat_from_gains(g, S);
    const double num =
        cp(g.phi, T, g.noise_base) - cp(g.phi, std::max(shat, T), g.noise_base);
    return std::max(0.0, num / denom);
}

} // namespace detail

// --- per-user coverage -------------------------------------------------------

/// P[SINR > T] on the full-reuse band at the given position.
inline double coverage_fr1(const SystemParams& p, const UserPosition& user) {
    p.validate();
    const auto g = detail::link_gains(p, user);
    return detail::cp(g.psi, p.target_sinr, g.noise_base);
}

/// P[SINR > T] on the reuse-3 band at the given position.
inline double coverage_fr3(const SystemParams& p, const UserPosition& user) {
    p.validate();
    const auto g = detail::link_gains(p, user);
    return detail::cp(g.phi, p.target_sinr, g.noise_base);
}

/// Coverage of a user already classified cell-centre: P[SINR > T | SINR > S_th].
inline double coverage_ffr_centre(const SystemParams& p, const UserPosition& user) {
    p.validate();
    if (p.sinr_threshold >= p.target_sinr) return 1.0;
    const auto g = detail::link_gains(p, user);
    return std::exp(detail::log_cp(g.psi, std::max(p.target_sinr, p.sinr_threshold), g.noise_base) -
                    detail::log_cp(g.psi, p.sinr_threshold, g.noise_base));
}

/// Coverage of a user already classified cell-edge.
inline double coverage_ffr_edge(const SystemParams& p, const UserPosition& user,
                                SubbandCorrelation mode) {
    p.validate();
    return detail::coverage_ffr_edge_from_gains(detail::link_gains(p, user), p, mode);
}

/// Overall coverage of a user of the hybrid-reuse scheme at the given position.
inline double coverage_ffr(const SystemParams& p, const UserPosition& user,
                           SubbandCorrelation mode) {
    p.validate();
    return detail::coverage_ffr_from_gains(detail::link_gains(p, user), p, mode);
}

/// Threshold on the reuse-3 band whose outage probability matches S_th on the
/// full-reuse band at this position. Always >= S_th.
inline double shat_threshold(const SystemParams& p, const UserPosition& user) {
    p.validate();
    return detail::shat_from_gains(detail::link_gains(p, user), p.sinr_threshold);
}

// --- theta-averaged radial curves --------------------------------------------

inline double coverage_fr1_radial(const SystemParams& p, double r,
                                  const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::theta_average(p, r, opts, [&](const detail::LinkGains& g) {
        return detail::cp(g.psi, p.target_sinr, g.noise_base);
    });
}

inline double coverage_fr3_radial(const SystemParams& p, double r,
                                  const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::theta_average(p, r, opts, [&](const detail::LinkGains& g) {
        return detail::cp(g.phi, p.target_sinr, g.noise_base);
    });
}

inline double coverage_ffr_centre_radial(const SystemParams& p, double r,
                                         const QuadratureOptions& opts = {}) {
    p.validate();
    if (p.sinr_threshold >= p.target_sinr) return 1.0;
    return detail::theta_average(p, r, opts, [&](const detail::LinkGains& g) {
        return std::exp(
            detail::log_cp(g.psi, std::max(p.target_sinr, p.sinr_threshold), g.noise_base) -
            detail::log_cp(g.psi, p.sinr_threshold, g.noise_base));
    });
}

inline double coverage_ffr_edge_radial(const SystemParams& p, double r, SubbandCorrelation mode,
                                       const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::theta_average(p, r, opts, [&](const detail::LinkGains& g) {
        return detail::coverage_ffr_edge_from_gains(g, p, mode);
    });
}

inline double coverage_ffr_radial(const SystemParams& p, double r, SubbandCorrelation mode,
                                  const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::theta_average(p, r, opts, [&](const detail::LinkGains& g) {
        return detail::coverage_ffr_from_gains(g, p, mode);
    });
}

// --- cell averages ------------------------------------------------------------

inline double coverage_fr1_avg(const SystemParams& p, const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::cp(g.psi, p.target_sinr, g.noise_base);
    });
}

inline double coverage_fr3_avg(const SystemParams& p, const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::cp(g.phi, p.target_sinr, g.noise_base);
    });
}

inline double coverage_ffr_avg(const SystemParams& p, SubbandCorrelation mode,
                               const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::coverage_ffr_from_gains(g, p, mode);
    });
}

/// Cell-wide conditional centre coverage, a ratio of spatial averages: the
/// estimand of a simulator that samples positions and conditions on S_th.
inline double coverage_ffr_centre_cond_avg(const SystemParams& p,
                                           const QuadratureOptions& opts = {}) {
    p.validate();
    const double num = detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::cp(g.psi, std::max(p.target_sinr, p.sinr_threshold), g.noise_base);
    });
    const double den = detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::cp(g.psi, p.sinr_threshold, g.noise_base);
    });
    return num / den;
}

// --- normalized average rates (interference limited) --------------------------

/// Cell-average of E[ln(1+SIR) | SIR > T] P[SIR > T] under full reuse.
inline double rate_fr1(const SystemParams& p, const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::rate_kernel(g.psi, p.target_sinr, opts);
    });
}

/// Same under reuse 3 (per-Hz of the reuse-3 band; no bandwidth penalty here).
inline double rate_fr3(const SystemParams& p, const QuadratureOptions& opts = {}) {
    p.validate();
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        return detail::rate_kernel(g.phi, p.target_sinr, opts);
    });
}

/// Hybrid-scheme normalized rate: centre term gated by max{T, S_th}, edge term
/// weighted by the outage share and the one-third edge bandwidth.
inline double rate_ffr(const SystemParams& p, SubbandCorrelation mode,
                       const QuadratureOptions& opts = {}) {
    p.validate();
    const double T = p.target_sinr, S = p.sinr_threshold, M = std::max(T, S);
    if (mode == SubbandCorrelation::independent) {
        return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
            return detail::rate_kernel(g.psi, M, opts) +
                   (1.0 - detail::cp(g.psi, S)) * detail::k_kernel(g.phi, T, opts);
        });
    }
    return detail::spatial_average(p, opts, [&](const detail::LinkGains& g) {
        detail::LinkGains sir = g;
        sir.noise_base = 0.0;  // classification threshold mapping is interference limited here
        const double shat = detail::shat_from_gains(sir, S);
        return detail::rate_kernel(g.psi, M, opts) + detail::k_kernel(g.phi, T, opts) -
               detail::k_kernel(g.phi, std::max(T, shat), opts);
    });
}

/// Edge-band rate factor at one position; exact=false replaces the coverage
/// gate max{e^t-1, T} by e^t-1 (the target-free approximation).
inline double k_factor(const SystemParams& p, const UserPosition& user, bool exact,
                       const QuadratureOptions& opts = {}) {
    p.validate();
    if (!(user.r > 0.0)) throw std::invalid_argument("k_factor: requires r > 0");
    const auto g = detail::link_gains(p, user);
    return detail::k_kernel(g.phi, exact ? p.target_sinr : 0.0, opts);
}

} // namespace ffr
