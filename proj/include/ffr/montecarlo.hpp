#pragma once
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ffr/analytics.hpp"
#include "ffr/fading.hpp"
#include "ffr/geometry.hpp"
#include "ffr/rng.hpp"

namespace ffr {

/// A simulation run is identified by (params, mode, seed, n_samples, n_streams);
/// worker/thread count never changes its output.
struct SimConfig {
    std::uint64_t n_samples = 1000000;
    std::uint64_t seed = 42;
    unsigned n_streams = 64;
    CorrelationMode mode = CorrelationMode::independent();
    SystemParams params;
    std::optional<double> fixed_r;      // pin the user radius (curves, conditional oracles)
    std::optional<double> fixed_theta;  // pin the user azimuth

    void validate() const {
        params.validate();
        if (n_samples < 1) throw std::invalid_argument("SimConfig: n_samples must be >= 1");
        if (n_streams < 1) throw std::invalid_argument("SimConfig: n_streams must be >= 1");
        if (fixed_r && !(*fixed_r >= 0.0 && *fixed_r <= params.layout.cell_radius))
            throw std::invalid_argument("SimConfig: fixed_r outside the cell");
    }
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

enum class CoverageQuantity { fr1, fr3, ffr };
enum class RateScheme { fr1, fr3, ffr };

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FFR_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace detail {

/// Per-stream scratch: one fading sampler plus reusable buffers.
struct McWorkspace {
    explicit McWorkspace(const SimConfig& cfg)
        : sampler(cfg.mode), params(&cfg.params), pdf{cfg.params.layout.cell_radius,
                                                      cfg.params.min_radius_m} {
        dist.resize(cfg.params.layout.fr1_interferers.size());
    }

    FadingSampler sampler;
    const SystemParams* params;
    RadialPdf pdf;
    PowerDraw draw;
    std::vector<double> dist;

    UserPosition user;
    double eta = 0.0;      // full-reuse-band SINR of the current sample
    double eta_hat = 0.0;  // reuse-3-band SINR of the current sample

    void next_sample(const SimConfig& cfg, RandomStream& rng) {
        const double r = cfg.fixed_r ? *cfg.fixed_r : pdf.sample(rng.uniform());
        const double theta = cfg.fixed_theta ? *cfg.fixed_theta : 2.0 * pi * rng.uniform();
        user = UserPosition(r, theta);
        const Vec2 pos = user.cartesian();
        const auto& sites = params->layout.fr1_interferers;
        for (std::size_t i = 0; i < sites.size(); ++i) dist[i] = distance(pos, sites[i]);
        sampler.draw(rng, sites.size(), draw);

        const double alpha = params->alpha;
        const double sig = r > 0.0 ? std::pow(r, -alpha) : 0.0;
        double interf = params->noise_over_power;
        for (std::size_t i = 0; i < dist.size(); ++i)
            interf += draw.h[i] * std::pow(dist[i], -alpha);
        eta = r > 0.0 ? draw.g * sig / interf : std::numeric_limits<double>::infinity();

        double interf_hat = params->noise_over_power;
        for (std::size_t i : params->layout.fr3_indices)
            interf_hat += draw.h_hat[i] * std::pow(dist[i], -alpha);
        eta_hat = r > 0.0 ? draw.g_hat * sig / interf_hat
                          : std::numeric_limits<double>::infinity();
    }

    /// Reuse-3 SINR with the centre-band powers (marginal law of a pure FR3 user).
    double fr3_sinr() const {
        const double alpha = params->alpha;
        double interf = params->noise_over_power;
        for (std::size_t i : params->layout.fr3_indices)
            interf += draw.h[i] * std::pow(dist[i], -alpha);
        return user.r > 0.0 ? draw.g * std::pow(user.r, -alpha) / interf
                            : std::numeric_limits<double>::infinity();
    }
};

struct StreamSums {
    double sum = 0.0;
    double sum_sq = 0.0;
    double sum_b = 0.0;  // secondary accumulator for ratio estimators
};

/// Runs per_sample over n_streams fixed substreams and reduces them in stream
/// order, so results are byte-identical for any worker count.
template <class PerSample>
std::vector<StreamSums> run_streams(const SimConfig& cfg, unsigned threads, PerSample per_sample) {
    cfg.validate();
    const unsigned ns = cfg.n_streams;
    const std::uint64_t base = cfg.n_samples / ns;
    const std::uint64_t rem = cfg.n_samples % ns;
    std::vector<StreamSums> sums(ns);
    auto run_one = [&](unsigned s) {
        RandomStream rng(cfg.seed, s);
        McWorkspace ws(cfg);
        const std::uint64_t quota = base + (s < rem ? 1 : 0);
        StreamSums acc;
        for (std::uint64_t i = 0; i < quota; ++i) per_sample(rng, ws, acc);
        sums[s] = acc;
    };
    const unsigned workers = std::min(resolve_threads(threads), ns);
    if (workers <= 1) {
        for (unsigned s = 0; s < ns; ++s) run_one(s);
    } else {
        std::atomic<unsigned> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (unsigned s = next.fetch_add(1); s < ns; s = next.fetch_add(1)) run_one(s);
            });
        for (auto& t : pool) t.join();
    }
    return sums;
}

inline Estimate reduce_mean(const std::vector<StreamSums>& sums, std::uint64_t n) {
    double total = 0.0, total_sq = 0.0;
    for (const StreamSums& s : sums) {
        total += s.sum;
        total_sq += s.sum_sq;
    }
    Estimate e;
    e.n_samples = n;
    e.value = total / static_cast<double>(n);
    if (n > 1) {
        const double var =
            std::max(0.0, (total_sq - static_cast<double>(n) * e.value * e.value) /
                              static_cast<double>(n - 1));
        e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

template <class PerSample>
Estimate estimate_mean(const SimConfig& cfg, unsigned threads, PerSample value_of) {
    auto sums = run_streams(cfg, threads,
                            [&](RandomStream& rng, McWorkspace& ws, StreamSums& acc) {
                                ws.next_sample(cfg, rng);
                                const double v = value_of(ws);
                                acc.sum += v;
                                acc.sum_sq += v * v;
                            });
    return reduce_mean(sums, cfg.n_samples);
}

} // namespace detail

/// Coverage probability estimate by direct simulation. For the hybrid scheme a
/// sample classifies on the centre band and, when pushed to the edge band,
/// succeeds on its re-drawn (per the mode) reuse-3 SINR.
inline Estimate simulate_coverage(const SimConfig& cfg, CoverageQuantity quantity,
                                  unsigned threads = 0) {
    const double T = cfg.params.target_sinr;
    const double S = cfg.params.sinr_threshold;
    switch (quantity) {
    case CoverageQuantity::fr1:
        return detail::estimate_mean(
            cfg, threads, [T](const detail::McWorkspace& ws) { return ws.eta > T ? 1.0 : 0.0; });
    case CoverageQuantity::fr3:
        return detail::estimate_mean(cfg, threads, [T](const detail::McWorkspace& ws) {
            return ws.fr3_sinr() > T ? 1.0 : 0.0;
        });
    case CoverageQuantity::ffr:
    default:
        return detail::estimate_mean(cfg, threads, [T, S](const detail::McWorkspace& ws) {
            if (ws.eta >= S) return ws.eta > T ? 1.0 : 0.0;
            return ws.eta_hat > T ? 1.0 : 0.0;
        });
    }
}

/// Conditional coverage of classified cell-centre users, P[eta > T | eta >= S_th],
/// with a delta-method standard error for the ratio of indicator means.
inline Estimate simulate_ffr_centre_coverage(const SimConfig& cfg, unsigned threads = 0) {
    const double T = cfg.params.target_sinr;
    const double S = cfg.params.sinr_threshold;
    auto sums = detail::run_streams(
        cfg, threads, [&](RandomStream& rng, detail::McWorkspace& ws, detail::StreamSums& acc) {
            ws.next_sample(cfg, rng);
            const bool in = ws.eta >= S;
            acc.sum += (in && ws.eta > std::max(T, S)) ? 1.0 : 0.0;
            acc.sum_b += in ? 1.0 : 0.0;
        });
    double a = 0.0, b = 0.0;
    for (const auto& s : sums) {
        a += s.sum;
        b += s.sum_b;
    }
    const double n = static_cast<double>(cfg.n_samples);
    Estimate e;
    e.n_samples = cfg.n_samples;
    if (b == 0.0) return e;
    const double pc = a / b;
    // indicators with A subset of B: E[AB] = E[A], so Var(A - pc B) reduces to
    const double var_x = (a - 2.0 * pc * a + pc * pc * b) / std::max(1.0, n - 1.0);
    e.value = pc;
    e.std_error = std::sqrt(var_x / n) / (b / n);
    return e;
}

/// Normalized average rate estimate; edge users of the hybrid scheme carry the
/// one-third bandwidth weight.
inline Estimate simulate_rate(const SimConfig& cfg, RateScheme scheme, unsigned threads = 0) {
    const double T = cfg.params.target_sinr;
    const double S = cfg.params.sinr_threshold;
    switch (scheme) {
    case RateScheme::fr1:
        return detail::estimate_mean(cfg, threads, [T](const detail::McWorkspace& ws) {
            return ws.eta > T ? std::log1p(ws.eta) : 0.0;
        });
    case RateScheme::fr3:
        return detail::estimate_mean(cfg, threads, [T](const detail::McWorkspace& ws) {
            const double sinr = ws.fr3_sinr();
            return sinr > T ? std::log1p(sinr) : 0.0;
        });
    case RateScheme::ffr:
    default:
        return detail::estimate_mean(cfg, threads, [T, S](const detail::McWorkspace& ws) {
            if (ws.eta >= S) return ws.eta > T ? std::log1p(ws.eta) : 0.0;
            return ws.eta_hat > T ? std::log1p(ws.eta_hat) / 3.0 : 0.0;
        });
    }
}

/// Fraction of users classified cell-edge at each radius of the grid.
inline std::vector<std::pair<double, Estimate>> edge_fraction_vs_distance(
    const SimConfig& cfg, const std::vector<double>& r_grid, unsigned threads = 0) {
    const double S = cfg.params.sinr_threshold;
    std::vector<std::pair<double, Estimate>> out;
    out.reserve(r_grid.size());
    for (double r : r_grid) {
        SimConfig at = cfg;
        at.fixed_r = r;
        out.emplace_back(r, detail::estimate_mean(at, threads, [S](const detail::McWorkspace& ws) {
                             return ws.eta < S ? 1.0 : 0.0;
                         }));
    }
    return out;
}

/// Hybrid-scheme coverage curve over a radius grid under the configured fading
/// mode; with a tapped-delay-line mode this is the partially correlated case.
inline std::vector<std::pair<double, Estimate>> simulate_tdl_ffr_coverage(
    const SimConfig& cfg, const std::vector<double>& r_grid, unsigned threads = 0) {
    std::vector<std::pair<double, Estimate>> out;
    out.reserve(r_grid.size());
    for (double r : r_grid) {
        SimConfig at = cfg;
        at.fixed_r = r;
        out.emplace_back(r, simulate_coverage(at, CoverageQuantity::ffr, threads));
    }
    return out;
}

} // namespace ffr
