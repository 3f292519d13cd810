#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffr/rng.hpp"
#include "ffr/units.hpp"

namespace ffr {

/// Tapped-delay-line power delay profile plus the OFDM numerology used to
/// turn it into per-subcarrier frequency responses.
struct ChannelProfile {
    std::string name;
    std::vector<double> tap_delays_ns;
    std::vector<double> tap_powers_db;
    double sampling_rate_hz = 7.68e6;
    int fft_size = 512;

    void validate() const {
        if (tap_delays_ns.empty()) throw std::invalid_argument("ChannelProfile: no taps");
        if (tap_delays_ns.size() != tap_powers_db.size())
            throw std::invalid_argument("ChannelProfile: delay/power size mismatch");
        if (tap_delays_ns.front() != 0.0)
            throw std::invalid_argument("ChannelProfile: first tap delay must be 0");
        for (std::size_t i = 1; i < tap_delays_ns.size(); ++i)
            if (!(tap_delays_ns[i] > tap_delays_ns[i - 1]))
                throw std::invalid_argument("ChannelProfile: delays must be strictly increasing");
        if (!(sampling_rate_hz > 0.0) || fft_size < 2)
            throw std::invalid_argument("ChannelProfile: bad numerology");
        if (!(tap_delays_ns.back() * 1e-9 < fft_size / sampling_rate_hz))
            throw std::invalid_argument("ChannelProfile: delay spread exceeds the symbol span");
    }

    /// Linear tap powers, normalized to unit total so |H(f)|^2 has unit mean.
    std::vector<double> tap_powers_linear() const {
        std::vector<double> p(tap_powers_db.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = db_to_linear(tap_powers_db[i]);
            sum += p[i];
        }
        for (double& v : p) v /= sum;
        return p;
    }

    /// Tap delays quantized to the nearest sampling instant, in samples.
    std::vector<long> tap_delay_samples() const {
        std::vector<long> n(tap_delays_ns.size());
        for (std::size_t i = 0; i < n.size(); ++i)
            n[i] = std::lround(tap_delays_ns[i] * 1e-9 * sampling_rate_hz);
        return n;
    }

    double subcarrier_spacing_hz() const { return sampling_rate_hz / fft_size; }
};

inline ChannelProfile pedestrian_a() {
    return {"PedA", {0.0, 110.0, 190.0, 410.0}, {0.0, -9.7, -19.2, -22.8}, 7.68e6, 512};
}

inline ChannelProfile vehicular_a() {
    return {"VehA",
            {0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0},
            {0.0, -1.0, -9.0, -10.0, -15.0, -20.0},
            7.68e6,
            512};
}

/// Parses {"name":..., "delays_ns":[...], "powers_db":[...]} with optional
/// "sampling_rate_hz" and "fft_size" overrides.
inline ChannelProfile profile_from_json(const nlohmann::json& j) {
    ChannelProfile p;
    try {
        p.name = j.at("name").get<std::string>();
        p.tap_delays_ns = j.at("delays_ns").get<std::vector<double>>();
        p.tap_powers_db = j.at("powers_db").get<std::vector<double>>();
        if (j.contains("sampling_rate_hz")) p.sampling_rate_hz = j["sampling_rate_hz"].get<double>();
        if (j.contains("fft_size")) p.fft_size = j["fft_size"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("profile_from_json: ") + e.what());
    }
    p.validate();
    return p;
}

/// Contiguous block of used subcarriers; representative is the subcarrier a
/// scalar link gain is evaluated at (band centre unless reconfigured).
struct Band {
    int first = 0;
    int count = 0;
    int representative = 0;
};

/// Split of the used subcarriers into the common centre band and the three
/// planned edge bands.
struct SubbandPlan {
    int used_subcarriers = 300;
    Band centre{0, 150, 75};
    std::array<Band, 3> edge{Band{150, 50, 175}, Band{200, 50, 225}, Band{250, 50, 275}};
    int serving_edge_band = 0;  // which of the three edge bands the serving cell owns

    void validate() const {
        if (used_subcarriers < 2) throw std::invalid_argument("SubbandPlan: too few subcarriers");
        if (serving_edge_band < 0 || serving_edge_band > 2)
            throw std::invalid_argument("SubbandPlan: serving_edge_band out of range");
        auto check_band = [&](const Band& b) {
            if (b.count <= 0 || b.first < 0 || b.first + b.count > used_subcarriers)
                throw std::invalid_argument("SubbandPlan: band outside used subcarriers");
            if (b.representative < b.first || b.representative >= b.first + b.count)
                throw std::invalid_argument("SubbandPlan: representative outside its band");
        };
        check_band(centre);
        for (const Band& b : edge) check_band(b);
        if (!(edge[0].count == edge[1].count && edge[1].count == edge[2].count))
            throw std::invalid_argument("SubbandPlan: edge bands must be equal size");
        std::vector<char> seen(static_cast<std::size_t>(used_subcarriers), 0);
        auto mark = [&](const Band& b) {
            for (int i = b.first; i < b.first + b.count; ++i) {
                if (seen[static_cast<std::size_t>(i)]++)
                    throw std::invalid_argument("SubbandPlan: bands overlap");
            }
        };
        mark(centre);
        for (const Band& b : edge) mark(b);
    }

    /// Signed FFT tone of a used subcarrier; the used block is centred on DC
    /// and DC itself is skipped.
    int tone_index(int used_index) const {
        const int half = used_subcarriers / 2;
        return used_index < half ? used_index - half : used_index - half + 1;
    }

    double used_bandwidth_hz(const ChannelProfile& p) const {
        return used_subcarriers * p.subcarrier_spacing_hz();
    }
};

inline SubbandPlan default_subband_plan() { return {}; }

/// Correlation regime linking a link's centre-band and edge-band fading powers.
struct CorrelationMode {
    enum class Kind { independent, fully_correlated, tapped_delay_line };
    Kind kind = Kind::independent;
    ChannelProfile profile;  // tapped_delay_line only
    SubbandPlan plan;        // tapped_delay_line only

    static CorrelationMode independent() { return {Kind::independent, {}, {}}; }
    static CorrelationMode fully_correlated() { return {Kind::fully_correlated, {}, {}}; }
    static CorrelationMode tapped_delay_line(ChannelProfile p,
                                             SubbandPlan plan = default_subband_plan()) {
        p.validate();
        plan.validate();
        return {Kind::tapped_delay_line, std::move(p), plan};
    }
};

/// One draw of fading powers: serving-link gain g on the centre band, g_hat on
/// the serving cell's edge band, and the same pair per interferer.
struct PowerDraw {
    double g = 0.0;
    double g_hat = 0.0;
    std::vector<double> h;
    std::vector<double> h_hat;
};

/// Power correlation of |H(f1)|^2 and |H(f2)|^2 for Rayleigh taps; equals the
/// squared magnitude of the frequency autocorrelation of the quantized profile.
inline double subband_correlation(const ChannelProfile& profile, double f1_hz, double f2_hz,
                                  const SubbandPlan& plan = default_subband_plan()) {
    profile.validate();
    const double bw = plan.used_bandwidth_hz(profile);
    if (f1_hz < 0.0 || f1_hz > bw || f2_hz < 0.0 || f2_hz > bw)
        throw std::invalid_argument("subband_correlation: frequency outside the signal band");
    const auto p = profile.tap_powers_linear();
    const auto n = profile.tap_delay_samples();
    const double df = f1_hz - f2_hz;
    std::complex<double> rho{0.0, 0.0};
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double tau = static_cast<double>(n[k]) / profile.sampling_rate_hz;
        rho += p[k] * std::polar(1.0, -2.0 * pi * df * tau);
    }
    return std::norm(rho);
}

/// Draws (g, g_hat, h[], h_hat[]) for one sample. All marginals are unit-mean
/// exponential; the joint law across the two bands follows the mode.
class FadingSampler {
public:
    explicit FadingSampler(CorrelationMode mode) : mode_(std::move(mode)) {
        if (mode_.kind == CorrelationMode::Kind::tapped_delay_line) {
            mode_.profile.validate();
            mode_.plan.validate();
            const auto p = mode_.profile.tap_powers_linear();
            const auto n = mode_.profile.tap_delay_samples();
            const int m0 = mode_.plan.tone_index(mode_.plan.centre.representative);
            const int m1 =
                mode_.plan.tone_index(mode_.plan.edge[mode_.plan.serving_edge_band].representative);
            const double step = 2.0 * pi / mode_.profile.fft_size;
            scale_.resize(p.size());
            tone_centre_.resize(p.size());
            tone_edge_.resize(p.size());
            for (std::size_t k = 0; k < p.size(); ++k) {
                scale_[k] = std::sqrt(p[k] / 2.0);
                tone_centre_[k] = std::polar(1.0, -step * m0 * n[k]);
                tone_edge_[k] = std::polar(1.0, -step * m1 * n[k]);
            }
        }
    }

    const CorrelationMode& mode() const { return mode_; }

    void draw(RandomStream& rng, std::size_t n_interferers, PowerDraw& out) const {
        out.h.resize(n_interferers);
        out.h_hat.resize(n_interferers);
        switch (mode_.kind) {
        case CorrelationMode::Kind::independent:
            out.g = rng.exponential();
            for (auto& v : out.h) v = rng.exponential();
            out.g_hat = rng.exponential();
            for (auto& v : out.h_hat) v = rng.exponential();
            break;
        case CorrelationMode::Kind::fully_correlated:
            out.g = rng.exponential();
            for (auto& v : out.h) v = rng.exponential();
            out.g_hat = out.g;
            out.h_hat = out.h;
            break;
        case CorrelationMode::Kind::tapped_delay_line:
            draw_tone_pair(rng, out.g, out.g_hat);
            for (std::size_t i = 0; i < n_interferers; ++i)
                draw_tone_pair(rng, out.h[i], out.h_hat[i]);
            break;
        }
    }

private:
    void draw_tone_pair(RandomStream& rng, double& p_centre, double& p_edge) const {
        std::complex<double> acc0{0.0, 0.0}, acc1{0.0, 0.0};
        for (std::size_t k = 0; k < scale_.size(); ++k) {
            double z0, z1;
            rng.normal_pair(z0, z1);
            const std::complex<double> c{scale_[k] * z0, scale_[k] * z1};
            acc0 += c * tone_centre_[k];
            acc1 += c * tone_edge_[k];
        }
        p_centre = std::norm(acc0);
        p_edge = std::norm(acc1);
    }

    CorrelationMode mode_;
    std::vector<double> scale_;
    std::vector<std::complex<double>> tone_centre_;
    std::vector<std::complex<double>> tone_edge_;
};

inline PowerDraw draw_powers(const CorrelationMode& mode, std::size_t n_interferers,
                             RandomStream& rng) {
    FadingSampler sampler(mode);
    PowerDraw out;
    sampler.draw(rng, n_interferers, out);
    return out;
}

} // namespace ffr
