#pragma once
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ffr/units.hpp"

namespace ffr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class ReuseSet { fr1, fr3 };

/// Two-tier hexagonal site layout around a serving site at the origin.
/// cell_radius is the hexagon inradius; neighbouring sites are 2*cell_radius apart.
struct NetworkLayout {
    double cell_radius = 0.0;
    std::vector<Vec2> fr1_interferers;     // every interfering site under full reuse
    std::vector<Vec2> fr3_interferers;     // co-channel sites under reuse 3
    std::vector<std::size_t> fr3_indices;  // positions of the fr3 sites inside fr1_interferers

    const std::vector<Vec2>& interferers(ReuseSet set) const {
        return set == ReuseSet::fr1 ? fr1_interferers : fr3_interferers;
    }
};

/// Polar user position relative to the serving site. theta is stored in [0, 2*pi).
struct UserPosition {
    double r = 0.0;
    double theta = 0.0;

    UserPosition() = default;
    UserPosition(double r_m, double theta_rad) : r(r_m), theta(theta_rad) {
        if (!(r >= 0.0)) throw std::invalid_argument("UserPosition: r must be >= 0");
        theta = std::fmod(theta, 2.0 * pi);
        if (theta < 0.0) theta += 2.0 * pi;
    }

    Vec2 cartesian() const { return {r * std::cos(theta), r * std::sin(theta)}; }
};

/// Builds the serving cell's two interference tiers: 6 sites at 2R, 6 at
/// 2*sqrt(3)R (the reuse-3 co-channel ring) and 6 at 4R.
inline NetworkLayout build_layout(double cell_radius);

inline NetworkLayout build_layout(double cell_radius) {
    if (!(cell_radius > 0.0)) throw std::invalid_argument("build_layout: cell radius must be > 0");
    const double R = cell_radius;
    NetworkLayout out;
    out.cell_radius = R;
    out.fr1_interferers.reserve(18);
    for (int k = 0; k < 6; ++k) {
        const double a = pi / 3.0 * k;
        out.fr1_interferers.push_back({2.0 * R * std::cos(a), 2.0 * R * std::sin(a)});
    }
    for (int k = 0; k < 6; ++k) {
        const double a = pi / 6.0 + pi / 3.0 * k;
        out.fr1_interferers.push_back(
            {2.0 * std::sqrt(3.0) * R * std::cos(a), 2.0 * std::sqrt(3.0) * R * std::sin(a)});
    }
    for (int k = 0; k < 6; ++k) {
        const double a = pi / 3.0 * k;
        out.fr1_interferers.push_back({4.0 * R * std::cos(a), 4.0 * R * std::sin(a)});
    }
    out.fr3_indices = {6, 7, 8, 9, 10, 11};
    for (std::size_t i : out.fr3_indices) out.fr3_interferers.push_back(out.fr1_interferers[i]);
    return out;
}

/// Euclidean distances from the user to each interferer of the requested set.
inline std::vector<double> interferer_distances(const NetworkLayout& layout,
                                                const UserPosition& user, ReuseSet set) {
    if (layout.cell_radius > 0.0 && user.r > layout.cell_radius)
        throw std::invalid_argument("interferer_distances: user outside the cell");
    const Vec2 p = user.cartesian();
    const auto& sites = layout.interferers(set);
    std::vector<double> d;
    d.reserve(sites.size());
    for (const Vec2& s : sites) d.push_back(distance(p, s));
    return d;
}

} // namespace ffr
