#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ffr/analytics.hpp"
#include "ffr/montecarlo.hpp"
#include "ffr/units.hpp"

using namespace ffr;

namespace {

SystemParams hex_params(double alpha, double target_db, double threshold_db,
                        double cell_radius = 1.0) {
    SystemParams p;
    p.alpha = alpha;
    p.target_sinr = db_to_linear(target_db);
    p.sinr_threshold = db_to_linear(threshold_db);
    p.layout = build_layout(cell_radius);
    return p;
}

/// One interferer two length units away from a cell-edge user at (1, 0).
SystemParams single_interferer_params(double alpha, double target_lin, double threshold_lin) {
    SystemParams p;
    p.alpha = alpha;
    p.target_sinr = target_lin;
    p.sinr_threshold = threshold_lin;
    p.layout.cell_radius = 1.0;
    p.layout.fr1_interferers = {{3.0, 0.0}};
    p.layout.fr3_interferers = {{3.0, 0.0}};
    p.layout.fr3_indices = {0};
    return p;
}

SystemParams degenerate_fr3_equals_fr1(double alpha) {
    SystemParams p = hex_params(alpha, 0.0, 0.0);
    p.layout.fr3_interferers = p.layout.fr1_interferers;
    p.layout.fr3_indices.clear();
    for (std::size_t i = 0; i < 18; ++i) p.layout.fr3_indices.push_back(i);
    return p;
}

} // namespace

TEST_CASE("coverage tends to one as the target vanishes", "[analytics]") {
    SystemParams p = hex_params(3.0, 0.0, 0.0);
    p.target_sinr = 1e-12;
    const UserPosition u(0.8, 0.4);
    CHECK_THAT(coverage_fr1(p, u), Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK_THAT(coverage_fr3(p, u), Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("single-interferer coverage has the closed form", "[analytics]") {
    // one interferer at distance 2 from the user, alpha=4, T=1: 1/(1 + (1/2)^4)
    const SystemParams p = single_interferer_params(4.0, 1.0, 1.0);
    const double got = coverage_fr1(p, UserPosition(1.0, 0.0));
    CHECK_THAT(got, Catch::Matchers::WithinRel(16.0 / 17.0, 1e-12));
}

TEST_CASE("reuse-3 coverage dominates full-reuse coverage", "[analytics]") {
    const SystemParams p = hex_params(3.0, 0.0, 0.0);
    for (double r : {0.2, 0.5, 0.9})
        for (double th : {0.0, 0.4, 1.0})
            CHECK(coverage_fr3(p, UserPosition(r, th)) >= coverage_fr1(p, UserPosition(r, th)));
}

TEST_CASE("coverage against a fixed-position Monte Carlo oracle", "[analytics]") {
    SimConfig sim;
    sim.params = hex_params(3.0, 0.0, 0.0);
    sim.fixed_r = 0.5;
    sim.fixed_theta = 0.0;
    sim.n_samples = 1000000;
    sim.seed = 101;
    const UserPosition u(0.5, 0.0);

    const auto fr1 = simulate_coverage(sim, CoverageQuantity::fr1);
    CHECK(std::abs(fr1.value - coverage_fr1(sim.params, u)) <= 3.0 * fr1.std_error);

    SimConfig sim3 = sim;
    sim3.fixed_r = 1.0;
    const auto fr3 = simulate_coverage(sim3, CoverageQuantity::fr3);
    CHECK(std::abs(fr3.value - coverage_fr3(sim3.params, UserPosition(1.0, 0.0))) <=
          3.0 * fr3.std_error);
}

TEST_CASE("noise lowers coverage and is honoured by the simulator", "[analytics]") {
    SystemParams p = hex_params(3.0, 0.0, 0.0, 1.0);
    const UserPosition u(0.6, 0.2);
    const double clean = coverage_fr1(p, u);
    p.noise_over_power = 0.5;  // distances are order unity here, so this bites
    const double noisy = coverage_fr1(p, u);
    CHECK(noisy < clean);

    SimConfig sim;
    sim.params = p;
    sim.fixed_r = 0.6;
    sim.fixed_theta = 0.2;
    sim.n_samples = 400000;
    sim.seed = 103;
    const auto est = simulate_coverage(sim, CoverageQuantity::fr1);
    CHECK(std::abs(est.value - noisy) <= 3.0 * est.std_error);
}

TEST_CASE("centre-user conditional coverage", "[analytics]") {
    const UserPosition u(0.7, 0.3);
    SECTION("threshold above target conditions away the target") {
        const SystemParams p = hex_params(3.0, 0.0, 2.0);
        CHECK(coverage_ffr_centre(p, u) == 1.0);
    }
    SECTION("vanishing threshold recovers plain coverage") {
        SystemParams p = hex_params(3.0, 0.0, 0.0);
        p.sinr_threshold = 1e-12;
        CHECK_THAT(coverage_ffr_centre(p, u),
                   Catch::Matchers::WithinRel(coverage_fr1(p, u), 1e-9));
    }
    SECTION("hand-evaluated ratio on the single-interferer layout") {
        // a = (1/2)^4; ratio = (1+S a)/(1+T a) with T = 2S, S = 1
        const SystemParams p = single_interferer_params(4.0, 2.0, 1.0);
        CHECK_THAT(coverage_ffr_centre(p, UserPosition(1.0, 0.0)),
                   Catch::Matchers::WithinRel(17.0 / 18.0, 1e-12));
    }
}

TEST_CASE("hybrid coverage composition identity at S_th = T", "[analytics]") {
    for (double tdb : {-3.0, 0.0, 4.0}) {
        const SystemParams p = hex_params(3.0, tdb, tdb);
        for (double r : {0.3, 0.8}) {
            const UserPosition u(r, 0.5);
            const double cp1 = coverage_fr1(p, u);
            const double cp3 = coverage_fr3(p, u);
            const double got = coverage_ffr(p, u, SubbandCorrelation::independent);
            CHECK_THAT(got, Catch::Matchers::WithinRel(cp1 * (1.0 - cp3) + cp3, 1e-12));
            CHECK(got > cp3);
        }
    }
}

TEST_CASE("hybrid coverage limits in the threshold", "[analytics]") {
    const UserPosition u(0.6, 0.9);
    SystemParams p = hex_params(3.0, 0.0, 0.0);
    p.sinr_threshold = 1e9;
    CHECK_THAT(coverage_ffr(p, u, SubbandCorrelation::independent),
               Catch::Matchers::WithinAbs(coverage_fr3(p, u), 1e-9));
}

TEST_CASE("fully correlated coverage collapses onto reuse-3", "[analytics]") {
    const UserPosition u(0.75, 0.2);
    for (double sdb : {0.0, 1.5, 6.0}) {
        const SystemParams p = hex_params(3.0, 0.0, sdb);
        CHECK(coverage_ffr(p, u, SubbandCorrelation::fully_correlated) == coverage_fr3(p, u));
    }
    // below the target it strictly loses coverage
    const SystemParams p = hex_params(3.0, 0.0, -2.0);
    CHECK(coverage_ffr(p, u, SubbandCorrelation::fully_correlated) < coverage_fr3(p, u));
}

TEST_CASE("matched reuse-3 threshold", "[analytics]") {
    SECTION("vanishing threshold maps to a vanishing threshold") {
        SystemParams p = hex_params(3.0, 0.0, 0.0);
        p.sinr_threshold = 1e-9;
        CHECK(shat_threshold(p, UserPosition(0.5, 0.1)) < 1e-6);
    }
    SECTION("identical interferer sets give the identity map") {
        SystemParams p = degenerate_fr3_equals_fr1(3.0);
        p.sinr_threshold = db_to_linear(2.0);
        CHECK_THAT(shat_threshold(p, UserPosition(0.6, 0.4)),
                   Catch::Matchers::WithinRel(p.sinr_threshold, 1e-9));
    }
    SECTION("never below the full-reuse threshold") {
        const SystemParams p = hex_params(3.0, 0.0, 0.0);
        for (double r : {0.2, 0.6, 0.95})
            CHECK(shat_threshold(p, UserPosition(r, 0.7)) >= p.sinr_threshold);
    }
    SECTION("matches the simulated CDF transfer") {
        SystemParams p = hex_params(3.0, 0.0, 0.0);
        const UserPosition u(0.7, 0.0);
        const double shat = shat_threshold(p, u);

        SimConfig sim;
        sim.params = p;
        sim.fixed_r = 0.7;
        sim.fixed_theta = 0.0;
        sim.n_samples = 1000000;
        sim.seed = 107;
        // P[eta < S] from the edge-fraction estimator
        const auto edge = edge_fraction_vs_distance(sim, {0.7}).front().second;
        // P[eta_hat < shat] via reuse-3 coverage at the mapped threshold
        SimConfig sim_hat = sim;
        sim_hat.seed = 109;
        sim_hat.params.target_sinr = shat;
        const auto cov3 = simulate_coverage(sim_hat, CoverageQuantity::fr3);
        const double lhs = edge.value;
        const double rhs = 1.0 - cov3.value;
        const double se = std::hypot(edge.std_error, cov3.std_error);
        CHECK(std::abs(lhs - rhs) <= 3.0 * se);
    }
}

TEST_CASE("rates vanish for unattainable targets and decrease in T", "[analytics]") {
    SystemParams p = hex_params(3.0, 0.0, 0.0);
    p.target_sinr = 1e6;
    CHECK(rate_fr1(p) < 1e-4);
    const double r0 = rate_fr1(hex_params(3.0, -3.0, 0.0));
    const double r1 = rate_fr1(hex_params(3.0, 0.0, 0.0));
    const double r2 = rate_fr1(hex_params(3.0, 3.0, 0.0));
    CHECK(r0 > r1);
    CHECK(r1 > r2);
    CHECK(r2 > 0.0);
}

TEST_CASE("reuse-3 rate dominates full-reuse rate before the bandwidth split", "[analytics]") {
    const SystemParams p = hex_params(3.0, 0.0, 0.0);
    CHECK(rate_fr3(p) > rate_fr1(p));
}

TEST_CASE("rates against the Monte Carlo oracle", "[analytics]") {
    SimConfig sim;
    sim.params = hex_params(3.0, 0.0, 1.0);
    sim.n_samples = 1000000;
    sim.seed = 113;

    const double a_fr1 = rate_fr1(sim.params);
    const auto m_fr1 = simulate_rate(sim, RateScheme::fr1);
    CHECK(std::abs(m_fr1.value - a_fr1) <= 3.0 * m_fr1.std_error);
    CHECK(std::abs(m_fr1.value - a_fr1) / a_fr1 < 0.01);

    const double a_ffr = rate_ffr(sim.params, SubbandCorrelation::independent);
    const auto m_ffr = simulate_rate(sim, RateScheme::ffr);
    CHECK(std::abs(m_ffr.value - a_ffr) <= 3.0 * m_ffr.std_error);
    CHECK(std::abs(m_ffr.value - a_ffr) / a_ffr < 0.01);

    // The correlated-case closed form maps the classification event {eta < S}
    // onto {eta_hat < S_hat}; the probabilities match but the events do not, so
    // the formula is a lower bound on the simulated system, tight to under 2%.
    SimConfig simc = sim;
    simc.mode = CorrelationMode::fully_correlated();
    simc.seed = 117;
    const double a_corr = rate_ffr(simc.params, SubbandCorrelation::fully_correlated);
    const auto m_corr = simulate_rate(simc, RateScheme::ffr);
    CHECK(m_corr.value >= a_corr - 3.0 * m_corr.std_error);
    CHECK(std::abs(m_corr.value - a_corr) / a_corr < 0.02);
}

TEST_CASE("hybrid rate limits in the threshold", "[analytics]") {
    SystemParams p = hex_params(3.0, 0.0, 0.0);
    p.sinr_threshold = 1e-9;
    CHECK_THAT(rate_ffr(p, SubbandCorrelation::independent),
               Catch::Matchers::WithinRel(rate_fr1(p), 1e-6));
    p.sinr_threshold = 1e9;
    CHECK_THAT(rate_ffr(p, SubbandCorrelation::independent),
               Catch::Matchers::WithinRel(rate_fr3(p) / 3.0, 1e-6));
}

TEST_CASE("edge rate factor approximation", "[analytics]") {
    SystemParams p = hex_params(3.0, 0.0, 0.0);
    const UserPosition u(0.6, 0.3);
    p.target_sinr = 1e-12;
    CHECK_THAT(k_factor(p, u, true), Catch::Matchers::WithinRel(k_factor(p, u, false), 1e-9));

    double prev = 1e300;  // nonincreasing in the target
    for (double tdb : {-6.0, -3.0, 0.0, 2.0, 6.0}) {
        p.target_sinr = db_to_linear(tdb);
        const double k = k_factor(p, u, true);
        CHECK(k <= prev + 1e-15);
        prev = k;
    }
}

TEST_CASE("threshold at the target maximizes independent hybrid coverage", "[analytics]") {
    const double tdb = 0.0;
    SystemParams p = hex_params(3.0, tdb, tdb);
    const UserPosition u(0.5, 0.6);
    const double at_t = coverage_ffr(p, u, SubbandCorrelation::independent);
    for (double delta : {-3.0, -1.0, 1.0, 3.0}) {
        p.sinr_threshold = db_to_linear(tdb + delta);
        CHECK(coverage_ffr(p, u, SubbandCorrelation::independent) < at_t);
    }
}

TEST_CASE("coverage probabilities stay within [0,1] and fall with the target", "[analytics]") {
    for (double alpha : {2.0, 3.0, 4.0}) {
        double prev1 = 1.1, prev3 = 1.1;
        for (double tdb : {-6.0, -2.0, 2.0, 6.0, 12.0}) {
            const SystemParams p = hex_params(alpha, tdb, tdb);
            const UserPosition u(0.8, 0.25);
            const double c1 = coverage_fr1(p, u), c3 = coverage_fr3(p, u);
            CHECK(c1 >= 0.0);
            CHECK(c3 <= 1.0);
            CHECK(c1 < prev1);
            CHECK(c3 < prev3);
            prev1 = c1;
            prev3 = c3;
        }
    }
}

TEST_CASE("parameter validation", "[analytics]") {
    SystemParams p = hex_params(3.0, 0.0, 0.0);
    p.alpha = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = hex_params(3.0, 0.0, 0.0);
    p.target_sinr = 0.0;
    CHECK_THROWS_AS(coverage_fr1(p, UserPosition(0.5, 0.0)), std::invalid_argument);
    p = hex_params(3.0, 0.0, 0.0);
    p.noise_over_power = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("radial pdf sampling and truncation", "[analytics]") {
    const RadialPdf pdf{2.0, 0.5};
    CHECK(pdf.pdf(0.4) == 0.0);
    CHECK(pdf.pdf(2.5) == 0.0);
    CHECK(pdf.sample(0.0) == 0.5);
    CHECK_THAT(pdf.sample(1.0), Catch::Matchers::WithinRel(2.0, 1e-12));
    // integrates to one on the truncated support
    const int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = 0.5 + (2.0 - 0.5) * (i + 0.5) / n;
        acc += pdf.pdf(r) * (2.0 - 0.5) / n;
    }
    CHECK_THAT(acc, Catch::Matchers::WithinAbs(1.0, 1e-6));
}
