// Command line front end: analytic coverage/rate sweeps, threshold optimization
// and Monte Carlo validation runs, emitting CSV and JSON reports.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ffr/analytics.hpp"
#include "ffr/csv.hpp"
#include "ffr/fading.hpp"
#include "ffr/montecarlo.hpp"
#include "ffr/optimizer.hpp"
#include "ffr/run_config.hpp"
#include "ffr/units.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;
constexpr int exit_check_failed = 4;

ffr::SystemParams make_params(const ffr::RunConfig& rc) {
    ffr::SystemParams p;
    p.alpha = rc.alpha;
    p.target_sinr = ffr::db_to_linear(rc.target_db);
    p.sinr_threshold = ffr::db_to_linear(rc.threshold_db);
    p.noise_over_power = rc.noise_over_power;
    p.layout = ffr::build_layout(rc.cell_radius_m);
    p.min_radius_m = rc.min_radius_m;
    p.validate();
    return p;
}

ffr::QuadratureOptions make_quadrature(const ffr::RunConfig& rc) {
    ffr::QuadratureOptions q;
    q.radial_nodes = rc.radial_nodes;
    q.angular_nodes = rc.angular_nodes;
    return q;
}

ffr::SubbandCorrelation analytic_mode(const ffr::RunConfig& rc) {
    if (rc.mode == "independent") return ffr::SubbandCorrelation::independent;
    if (rc.mode == "correlated") return ffr::SubbandCorrelation::fully_correlated;
    throw std::invalid_argument("mode must be 'independent' or 'correlated'");
}

ffr::CorrelationMode simulation_mode(const ffr::RunConfig& rc) {
    if (rc.channel.empty()) {
        return analytic_mode(rc) == ffr::SubbandCorrelation::independent
                   ? ffr::CorrelationMode::independent()
                   : ffr::CorrelationMode::fully_correlated();
    }
    if (rc.channel == "pedA") return ffr::CorrelationMode::tapped_delay_line(ffr::pedestrian_a());
    if (rc.channel == "vehA") return ffr::CorrelationMode::tapped_delay_line(ffr::vehicular_a());
    throw std::invalid_argument("channel must be 'pedA' or 'vehA'");
}

/// Output sink: file when a path is configured, otherwise the fallback stream.
struct Sink {
    std::ofstream file;
    std::ostream* os = nullptr;

    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os = &fallback;
        } else {
            file.open(path, std::ios::binary);  // binary keeps LF endings everywhere
            if (!file) throw std::invalid_argument("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& get() { return *os; }
};

std::vector<double> radius_grid(double cell_radius, int steps) {
    if (steps < 1) throw std::invalid_argument("r-steps must be >= 1");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps));
    for (int k = 1; k <= steps; ++k) grid.push_back(cell_radius * k / steps);
    return grid;
}

int run_coverage(const ffr::RunConfig& rc) {
    const auto params = make_params(rc);
    const auto quad = make_quadrature(rc);
    const auto mode = analytic_mode(rc);
    Sink sink(rc.out, std::cout);
    ffr::CsvWriter csv(sink.get());
    csv.row({"r_m", "cp_fr1", "cp_fr3", "cp_ffr_centre", "cp_ffr_edge", "cp_ffr"});
    for (double r : radius_grid(params.layout.cell_radius, rc.r_steps)) {
        csv.row({ffr::format_double(r),
                 ffr::format_double(ffr::coverage_fr1_radial(params, r, quad)),
                 ffr::format_double(ffr::coverage_fr3_radial(params, r, quad)),
                 ffr::format_double(ffr::coverage_ffr_centre_radial(params, r, quad)),
                 ffr::format_double(ffr::coverage_ffr_edge_radial(params, r, mode, quad)),
                 ffr::format_double(ffr::coverage_ffr_radial(params, r, mode, quad))});
    }
    return exit_ok;
}

int run_rate(const ffr::RunConfig& rc) {
    auto params = make_params(rc);
    const auto quad = make_quadrature(rc);
    const auto mode = analytic_mode(rc);
    if (!(rc.sth_step_db > 0.0) || rc.sth_stop_db < rc.sth_start_db)
        throw std::invalid_argument("invalid threshold sweep range");
    const double fr1 = ffr::rate_fr1(params, quad);
    const double fr3 = ffr::rate_fr3(params, quad);
    std::vector<double> sth_db, ffr_rate;
    for (double s = rc.sth_start_db; s <= rc.sth_stop_db + 1e-12; s += rc.sth_step_db) {
        params.sinr_threshold = ffr::db_to_linear(s);
        sth_db.push_back(s);
        ffr_rate.push_back(ffr::rate_ffr(params, mode, quad));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < ffr_rate.size(); ++i)
        if (ffr_rate[i] > ffr_rate[best]) best = i;
    Sink sink(rc.out, std::cout);
    ffr::CsvWriter csv(sink.get());
    csv.row({"s_th_db", "rate_fr1", "rate_fr3", "rate_ffr", "is_max"});
    for (std::size_t i = 0; i < sth_db.size(); ++i) {
        csv.row({ffr::format_double(sth_db[i]), ffr::format_double(fr1), ffr::format_double(fr3),
                 ffr::format_double(ffr_rate[i]), i == best ? "1" : "0"});
    }
    return exit_ok;
}

int run_optimize(const ffr::RunConfig& rc) {
    const auto quad = make_quadrature(rc);
    json results = json::array();
    for (double alpha : rc.alphas) {
        ffr::RunConfig at = rc;
        at.alpha = alpha;
        auto params = make_params(at);

        const auto tp = ffr::solve_tprime(params, quad);
        const auto tpp = ffr::solve_tdoubleprime(params, quad);
        const double centre = ffr::centre_user_fraction(params, tp.s_opt, quad);

        ffr::SystemParams ind = params;  // evaluated at T = T', S_th = max(T, T') = T'
        ind.target_sinr = tp.s_opt;
        ind.sinr_threshold = tp.s_opt;
        const double gain_ind =
            100.0 * (ffr::rate_ffr(ind, ffr::SubbandCorrelation::independent, quad) /
                         ffr::rate_fr1(ind, quad) -
                     1.0);

        ffr::SystemParams corr = params;  // evaluated at T = T'', S_th = T''
        corr.target_sinr = tpp.s_opt;
        corr.sinr_threshold = tpp.s_opt;
        const double gain_corr =
            100.0 * (ffr::rate_ffr(corr, ffr::SubbandCorrelation::fully_correlated, quad) /
                         ffr::rate_fr1(corr, quad) -
                     1.0);

        // coverage cost of preferring the rate-optimal threshold at the requested target
        ffr::SystemParams cov = params;
        cov.sinr_threshold = std::max(params.target_sinr, tp.s_opt);
        const double cov_at_rate_opt =
            ffr::coverage_ffr_avg(cov, ffr::SubbandCorrelation::independent, quad);
        cov.sinr_threshold = params.target_sinr;
        const double cov_at_cov_opt =
            ffr::coverage_ffr_avg(cov, ffr::SubbandCorrelation::independent, quad);

        results.push_back({{"alpha", alpha},
                           {"t_prime_db", tp.s_opt_db},
                           {"t_doubleprime_db", tpp.s_opt_db},
                           {"centre_fraction", centre},
                           {"gain_independent_pct", gain_ind},
                           {"gain_correlated_pct", gain_corr},
                           {"coverage_at_rate_opt", cov_at_rate_opt},
                           {"coverage_at_cov_opt", cov_at_cov_opt},
                           {"coverage_delta", cov_at_cov_opt - cov_at_rate_opt},
                           {"kkt_residual", tp.residual}});
    }
    json report{{"target_db", rc.target_db}, {"results", results}};
    Sink sink(rc.out, std::cout);
    sink.get() << report.dump(2) << '\n';
    return exit_ok;
}

struct CheckRow {
    std::string name;
    double analytic = 0.0;
    ffr::Estimate mc;
    double z = 0.0;
    bool pass = false;
};

CheckRow make_check(const std::string& name, double analytic, const ffr::Estimate& mc) {
    CheckRow row{name, analytic, mc, 0.0, false};
    const double se = std::max(mc.std_error, 1e-300);
    row.z = (mc.value - analytic) / se;
    row.pass = std::abs(mc.value - analytic) <= 3.0 * mc.std_error;
    return row;
}

int run_simulate(const ffr::RunConfig& rc) {
    const auto params = make_params(rc);
    const auto quad = make_quadrature(rc);
    if (!rc.check.empty() && !rc.channel.empty())
        throw std::invalid_argument("--check and --channel are mutually exclusive");
    if (!(rc.samples >= 1.0)) throw std::invalid_argument("samples must be >= 1");

    ffr::SimConfig sim;
    sim.params = params;
    sim.mode = simulation_mode(rc);
    sim.n_samples = static_cast<std::uint64_t>(rc.samples);
    sim.seed = rc.seed;
    sim.n_streams = rc.n_streams;

    json summary;
    summary["config"] = rc;
    int code = exit_ok;

    Sink sink(rc.out, std::cout);
    ffr::CsvWriter csv(sink.get());

    if (!rc.channel.empty()) {
        // partially correlated channel curve against the two analytic extremes
        const auto grid = radius_grid(params.layout.cell_radius, rc.r_steps);
        const auto curve = ffr::simulate_tdl_ffr_coverage(sim, grid, rc.threads);
        csv.row({"r_m", "cp_ffr_mc", "std_error", "cp_ffr_independent", "cp_ffr_correlated"});
        json rows = json::array();
        for (const auto& [r, est] : curve) {
            const double ind =
                ffr::coverage_ffr_radial(params, r, ffr::SubbandCorrelation::independent, quad);
            const double corr =
                ffr::coverage_ffr_radial(params, r, ffr::SubbandCorrelation::fully_correlated, quad);
            csv.row({ffr::format_double(r), ffr::format_double(est.value),
                     ffr::format_double(est.std_error), ffr::format_double(ind),
                     ffr::format_double(corr)});
            rows.push_back({{"r_m", r},
                            {"cp_ffr_mc", est.value},
                            {"std_error", est.std_error},
                            {"cp_ffr_independent", ind},
                            {"cp_ffr_correlated", corr}});
        }
        summary["channel_curve"] = rows;
    } else if (!rc.check.empty()) {
        const bool do_cov = rc.check == "coverage" || rc.check == "all";
        const bool do_rate = rc.check == "rate" || rc.check == "all";
        if (!do_cov && !do_rate)
            throw std::invalid_argument("check must be 'coverage', 'rate' or 'all'");
        if (do_rate && rc.noise_over_power != 0.0)
            throw std::invalid_argument("rate checks require noise_over_power = 0");
        const auto mode = analytic_mode(rc);
        std::vector<CheckRow> rows;
        if (do_cov) {
            rows.push_back(make_check("cov_fr1", ffr::coverage_fr1_avg(params, quad),
                                      ffr::simulate_coverage(sim, ffr::CoverageQuantity::fr1,
                                                             rc.threads)));
            rows.push_back(make_check("cov_fr3", ffr::coverage_fr3_avg(params, quad),
                                      ffr::simulate_coverage(sim, ffr::CoverageQuantity::fr3,
                                                             rc.threads)));
            rows.push_back(make_check("cov_ffr", ffr::coverage_ffr_avg(params, mode, quad),
                                      ffr::simulate_coverage(sim, ffr::CoverageQuantity::ffr,
                                                             rc.threads)));
            rows.push_back(make_check("cov_ffr_centre",
                                      ffr::coverage_ffr_centre_cond_avg(params, quad),
                                      ffr::simulate_ffr_centre_coverage(sim, rc.threads)));
        }
        if (do_rate) {
            rows.push_back(make_check("rate_fr1", ffr::rate_fr1(params, quad),
                                      ffr::simulate_rate(sim, ffr::RateScheme::fr1, rc.threads)));
            rows.push_back(make_check("rate_fr3", ffr::rate_fr3(params, quad),
                                      ffr::simulate_rate(sim, ffr::RateScheme::fr3, rc.threads)));
            rows.push_back(make_check("rate_ffr", ffr::rate_ffr(params, mode, quad),
                                      ffr::simulate_rate(sim, ffr::RateScheme::ffr, rc.threads)));
        }
        csv.row({"check", "analytic", "mc_value", "mc_std_error", "z", "pass"});
        bool all_pass = true;
        json jrows = json::array();
        for (const auto& row : rows) {
            all_pass = all_pass && row.pass;
            csv.row({row.name, ffr::format_double(row.analytic), ffr::format_double(row.mc.value),
                     ffr::format_double(row.mc.std_error), ffr::format_double(row.z),
                     row.pass ? "1" : "0"});
            jrows.push_back({{"check", row.name},
                             {"analytic", row.analytic},
                             {"mc_value", row.mc.value},
                             {"mc_std_error", row.mc.std_error},
                             {"z", row.z},
                             {"pass", row.pass}});
        }
        summary["checks"] = jrows;
        summary["all_passed"] = all_pass;
        if (!all_pass) code = exit_check_failed;
    } else {
        csv.row({"quantity", "value", "std_error", "n_samples"});
        json jrows = json::array();
        auto emit = [&](const std::string& name, const ffr::Estimate& est) {
            csv.row({name, ffr::format_double(est.value), ffr::format_double(est.std_error),
                     std::to_string(est.n_samples)});
            jrows.push_back({{"quantity", name},
                             {"value", est.value},
                             {"std_error", est.std_error},
                             {"n_samples", est.n_samples}});
        };
        emit("cov_fr1", ffr::simulate_coverage(sim, ffr::CoverageQuantity::fr1, rc.threads));
        emit("cov_fr3", ffr::simulate_coverage(sim, ffr::CoverageQuantity::fr3, rc.threads));
        emit("cov_ffr", ffr::simulate_coverage(sim, ffr::CoverageQuantity::ffr, rc.threads));
        if (rc.noise_over_power == 0.0) {
            emit("rate_fr1", ffr::simulate_rate(sim, ffr::RateScheme::fr1, rc.threads));
            emit("rate_fr3", ffr::simulate_rate(sim, ffr::RateScheme::fr3, rc.threads));
            emit("rate_ffr", ffr::simulate_rate(sim, ffr::RateScheme::ffr, rc.threads));
        }
        summary["estimates"] = jrows;
    }

    Sink sum_sink(rc.summary, std::cerr);
    sum_sink.get() << summary.dump(2) << '\n';
    return code;
}

void add_common_options(CLI::App* cmd, ffr::RunConfig& rc) {
    // the config file itself is consumed during the pre-scan; declared here so
    // the parser accepts the flag
    static std::string config_path_sink;
    cmd->add_option("--config", config_path_sink, "JSON file of defaults; flags override")
        ->type_name("PATH");
    cmd->add_option("--alpha", rc.alpha, "path loss exponent")->capture_default_str();
    cmd->add_option("--target-db", rc.target_db, "target SINR T in dB")->capture_default_str();
    cmd->add_option("--threshold-db", rc.threshold_db, "classification threshold S_th in dB")
        ->capture_default_str();
    cmd->add_option("--mode", rc.mode, "sub-band fading: independent|correlated")
        ->capture_default_str();
    cmd->add_option("--R,--cell-radius", rc.cell_radius_m, "cell inradius in meters")
        ->capture_default_str();
    cmd->add_option("--r-min", rc.min_radius_m, "minimum user radius in meters")
        ->capture_default_str();
    cmd->add_option("--noise-over-power", rc.noise_over_power, "sigma^2/P (0 = interference limited)")
        ->capture_default_str();
    cmd->add_option("--radial-nodes", rc.radial_nodes, "quadrature nodes in r")
        ->capture_default_str();
    cmd->add_option("--angular-nodes", rc.angular_nodes, "quadrature nodes in theta")
        ->capture_default_str();
    cmd->add_option("--threads", rc.threads, "worker cap (0 = FFR_THREADS or hardware)")
        ->capture_default_str();
    cmd->add_option("--out", rc.out, "CSV/JSON output path (default stdout)")
        ->capture_default_str();
}

std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    ffr::RunConfig rc;
    const std::string config_path = config_path_from_argv(argc, argv);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file: " << config_path << "\n";
            return exit_usage;
        }
        try {
            rc = json::parse(in).get<ffr::RunConfig>();
        } catch (const std::exception& e) {
            std::cerr << "error: bad config file: " << e.what() << "\n";
            return exit_usage;
        }
    }

    CLI::App app{"Coverage and rate analysis for planned hybrid-reuse cellular downlinks"};
    app.require_subcommand(1);

    auto* cov = app.add_subcommand("coverage", "analytic coverage curves over the cell radius");
    add_common_options(cov, rc);
    cov->add_option("--r-steps", rc.r_steps, "radius grid points")->capture_default_str();

    auto* rate = app.add_subcommand("rate", "analytic rate sweep over the classification threshold");
    add_common_options(rate, rc);
    rate->add_option("--sth-start", rc.sth_start_db, "sweep start in dB")->capture_default_str();
    rate->add_option("--sth-stop", rc.sth_stop_db, "sweep stop in dB")->capture_default_str();
    rate->add_option("--sth-step", rc.sth_step_db, "sweep step in dB")->capture_default_str();

    auto* opt = app.add_subcommand("optimize", "optimal thresholds and rate gains per alpha");
    add_common_options(opt, rc);
    opt->add_option("--alphas", rc.alphas, "path loss exponents")->delimiter(',')
        ->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates and analytic cross-checks");
    add_common_options(sim, rc);
    sim->add_option("--samples", rc.samples, "sample count (accepts 1e6 notation)")
        ->capture_default_str();
    sim->add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
    sim->add_option("--streams", rc.n_streams, "independent substreams")->capture_default_str();
    sim->add_option("--check", rc.check, "validate MC against analytics: coverage|rate|all")
        ->capture_default_str();
    sim->add_option("--channel", rc.channel, "tapped-delay-line profile: pedA|vehA")
        ->capture_default_str();
    sim->add_option("--r-steps", rc.r_steps, "radius grid points for --channel curves")
        ->capture_default_str();
    sim->add_option("--summary", rc.summary, "JSON summary path (default stderr)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (cov->parsed()) { rc.command = "coverage"; return run_coverage(rc); }
        if (rate->parsed()) { rc.command = "rate"; return run_rate(rc); }
        if (opt->parsed()) { rc.command = "optimize"; return run_optimize(rc); }
        rc.command = "simulate";
        return run_simulate(rc);
    } catch (const ffr::SolverError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
}
