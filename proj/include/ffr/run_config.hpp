#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ffr {

/// Flat record of every CLI flag; serializes losslessly to and from JSON so an
/// invocation can be stored and replayed.
struct RunConfig {
    std::string command;  // coverage | rate | optimize | simulate

    double alpha = 3.0;
    double target_db = 0.0;
    double threshold_db = 0.0;
    std::string mode = "independent";  // independent | correlated
    double cell_radius_m = 577.0;
    double min_radius_m = 0.0;
    double noise_over_power = 0.0;

    int r_steps = 50;

    double sth_start_db = -10.0;
    double sth_stop_db = 10.0;
    double sth_step_db = 0.25;

    std::vector<double> alphas{2.0, 2.5, 3.0, 3.5, 4.0};

    double samples = 1e6;
    std::uint64_t seed = 42;
    unsigned n_streams = 64;
    unsigned threads = 0;  // 0 = FFR_THREADS env or hardware default
    std::string channel;   // "" | pedA | vehA
    std::string check;     // "" | coverage | rate | all

    int radial_nodes = 64;
    int angular_nodes = 16;

    std::string out;      // CSV destination, empty = stdout
    std::string summary;  // JSON summary destination (simulate), empty = stderr
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"command", c.command},
                       {"alpha", c.alpha},
                       {"target_db", c.target_db},
                       {"threshold_db", c.threshold_db},
                       {"mode", c.mode},
                       {"cell_radius_m", c.cell_radius_m},
                       {"min_radius_m", c.min_radius_m},
                       {"noise_over_power", c.noise_over_power},
                       {"r_steps", c.r_steps},
                       {"sth_start_db", c.sth_start_db},
                       {"sth_stop_db", c.sth_stop_db},
                       {"sth_step_db", c.sth_step_db},
                       {"alphas", c.alphas},
                       {"samples", c.samples},
                       {"seed", c.seed},
                       {"n_streams", c.n_streams},
                       {"threads", c.threads},
                       {"channel", c.channel},
                       {"check", c.check},
                       {"radial_nodes", c.radial_nodes},
                       {"angular_nodes", c.angular_nodes},
                       {"out", c.out},
                       {"summary", c.summary}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("command", c.command);
    get("alpha", c.alpha);
    get("target_db", c.target_db);
    get("threshold_db", c.threshold_db);
    get("mode", c.mode);
    get("cell_radius_m", c.cell_radius_m);
    get("min_radius_m", c.min_radius_m);
    get("noise_over_power", c.noise_over_power);
    get("r_steps", c.r_steps);
    get("sth_start_db", c.sth_start_db);
    get("sth_stop_db", c.sth_stop_db);
    get("sth_step_db", c.sth_step_db);
    get("alphas", c.alphas);
    get("samples", c.samples);
    get("seed", c.seed);
    get("n_streams", c.n_streams);
    get("threads", c.threads);
    get("channel", c.channel);
    get("check", c.check);
    get("radial_nodes", c.radial_nodes);
    get("angular_nodes", c.angular_nodes);
    get("out", c.out);
    get("summary", c.summary);
}

} // namespace ffr
