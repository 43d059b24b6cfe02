#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "hyplqr/linearize.hpp"
#include "hyplqr/models.hpp"
#include "hyplqr/mol.hpp"

namespace hyplqr {

inline constexpr int kSchemaVersion = 1;

struct DiscretizationConfig {
    int n_cells = 100;
    // Per-model default when absent: cell_width for traffic (Q = (L/N) I), unit for the reactor.
    std::optional<WeightMode> weights;
    PointScaling point_scaling = PointScaling::unit;

    [[nodiscard]] WeightMode weights_for(const std::string& model) const {
        return weights.value_or(model == "traffic" ? WeightMode::cell_width : WeightMode::unit);
    }
};

struct ProfileConfig {
    double tol = 1e-10;
    double t_max = 500.0;
};

// Initial displacement z(0, x) = scale (amplitude sin(pi x / L) + noise N(0, 1)),
// scale = rho_C for traffic and 1 for the reactor. Boundary displacement
// z(t, 0) = scale boundary_amplitude exp(-boundary_decay t).
struct SimulationConfig {
    double t_final = 20.0;
    std::optional<double> dt;  // cfl_max_dt when absent
    double cfl_safety = 0.9;
    double amplitude = 0.05;
    double noise = 0.0;
    double boundary_amplitude = 0.0;
    double boundary_decay = 1.0;
};

struct Config {
    int schema_version = kSchemaVersion;
    ReactorParams reactor;
    TrafficParams traffic;
    DiscretizationConfig discretization;
    ProfileConfig profile;
    SimulationConfig simulation;
};

// Every key is optional and falls back to the defaults above; unknown keys and
// wrong types raise ConfigError naming the offending path.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);
nlohmann::ordered_json to_json(const Config& c);

}  // namespace hyplqr
