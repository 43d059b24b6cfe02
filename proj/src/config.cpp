#include "hyplqr/config.hpp"

#include <fstream>
#include <set>

#include "hyplqr/errors.hpp"

namespace hyplqr {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& dst) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        dst = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

}  // namespace

Config parse_config(const json& j) {
    Config c;
    reject_unknown(j, "config", {"schema_version", "reactor", "traffic", "discretization", "profile", "simulation"});
    read(j, "config", "schema_version", c.schema_version);
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));

    if (const auto it = j.find("reactor"); it != j.end()) {
        const std::string w = "reactor";
        reject_unknown(*it, w, {"v1", "v2", "k1", "k2", "mu", "beta", "T_in", "C_A_in", "n_patches", "nu0"});
        auto& r = c.reactor;
        read(*it, w, "v1", r.v1);
        read(*it, w, "v2", r.v2);
        read(*it, w, "k1", r.k1);
        read(*it, w, "k2", r.k2);
        read(*it, w, "mu", r.mu);
        read(*it, w, "beta", r.beta);
        read(*it, w, "T_in", r.T_in);
        read(*it, w, "C_A_in", r.C_A_in);
        read(*it, w, "n_patches", r.n_patches);
        read(*it, w, "nu0", r.nu0);
    }
    if (const auto it = j.find("traffic"); it != j.end()) {
        const std::string w = "traffic";
        reject_unknown(*it, w, {"rho_M", "rho_C", "v_M", "v_C", "L", "interchanges", "G"});
        auto& t = c.traffic;
        read(*it, w, "rho_M", t.rho_M);
        read(*it, w, "rho_C", t.rho_C);
        read(*it, w, "v_M", t.v_M);
        read(*it, w, "v_C", t.v_C);
        read(*it, w, "L", t.L);
        read(*it, w, "interchanges", t.interchanges);
        read(*it, w, "G", t.G);
    }
    if (const auto it = j.find("discretization"); it != j.end()) {
        const std::string w = "discretization";
        reject_unknown(*it, w, {"n_cells", "weights", "point_scaling"});
        read(*it, w, "n_cells", c.discretization.n_cells);
        std::string s;
        try {
            if (it->contains("weights")) {
                read(*it, w, "weights", s);
                c.discretization.weights = parse_weight_mode(s);
            }
            if (it->contains("point_scaling")) {
                read(*it, w, "point_scaling", s);
                c.discretization.point_scaling = parse_point_scaling(s);
            }
        } catch (const InvalidArgument& e) {
            throw ConfigError(w + ": " + e.what());
        }
    }
    if (const auto it = j.find("profile"); it != j.end()) {
        const std::string w = "profile";
        reject_unknown(*it, w, {"tol", "t_max"});
        read(*it, w, "tol", c.profile.tol);
        read(*it, w, "t_max", c.profile.t_max);
    }
    if (const auto it = j.find("simulation"); it != j.end()) {
        const std::string w = "simulation";
        reject_unknown(*it, w,
                       {"t_final", "dt", "cfl_safety", "amplitude", "noise", "boundary_amplitude", "boundary_decay"});
        auto& s = c.simulation;
        read(*it, w, "t_final", s.t_final);
        if (it->contains("dt") && !(*it)["dt"].is_null()) {
            double dt = 0.0;
            read(*it, w, "dt", dt);
            s.dt = dt;
        }
        read(*it, w, "cfl_safety", s.cfl_safety);
        read(*it, w, "amplitude", s.amplitude);
        read(*it, w, "noise", s.noise);
        read(*it, w, "boundary_amplitude", s.boundary_amplitude);
        read(*it, w, "boundary_decay", s.boundary_decay);
    }

    try {
        c.reactor.validate();
        c.traffic.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (c.discretization.n_cells < 2) throw ConfigError("discretization.n_cells must be at least 2");
    if (!(c.profile.tol > 0.0) || !(c.profile.t_max > 0.0)) throw ConfigError("profile.tol and t_max must be positive");
    const auto& s = c.simulation;
    if (!(s.t_final > 0.0)) throw ConfigError("simulation.t_final must be positive");
    if (s.dt && !(*s.dt > 0.0)) throw ConfigError("simulation.dt must be positive");
    if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) throw ConfigError("simulation.cfl_safety must be in (0, 1]");
    if (s.noise < 0.0) throw ConfigError("simulation.noise must be non-negative");
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json to_json(const Config& c) {
    nlohmann::ordered_json j;
    j["schema_version"] = c.schema_version;
    const auto& r = c.reactor;
    j["reactor"] = {{"v1", r.v1},     {"v2", r.v2},     {"k1", r.k1},         {"k2", r.k2},
                    {"mu", r.mu},     {"beta", r.beta}, {"T_in", r.T_in},     {"C_A_in", r.C_A_in},
                    {"n_patches", r.n_patches},         {"nu0", r.nu0}};
    const auto& t = c.traffic;
    j["traffic"] = {{"rho_M", t.rho_M}, {"rho_C", t.rho_C}, {"v_M", t.v_M}, {"v_C", t.v_C},
                    {"L", t.L},         {"interchanges", t.interchanges}, {"G", t.G}};
    j["discretization"] = {{"n_cells", c.discretization.n_cells},
                           {"weights", c.discretization.weights ? nlohmann::ordered_json(to_string(*c.discretization.weights))
                                                                 : nlohmann::ordered_json()},
                           {"point_scaling", to_string(c.discretization.point_scaling)}};
    j["profile"] = {{"tol", c.profile.tol}, {"t_max", c.profile.t_max}};
    const auto& s = c.simulation;
    j["simulation"] = {{"t_final", s.t_final},
                       {"dt", s.dt ? nlohmann::ordered_json(*s.dt) : nlohmann::ordered_json()},
                       {"cfl_safety", s.cfl_safety},
                       {"amplitude", s.amplitude},
                       {"noise", s.noise},
                       {"boundary_amplitude", s.boundary_amplitude},
                       {"boundary_decay", s.boundary_decay}};
    return j;
}

}  // namespace hyplqr
