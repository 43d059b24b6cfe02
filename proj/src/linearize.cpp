#include "hyplqr/linearize.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hyplqr/csv.hpp"
#include "hyplqr/errors.hpp"

namespace hyplqr {

LinearCoefficients linearize(const HyperbolicModel& model, const Profile& profile) {
    if (profile.n_states() != model.n_states) throw InvalidArgument("profile does not match model");
    if (!profile.values.allFinite()) throw InvalidArgument("profile has non-finite entries");
    const Grid& grid = profile.grid;
    const int n = model.n_states;
    const int m = model.n_controls;
    LinearCoefficients co{grid, n, m, Eigen::MatrixXd(n, grid.n_nodes()), {}, {}, model.actuation};
    for (int k = 0; k <= grid.n_cells(); ++k) {
        const Eigen::VectorXd s = profile.values.col(k);
        const double x = grid.node(k);
        co.D0.col(k) = model.speeds(x, s);
        co.E0.push_back(model.E(x, s));
        Eigen::MatrixXd g(n, m);
        for (int j = 0; j < m; ++j) g.col(j) = model.input_direction(j, s);
        co.G0.push_back(std::move(g));
    }
    return co;
}

LinearSystem discretize(const LinearCoefficients& co, PointScaling scaling) {
    const Grid& grid = co.grid;
    const int n = co.n_states;
    const int m = co.n_controls;
    const int N = grid.n_cells();
    const double inv_h = 1.0 / grid.h();
    const Eigen::MatrixXd W = input_weights(co.actuation, grid, scaling);

    LinearSystem sys{Eigen::MatrixXd::Zero(n * N, n * N), Eigen::MatrixXd::Zero(n * N, m), {}, {}, grid, n, m,
                     WeightMode::unit, scaling};
    for (int k = 1; k <= N; ++k) {
        const int r = (k - 1) * n;
        sys.F.block(r, r, n, n) = co.E0[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i) {
            sys.F(r + i, r + i) += co.D0(i, k) * inv_h;
            if (k >= 2) sys.F(r + i, r - n + i) = -co.D0(i, k) * inv_h;
        }
        for (int j = 0; j < m; ++j)
            if (W(k - 1, j) != 0.0)
                sys.G.block(r, j, n, 1) = W(k - 1, j) * co.G0[static_cast<std::size_t>(k)].col(j);
    }
    return sys;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_weights(const Grid& grid, int n, int m, WeightMode mode) {
    const int ns = n * grid.n_cells();
    const double c = mode == WeightMode::unit ? 1.0 : grid.h();
    return {c * Eigen::MatrixXd::Identity(ns, ns), Eigen::MatrixXd::Identity(m, m)};
}

LinearSystem assemble_system(const HyperbolicModel& model, const Profile& profile, WeightMode mode,
                             PointScaling scaling) {
    LinearSystem sys = discretize(linearize(model, profile), scaling);
    std::tie(sys.Q, sys.R) = build_weights(sys.grid, sys.n_states, sys.n_controls, mode);
    sys.weights = mode;
    return sys;
}

std::string to_string(WeightMode mode) { return mode == WeightMode::unit ? "unit" : "cell-width"; }

WeightMode parse_weight_mode(const std::string& s) {
    if (s == "unit") return WeightMode::unit;
    if (s == "cell-width") return WeightMode::cell_width;
    throw InvalidArgument("unknown weight mode '" + s + "' (expected unit or cell-width)");
}

std::string to_string(PointScaling scaling) { return scaling == PointScaling::unit ? "unit" : "delta"; }

PointScaling parse_point_scaling(const std::string& s) {
    if (s == "unit") return PointScaling::unit;
    if (s == "delta") return PointScaling::delta;
    throw InvalidArgument("unknown point scaling '" + s + "' (expected unit or delta)");
}

std::vector<std::string> write_linear_system(const LinearSystem& sys, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    const auto put = [&](const Eigen::MatrixXd& M, const char* name) {
        const auto path = (fs::path(dir) / name).string();
        write_matrix_csv(M, path);
        written.push_back(path);
    };
    put(sys.F, "F.csv");
    put(sys.G, "G.csv");
    put(sys.Q, "Q.csv");
    put(sys.R, "R.csv");

    nlohmann::ordered_json meta;
    meta["grid"] = {{"length", sys.grid.length()}, {"n_cells", sys.grid.n_cells()}, {"h", sys.grid.h()}};
    meta["n_states"] = sys.n_states;
    meta["n_controls"] = sys.n_controls;
    meta["state_dim"] = sys.dim();
    meta["state_ordering"] = "node-major";
    meta["weights"] = to_string(sys.weights);
    meta["point_scaling"] = to_string(sys.point_scaling);
    const auto path = (fs::path(dir) / "system.json").string();
    std::ofstream(path, std::ios::binary) << meta.dump(2) << '\n';
    written.push_back(path);
    return written;
}

}  // namespace hyplqr
