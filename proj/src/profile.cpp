#include "hyplqr/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyplqr/csv.hpp"
#include "hyplqr/errors.hpp"

namespace hyplqr {

double reactor_profile_step(const ReactorParams& p, const Grid& grid) {
    const double bound = grid.n_cells() / grid.length() * std::max(p.v1, p.v2) + p.beta +
                         std::abs(p.k1) * std::exp(p.mu);
    return 0.5 / bound;
}

Profile solve_reactor_profile(const ReactorParams& p, const Grid& grid, const Eigen::VectorXd& nu0,
                              const ProfileSolveOptions& opts) {
    if (!(opts.tol > 0.0)) throw InvalidArgument("profile tolerance must be positive");
    const HyperbolicModel model = reactor_model(p);
    if (nu0.size() != model.n_controls)
        throw InvalidArgument("reactor profile needs " + std::to_string(model.n_controls) + " reference controls");
    const int n = model.n_states;
    const int N = grid.n_cells();
    const Eigen::MatrixXd W = input_weights(model.actuation, grid, PointScaling::unit);

    Eigen::MatrixXd y = opts.initial.value_or(Eigen::MatrixXd::Zero(n, N + 1));
    if (y.rows() != n || y.cols() != N + 1) throw InvalidArgument("initial profile has wrong shape");
    y.col(0) = model.boundary;

    const double dt = reactor_profile_step(p, grid);
    const auto rhs = [&](const Eigen::MatrixXd& s) {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, N + 1);
        d.rightCols(N) = mol_rhs(model, grid, s, nu0, W);
        return d;
    };

    double t = 0.0;
    double residual = 0.0;
    while (true) {
        const Eigen::MatrixXd k1 = rhs(y);
        residual = k1.cwiseAbs().maxCoeff();
        if (!std::isfinite(residual)) throw DivergenceError("reactor profile diverged", t);
        if (residual <= opts.tol) break;
        if (t >= opts.t_max)
            throw ConvergenceError("reactor profile not steady by t = " + std::to_string(opts.t_max) +
                                       " (residual " + std::to_string(residual) + ")",
                                   residual);
        const Eigen::MatrixXd k2 = rhs(y + 0.5 * dt * k1);
        const Eigen::MatrixXd k3 = rhs(y + 0.5 * dt * k2);
        const Eigen::MatrixXd k4 = rhs(y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        if (!y.allFinite()) throw DivergenceError("reactor profile diverged", t);
    }
    return Profile{grid, y, nu0};
}

Profile traffic_profile(const TrafficParams& p, const Grid& grid) {
    p.validate();
    if (grid.n_cells() % 5 != 0)
        throw InvalidArgument("traffic grid needs N divisible by 5, got " + std::to_string(grid.n_cells()));
    const int m = static_cast<int>(p.interchanges.size());
    std::vector<int> at(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        at[static_cast<std::size_t>(j)] = grid.node_index(p.interchanges[static_cast<std::size_t>(j)]);
        if (at[static_cast<std::size_t>(j)] < 1)
            throw InvalidArgument("interchange is not a grid node");
    }
    Eigen::VectorXd nu0 = Eigen::VectorXd::Constant(m, 0.02 * p.rho_C);
    Eigen::MatrixXd values(1, grid.n_nodes());
    for (int k = 0; k <= grid.n_cells(); ++k) {
        double rho = 0.9 * p.rho_C;
        for (int j = 0; j < m; ++j)
            if (k >= at[static_cast<std::size_t>(j)]) rho += p.G[static_cast<std::size_t>(j)] * nu0[j];
        values(0, k) = rho;
    }
    return Profile{grid, values, nu0};
}

Eigen::MatrixXd steady_residual_field(const HyperbolicModel& model, const Profile& profile,
                                      const Eigen::VectorXd& nu0, PointScaling scaling) {
    if (profile.n_states() != model.n_states) throw InvalidArgument("profile does not match model");
    const Eigen::MatrixXd W = input_weights(model.actuation, profile.grid, scaling);
    return mol_rhs(model, profile.grid, profile.values, nu0, W);
}

double steady_residual(const HyperbolicModel& model, const Profile& profile, const Eigen::VectorXd& nu0,
                       PointScaling scaling) {
    return steady_residual_field(model, profile, nu0, scaling).cwiseAbs().maxCoeff();
}

void write_profile_csv(const Profile& profile, const std::string& path) {
    std::vector<std::string> header{"x"};
    for (int i = 1; i <= profile.n_states(); ++i) header.push_back("state_" + std::to_string(i));
    CsvWriter w(path, header);
    std::vector<double> r(header.size());
    for (int k = 0; k < profile.grid.n_nodes(); ++k) {
        r[0] = profile.grid.node(k);
        for (int i = 0; i < profile.n_states(); ++i) r[static_cast<std::size_t>(i) + 1] = profile.values(i, k);
        w.row(r);
    }
}

}  // namespace hyplqr
