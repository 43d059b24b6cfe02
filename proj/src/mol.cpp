#include "hyplqr/mol.hpp"

#include <span>
#include <string>

#include "hyplqr/errors.hpp"
#include "hyplqr/kernels.hpp"

namespace hyplqr {

Eigen::MatrixXd input_weights(const Actuation& act, const Grid& grid, PointScaling scaling) {
    const int N = grid.n_cells();
    const int m = act.n_channels();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, m);
    if (act.is_patch()) {
        for (int k = 1; k <= N; ++k)
            for (int j = 0; j < m; ++j) W(k - 1, j) = patch_indicator(grid.cell_midpoint(k), j, act);
        return W;
    }
    const double w = scaling == PointScaling::unit ? 1.0 : 1.0 / grid.h();
    const auto& loc = act.point().locations;
    for (int j = 0; j < m; ++j) {
        const int k = grid.node_index(loc[static_cast<std::size_t>(j)]);
        if (k < 1)
            throw InvalidArgument("actuation point " + std::to_string(loc[static_cast<std::size_t>(j)]) +
                                  " is not an interior grid node");
        W(k - 1, j) = w;
    }
    return W;
}

Eigen::MatrixXd mol_rhs(const HyperbolicModel& model, const Grid& grid, const Eigen::MatrixXd& state,
                        const Eigen::VectorXd& controls, const Eigen::MatrixXd& weights) {
    const int n = model.n_states;
    const int N = grid.n_cells();
    Eigen::MatrixXd speeds(n, N);
    Eigen::MatrixXd out(n, N);
    for (int k = 1; k <= N; ++k) {
        const Eigen::VectorXd s = state.col(k);
        const double x = grid.node(k);
        speeds.col(k - 1) = model.speeds(x, s);
        Eigen::VectorXd r = model.source(x, s);
        for (int j = 0; j < model.n_controls; ++j) {
            const double w = weights(k - 1, j);
            if (w != 0.0) r += w * controls[j] * model.input_direction(j, s);
        }
        out.col(k - 1) = r;
    }
    Eigen::MatrixXd transport(n, N);
    kernels::parallel::upwind_transport(
        {std::span<const double>(speeds.data(), static_cast<std::size_t>(speeds.size())),
         std::span<const double>(state.data(), static_cast<std::size_t>(state.size())), n, 1.0 / grid.h()},
        std::span<double>(transport.data(), static_cast<std::size_t>(transport.size())));
    return out + transport;
}

}  // namespace hyplqr
