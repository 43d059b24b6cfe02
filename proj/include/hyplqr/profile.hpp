#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "hyplqr/grid.hpp"
#include "hyplqr/models.hpp"
#include "hyplqr/mol.hpp"

namespace hyplqr {

// Reference profile zeta^0 sampled at the grid nodes with its generating controls nu^0.
struct Profile {
    Grid grid;
    Eigen::MatrixXd values;              // n x (N + 1)
    Eigen::VectorXd reference_controls;  // nu^0

    [[nodiscard]] int n_states() const { return static_cast<int>(values.rows()); }
};

struct ProfileSolveOptions {
    double t_max = 500.0;
    double tol = 1e-10;
    std::optional<Eigen::MatrixXd> initial;  // n x (N + 1); zero when absent
};

// Equilibrium of the 2N-dimensional reactor MoL ODE by explicit RK4 in time
// until max |d theta / dt| <= tol. Inlet theta(t, 0) = 0.
// Throws ConvergenceError (t_max reached) or DivergenceError (non-finite state).
Profile solve_reactor_profile(const ReactorParams& p, const Grid& grid, const Eigen::VectorXd& nu0,
                              const ProfileSolveOptions& opts = {});

// RK4 step used by solve_reactor_profile.
double reactor_profile_step(const ReactorParams& p, const Grid& grid);

// Piecewise-constant right-continuous density: 0.9 rho_C at the inflow, jump of
// G_j nu^0_j = 0.02 rho_C at each interchange. N must be divisible by 5.
Profile traffic_profile(const TrafficParams& p, const Grid& grid);

// MoL right-hand side at the profile (n x N).
Eigen::MatrixXd steady_residual_field(const HyperbolicModel& model, const Profile& profile,
                                      const Eigen::VectorXd& nu0,
                                      PointScaling scaling = PointScaling::unit);

// Max norm of steady_residual_field.
double steady_residual(const HyperbolicModel& model, const Profile& profile, const Eigen::VectorXd& nu0,
                       PointScaling scaling = PointScaling::unit);

// Header `x,state_1,...,state_n`, one row per node, 17 significant digits.
void write_profile_csv(const Profile& profile, const std::string& path);

}  // namespace hyplqr
