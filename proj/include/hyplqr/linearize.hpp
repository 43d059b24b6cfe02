#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyplqr/grid.hpp"
#include "hyplqr/models.hpp"
#include "hyplqr/mol.hpp"
#include "hyplqr/profile.hpp"

namespace hyplqr {

// Coefficients of the linearization about a profile, sampled at nodes 0..N.
struct LinearCoefficients {
    Grid grid;
    int n_states = 0;
    int n_controls = 0;
    Eigen::MatrixXd D0;               // n x (N + 1), diagonal of D(x, zeta^0)
    std::vector<Eigen::MatrixXd> E0;  // per node, n x n
    std::vector<Eigen::MatrixXd> G0;  // per node, n x m input directions G_j(zeta^0)
    Actuation actuation;
};

// unit: Q = I; cell_width: Q = h I (rectangle rule of the L2 state cost).
enum class WeightMode { unit, cell_width };

// Discrete LTI model dz/dt = F z + G u with cost weights Q, R.
// States are node-major: z[(k-1) n + i] ~ z_i(t, xi_k), k = 1..N; z_0 = 0.
struct LinearSystem {
    Eigen::MatrixXd F;
    Eigen::MatrixXd G;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;
    Grid grid;
    int n_states = 0;
    int n_controls = 0;
    WeightMode weights = WeightMode::unit;
    PointScaling point_scaling = PointScaling::unit;

    [[nodiscard]] int dim() const { return static_cast<int>(F.rows()); }
};

// Throws SingularityError when the model's coefficients are singular on the profile.
LinearCoefficients linearize(const HyperbolicModel& model, const Profile& profile);

// Backward differences; fills F and G, leaves Q and R empty.
LinearSystem discretize(const LinearCoefficients& co, PointScaling scaling = PointScaling::unit);

// (Q, R) = (c I_{nN}, I_m) with c = 1 (unit) or h (cell_width).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_weights(const Grid& grid, int n, int m, WeightMode mode);

// linearize + discretize + build_weights.
LinearSystem assemble_system(const HyperbolicModel& model, const Profile& profile, WeightMode mode,
                             PointScaling scaling = PointScaling::unit);

std::string to_string(WeightMode mode);
WeightMode parse_weight_mode(const std::string& s);
std::string to_string(PointScaling scaling);
PointScaling parse_point_scaling(const std::string& s);

// F.csv, G.csv, Q.csv, R.csv and system.json (grid and mode metadata) under dir.
// Returns the written paths.
std::vector<std::string> write_linear_system(const LinearSystem& sys, const std::string& dir);

}  // namespace hyplqr
