#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyplqr/linearize.hpp"
#include "hyplqr/models.hpp"
#include "hyplqr/mol.hpp"
#include "hyplqr/profile.hpp"

namespace hyplqr {

struct SimConfig {
    double t_final = 20.0;
    double dt = 0.05;
    Eigen::VectorXd z0;  // n N, node-major like LinearSystem
    std::function<Eigen::VectorXd(double)> boundary;  // z(t, 0); zero when empty
    double cfl_safety = 0.9;
    PointScaling point_scaling = PointScaling::unit;
};

struct SimResult {
    int n_states = 0;
    std::vector<double> nodes;  // xi_1..xi_N
    double h = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> snapshots;  // z(t_k), n N
    std::vector<Eigen::VectorXd> controls;   // u(t_k)
    std::vector<double> envelope;            // ||z(t_k)||_L2
    double final_time = 0.0;
    Eigen::VectorXd final_state;
    int steps = 0;
    double dt = 0.0;  // step actually used (t_final / steps)
};

// sqrt(h sum z^2) over the interior nodes.
double l2_norm(const Eigen::VectorXd& z, double h);

// Nonlinear perturbation dynamics about the profile with u = -K z, RK4,
//   z' = D(zeta^0 + z) (z_k - z_{k-1}) / h + f(zeta^0 + z) - f(zeta^0) + W G(zeta^0) u.
// Where a state excursion flips the sign of a speed, that node switches to the
// forward difference so the scheme stays upwind.
// Throws CflError if dt exceeds cfl_safety h / max|D| at any step,
// DivergenceError on a non-finite state.
SimResult simulate_closed_loop(const HyperbolicModel& model, const Profile& profile, const Eigen::MatrixXd& K,
                               const SimConfig& cfg);

// z' = (F - G K) z. The boundary displacement must be empty.
SimResult simulate_linear(const LinearSystem& sys, const Eigen::MatrixXd& K, const SimConfig& cfg);

// cfl_safety h / (2 max|D|) on the profile; t_final when every speed vanishes.
double cfl_max_dt(const HyperbolicModel& model, const Profile& profile, const SimConfig& cfg);

struct DecayMetrics {
    double half_life = 0.0;
    double fitted_rate = 0.0;
    double monotone_after = 0.0;
    bool unstable = false;
};

// Least-squares fit of log ||z|| over the second half of the snapshots.
// Needs at least 10 snapshots (InvalidArgument otherwise).
DecayMetrics decay_metrics(const SimResult& res);

// t,x,state_index,value (state_index 1-based)
void write_trajectory_csv(const SimResult& res, const std::string& path);
// t,channel,u (channel 1-based)
void write_controls_csv(const SimResult& res, const std::string& path);
void write_sim_summary(const SimResult& res, const DecayMetrics& m, const SimConfig& cfg, const std::string& path);

}  // namespace hyplqr
