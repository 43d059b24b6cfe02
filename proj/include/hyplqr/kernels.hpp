#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (used by the
// pipeline) and a serial reference kept for tests and benchmarks; both must
// produce bitwise-identical results.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hyplqr::kernels {

// Backward-difference transport term of the method of lines.
//   state:  n * (N + 1) node-major values, node 0 is the inflow boundary
//   speeds: n * N node-major diagonal of D at nodes 1..N
//   out:    n * N,  out[(k-1) n + i] = speeds * (state_k - state_{k-1}) / h
// With follow_sign, nodes whose speed is positive (leftward characteristics)
// take the forward difference instead, with a zero-gradient ghost past node N.
struct TransportView {
    std::span<const double> speeds;
    std::span<const double> state;
    int n_states;
    double inv_h;
    bool follow_sign = false;
};

// Pointwise Riccati-PDE residual on kernel samples; see lqr.hpp.
struct ResidualView {
    const Eigen::MatrixXd* kernel;   // n_s x n_s, kernel scaling, nodes 1..N
    const Eigen::MatrixXd* speeds;   // n x (N + 1), diagonal of D0 at nodes 0..N
    const std::vector<Eigen::MatrixXd>* coupling;  // E0 at nodes 0..N
    const Eigen::MatrixXd* weight;   // Q kernel, n_s x n_s
    const Eigen::MatrixXd* quadratic;  // rectangle-rule P G R^-1 G^T P, n_s x n_s
    int n_states;
    double h;
    int first_node;  // evaluated nodes k1, k2 in [first_node, last_node]
    int last_node;
};

namespace serial {
void upwind_transport(const TransportView& v, std::span<double> out);
void riccati_residual(const ResidualView& v, Eigen::MatrixXd& out);
}  // namespace serial

namespace parallel {
void upwind_transport(const TransportView& v, std::span<double> out);
void riccati_residual(const ResidualView& v, Eigen::MatrixXd& out);
}  // namespace parallel

}  // namespace hyplqr::kernels
