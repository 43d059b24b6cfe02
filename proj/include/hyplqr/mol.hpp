#pragma once

#include <Eigen/Dense>

#include "hyplqr/grid.hpp"
#include "hyplqr/models.hpp"

namespace hyplqr {

// How a point control enters its cell: unit column (G_{k,j} = 1) or the
// mesh-consistent discrete delta (1 / h).
enum class PointScaling { unit, delta };

// N x m matrix W: control j acts on node k (1..N) with weight W(k-1, j).
// Node k stands for the upwind cell (xi_{k-1}, xi_k]; patches are sampled at
// the cell midpoint. Point locations must coincide with nodes 1..N.
Eigen::MatrixXd input_weights(const Actuation& act, const Grid& grid, PointScaling scaling);

// Method-of-lines right-hand side at nodes 1..N (n x N) for a state sampled
// at nodes 0..N (n x (N+1)), backward differences, controls nu.
Eigen::MatrixXd mol_rhs(const HyperbolicModel& model, const Grid& grid, const Eigen::MatrixXd& state,
                        const Eigen::VectorXd& controls, const Eigen::MatrixXd& weights);

}  // namespace hyplqr
