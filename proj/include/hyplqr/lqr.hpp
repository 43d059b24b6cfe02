#pragma once

#include <string>

#include <Eigen/Dense>

#include "hyplqr/care.hpp"
#include "hyplqr/grid.hpp"
#include "hyplqr/linearize.hpp"

namespace hyplqr {

// Feedback u = -K z with K = R^-1 G^T P. The sign lives in the control law,
// so K itself is the usual positive LQR gain.
struct RiccatiSolution {
    DenseMatrix P;
    DenseMatrix K;
    DenseMatrix closed_loop;  // F - G K
    Spectrum closed_loop_spectrum;
    double residual = 0.0;
    double basis_condition = 1.0;
    bool ill_conditioned = false;
    WeightMode weights = WeightMode::unit;
};

RiccatiSolution synthesize(const LinearSystem& sys);

// -max Re(closed-loop spectrum); positive iff the closed loop is stable.
double stability_margin(const RiccatiSolution& sol);

// raw: the discrete P blocks verbatim. kernel: divided by h^2 so that
// z^T P z approximates the double integral of z^T P(x1, x2) z under the rectangle rule.
enum class KernelScaling { raw, kernel };

struct KernelField {
    Grid grid;
    int n_states = 0;
    KernelScaling scaling = KernelScaling::raw;
    DenseMatrix values;  // n N x n N, node-major, nodes 1..N

    // P_ij(xi_k1, xi_k2), nodes 1..N, states 0..n-1.
    [[nodiscard]] double sample(int k1, int k2, int i, int j) const {
        return values((k1 - 1) * n_states + i, (k2 - 1) * n_states + j);
    }
    // N x N samples of the (i, j) component.
    [[nodiscard]] DenseMatrix component(int i, int j) const;
};

KernelField kernel_from_discrete(const DenseMatrix& P, const Grid& grid, int n, KernelScaling scaling);

struct ResidualField {
    DenseMatrix values;  // n N x n N, zero outside the evaluated nodes
    int first_node = 0;
    int last_node = 0;
    double max_abs = 0.0;
    double weak = 0.0;  // |sum phi(x1) r phi(x2)| h^2 with phi = sin(pi x / L)
};

// Pointwise residual of the kernel Riccati PDE at nodes first..last, where
// first = max(2, margin) and last = N - max(1, margin). Transport terms by
// central differences, the quadratic term by the rectangle rule
//   h^2 P W R^-1 W^T P   (W = discrete input matrix, columns G^0_j sampled).
// Throws InvalidArgument for raw scaling or N < 4.
ResidualField riccati_pde_residual(const KernelField& field, const LinearCoefficients& co,
                                   const DenseMatrix& q_kernel, const DenseMatrix& input, const DenseMatrix& R,
                                   int margin = 2);

// Uses Q / h^2 as the weight kernel and the system's G and R.
ResidualField riccati_pde_residual(const KernelField& field, const LinearCoefficients& co,
                                   const LinearSystem& sys, int margin = 2);

// m rows x n_s columns.
void write_gain_csv(const DenseMatrix& K, const std::string& path);
// Long format x1,x2,i,j,value (states 1-based).
void write_kernel_csv(const KernelField& field, const std::string& path);
void write_spectrum_csv(const Spectrum& sp, const std::string& path);

}  // namespace hyplqr
