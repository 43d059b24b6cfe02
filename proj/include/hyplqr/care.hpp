#pragma once

// Dense eigenvalue, Lyapunov and Riccati solvers.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hyplqr {

using DenseMatrix = Eigen::MatrixXd;

// Eigenvalues sorted by descending real part (then descending imaginary part).
struct Spectrum {
    std::vector<std::complex<double>> values;

    [[nodiscard]] double abscissa() const;  // max real part
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// A = Q T Q^T, Q orthogonal, T quasi-upper-triangular. 2x2 diagonal blocks
// hold complex-conjugate pairs only and are in standard form (equal diagonal).
struct SchurDecomposition {
    DenseMatrix Q;
    DenseMatrix T;
};

// Hessenberg reduction followed by Francis double-shift QR.
// Throws NumericalError after 30 n iterations without convergence.
SchurDecomposition real_schur(const DenseMatrix& A);

// Eigenvalues of the diagonal blocks of a quasi-triangular T, in block order.
std::vector<std::complex<double>> schur_eigenvalues(const DenseMatrix& T);

// Moves the blocks whose eigenvalues satisfy `select` to the top-left,
// updating Q and T by orthogonal similarities. Returns the leading dimension.
int reorder_schur(SchurDecomposition& s, const std::function<bool(std::complex<double>)>& select);

// Diagonal similarity scaling (powers of 2): on return A <- D^-1 A D; returns diag(D).
Eigen::VectorXd balance(DenseMatrix& A);

// Eigenvalues: eigenvalues isolated by permutation are read off the diagonal
// exactly; the rest via balancing + real_schur.
Spectrum eigenvalues(const DenseMatrix& A);

// Solves A^T X + X A + C = 0 (Bartels-Stewart on the real Schur form of A).
// Throws SingularEquationError when A and -A share an eigenvalue.
DenseMatrix solve_lyapunov(const DenseMatrix& A, const DenseMatrix& C);

struct CareSolution {
    DenseMatrix P;
    double residual = 0.0;        // relative Riccati residual
    double basis_condition = 1.0; // 1-norm condition estimate of the subspace basis X1
    bool ill_conditioned = false; // basis_condition > 1e12
    bool refined = false;         // Newton-Kleinman step accepted
};

// Stabilizing solution of F^T P + P F - P G R^-1 G^T P + Q = 0 from the stable
// invariant subspace of the Hamiltonian [[F, -G R^-1 G^T], [-Q, -F^T]] (balanced,
// ordered Schur), then one Newton-Kleinman refinement step.
// Throws SynthesisError when no stabilizing solution exists.
CareSolution solve_care(const DenseMatrix& F, const DenseMatrix& G, const DenseMatrix& Q,
                        const DenseMatrix& R);

// ||F^T P + P F - P S P + Q||_F / (||Q||_F + 2 ||F||_F ||P||_F + ||S||_F ||P||_F^2), S = G R^-1 G^T.
double care_residual(const DenseMatrix& F, const DenseMatrix& G, const DenseMatrix& Q, const DenseMatrix& R,
                     const DenseMatrix& P);

// Independent oracle for small systems (n <= 10): RK4 on
//   dP/dt = F^T P + P F - P G R^-1 G^T P + Q,  P(0) = 0
// until ||dP/dt||_F <= 1e-10 max(1, ||P||_F). Throws OracleError if that does not happen by `horizon`.
DenseMatrix riccati_ode_oracle(const DenseMatrix& F, const DenseMatrix& G, const DenseMatrix& Q,
                               const DenseMatrix& R, double horizon, double dt);

}  // namespace hyplqr
