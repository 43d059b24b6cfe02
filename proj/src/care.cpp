#include <cmath>
#include <limits>
#include <string>

#include "hyplqr/care.hpp"
#include "hyplqr/errors.hpp"

namespace hyplqr {

namespace {

DenseMatrix symmetrize(const DenseMatrix& X) { return 0.5 * (X + X.transpose()); }

void require_square(const DenseMatrix& A, const char* what) {
    if (A.rows() != A.cols()) throw InvalidArgument(std::string(what) + " must be square");
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> schur_blocks(const DenseMatrix& T) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;  // (start, size)
    for (Eigen::Index k = 0; k < T.rows();) {
        const Eigen::Index sz = (k + 1 < T.rows() && T(k + 1, k) != 0.0) ? 2 : 1;
        blocks.emplace_back(k, sz);
        k += sz;
    }
    return blocks;
}

DenseMatrix gain_input(const DenseMatrix& G, const DenseMatrix& R) {
    // S = G R^-1 G^T
    const Eigen::LLT<DenseMatrix> llt(R);
    if (llt.info() != Eigen::Success) throw InvalidArgument("R must be symmetric positive definite");
    return G * llt.solve(G.transpose());
}

}  // namespace

DenseMatrix solve_lyapunov(const DenseMatrix& A, const DenseMatrix& C) {
    require_square(A, "Lyapunov A");
    if (C.rows() != A.rows() || C.cols() != A.cols()) throw InvalidArgument("Lyapunov C has wrong shape");
    const Eigen::Index n = A.rows();
    const SchurDecomposition s = real_schur(A);
    const DenseMatrix& T = s.T;
    const DenseMatrix Ct = s.Q.transpose() * C * s.Q;
    const double scale = std::max(T.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

    // T^T Y + Y T = -Ct, block row i ascending, block column j ascending
    DenseMatrix Y = DenseMatrix::Zero(n, n);
    const auto blocks = schur_blocks(T);
    for (const auto& [ri, si] : blocks) {
        for (const auto& [rj, sj] : blocks) {
            DenseMatrix rhs = -Ct.block(ri, rj, si, sj);
            if (ri > 0) rhs -= T.block(0, ri, ri, si).transpose() * Y.block(0, rj, ri, sj);
            if (rj > 0) rhs -= Y.block(ri, 0, si, rj) * T.block(0, rj, rj, sj);
            // (I (x) Tii^T + Tjj^T (x) I) vec(Y_ij) = vec(rhs)
            const Eigen::Index q = si, p = sj;
            DenseMatrix M = DenseMatrix::Zero(p * q, p * q);
            const DenseMatrix Tii_t = T.block(ri, ri, si, si).transpose();
            const DenseMatrix Tjj = T.block(rj, rj, sj, sj);
            for (Eigen::Index c = 0; c < p; ++c) M.block(c * q, c * q, q, q) += Tii_t;
            for (Eigen::Index r = 0; r < p; ++r)
                for (Eigen::Index c = 0; c < p; ++c) M.block(c * q, r * q, q, q).diagonal().array() += Tjj(r, c);
            const Eigen::FullPivLU<DenseMatrix> lu(M);
            const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
            if (!(pivot > 1e3 * std::numeric_limits<double>::epsilon() * scale))
                throw SingularEquationError("Lyapunov operator singular: A and -A share an eigenvalue");
            const Eigen::VectorXd y = lu.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), p * q));
            Y.block(ri, rj, si, sj) = Eigen::Map<const DenseMatrix>(y.data(), q, p);
        }
    }
    DenseMatrix X = s.Q * Y * s.Q.transpose();
    // symmetric data has a symmetric solution; remove the roundoff asymmetry
    if (C == C.transpose()) X = symmetrize(X);
    return X;
}

double care_residual(const DenseMatrix& F, const DenseMatrix& G, const DenseMatrix& Q, const DenseMatrix& R,
                     const DenseMatrix& P) {
    const DenseMatrix S = gain_input(G, R);
    const DenseMatrix res = F.transpose() * P + P * F - P * S * P + Q;
    const double pn = P.norm();
    const double denom = Q.norm() + 2.0 * F.norm() * pn + S.norm() * pn * pn;
    if (denom == 0.0) return res.norm();
    return res.norm() / denom;
}

CareSolution solve_care(const DenseMatrix& F, const DenseMatrix& G, const DenseMatrix& Q, const DenseMatrix& R) {
    require_square(F, "CARE F");
    require_square(Q, "CARE Q");
    require_square(R, "CARE R");
    const Eigen::Index n = F.rows();
    if (G.rows() != n || Q.rows() != n || G.cols() != R.rows())
        throw InvalidArgument("CARE dimensions do not agree");
    const DenseMatrix S = gain_input(G, R);

    DenseMatrix H(2 * n, 2 * n);
    H << F, -S, -Q, -F.transpose();
    const Eigen::VectorXd d = balance(H);
    SchurDecomposition sch = real_schur(H);

    const double hnorm = H.cwiseAbs().maxCoeff();
    for (const auto& ev : schur_eigenvalues(sch.T))
        if (std::abs(ev.real()) <= 1e3 * std::numeric_limits<double>::epsilon() * hnorm)
            throw SynthesisError("Hamiltonian has eigenvalues on the imaginary axis; (F, G) not stabilizable "
                                 "or (F, Q) not detectable");
    const int k = reorder_schur(sch, [](std::complex<double> z) { return z.real() < 0.0; });
    if (k != n)
        throw SynthesisError("Hamiltonian has " + std::to_string(k) + " stable eigenvalues, expected " +
                             std::to_string(n));

    const DenseMatrix U = d.asDiagonal() * sch.Q.leftCols(n);
    const DenseMatrix X1 = U.topRows(n);
    const DenseMatrix X2 = U.bottomRows(n);
    const Eigen::PartialPivLU<DenseMatrix> lu(X1.transpose());
    const double rcond = lu.rcond();

    CareSolution out;
    out.basis_condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    out.ill_conditioned = out.basis_condition > 1e12;
    if (!std::isfinite(out.basis_condition))
        throw SynthesisError("stable invariant subspace is not a graph; no stabilizing solution");
    out.P = symmetrize(lu.solve(X2.transpose()).transpose());
    out.residual = care_residual(F, G, Q, R, out.P);

    // Newton-Kleinman refinement: (F - S P)^T X + X (F - S P) + Q + P S P = 0
    const DenseMatrix Acl = F - S * out.P;
    if (eigenvalues(Acl).abscissa() < 0.0) {
        try {
            DenseMatrix X = solve_lyapunov(Acl, symmetrize(Q + out.P * S * out.P));
            const double r = care_residual(F, G, Q, R, X);
            if (X.allFinite() && r < out.residual) {
                out.P = std::move(X);
                out.residual = r;
                out.refined = true;
            }
        } catch (const SingularEquationError&) {
        }
    }

    if (!out.P.allFinite()) throw SynthesisError("CARE solution is not finite");
    if (eigenvalues(F - S * out.P).abscissa() >= 0.0)
        throw SynthesisError("closed loop F - G K is not Hurwitz");
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(out.P, Eigen::EigenvaluesOnly);
    const double pmax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-10 * pmax) throw SynthesisError("CARE solution is not PSD");
    return out;
}

DenseMatrix riccati_ode_oracle(const DenseMatrix& F, const DenseMatrix& G, const DenseMatrix& Q,
                               const DenseMatrix& R, double horizon, double dt) {
    require_square(F, "oracle F");
    const Eigen::Index n = F.rows();
    if (n > 10) throw InvalidArgument("riccati_ode_oracle is test-scale only (n <= 10)");
    if (!(dt > 0.0) || !(horizon > 0.0)) throw InvalidArgument("oracle needs positive dt and horizon");
    const DenseMatrix S = gain_input(G, R);
    const auto f = [&](const DenseMatrix& P) -> DenseMatrix {
        return F.transpose() * P + P * F - P * S * P + Q;
    };
    DenseMatrix P = DenseMatrix::Zero(n, n);
    for (double t = 0.0;; t += dt) {
        const DenseMatrix k1 = f(P);
        const double rate = k1.norm();
        if (!std::isfinite(rate)) throw OracleError("Riccati ODE oracle diverged");
        if (rate <= 1e-10 * std::max(1.0, P.norm())) return symmetrize(P);
        if (t > horizon)
            throw OracleError("Riccati ODE oracle not converged by horizon (rate " + std::to_string(rate) + ")");
        const DenseMatrix k2 = f(P + 0.5 * dt * k1);
        const DenseMatrix k3 = f(P + 0.5 * dt * k2);
        const DenseMatrix k4 = f(P + dt * k3);
        P += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

}  // namespace hyplqr
