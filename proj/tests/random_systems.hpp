#pragma once

// Seeded random test systems shared by the unit tests and the acceptance run.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace hyplqr::testing {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) M(i, j) = d(rng);
    return M;
}

struct RandomCare {
    Eigen::MatrixXd F, G, Q, R;
};

// Generic (F, G) is controllable and Q is positive definite, so a stabilizing
// solution exists. F is not assumed stable.
inline RandomCare random_care(std::mt19937_64& rng, int n, int m) {
    RandomCare s;
    s.F = gaussian(rng, n, n, 1.0 / std::sqrt(double(n)));
    s.G = gaussian(rng, n, m);
    const Eigen::MatrixXd M = gaussian(rng, n, n, 1.0 / std::sqrt(double(n)));
    s.Q = M.transpose() * M + 0.5 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd N = gaussian(rng, m, m, 0.3);
    s.R = N.transpose() * N + Eigen::MatrixXd::Identity(m, m);
    return s;
}

// Smallest singular value of [lambda I - F, G] over the eigenvalues of F with
// real part above -0.1 (PBH test with Eigen's solver, independent of ours).
inline double stabilizability_margin(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G) {
    const Eigen::Index n = F.rows();
    double margin = INFINITY;
    for (const auto& lambda : F.eigenvalues()) {
        if (lambda.real() <= -0.1) continue;
        Eigen::MatrixXcd pbh(n, n + G.cols());
        pbh << lambda * Eigen::MatrixXcd::Identity(n, n) - F.cast<std::complex<double>>(), G.cast<std::complex<double>>();
        margin = std::min(margin, Eigen::JacobiSVD<Eigen::MatrixXcd>(pbh).singularValues().minCoeff());
    }
    return margin;
}

// random_care redrawn until the PBH margin is at least 0.1, so the Riccati ODE
// oracle converges within a moderate horizon.
inline RandomCare random_stabilizable_care(std::mt19937_64& rng, int n, int m, int* redraws = nullptr) {
    for (;;) {
        RandomCare s = random_care(rng, n, m);
        if (stabilizability_margin(s.F, s.G) >= 0.1) return s;
        if (redraws) ++*redraws;
    }
}

// Hurwitz matrix: random matrix shifted left of its spectral abscissa.
inline Eigen::MatrixXd random_hurwitz(std::mt19937_64& rng, int n) {
    Eigen::MatrixXd A = gaussian(rng, n, n);
    const double shift = A.eigenvalues().real().maxCoeff() + 0.1 + std::uniform_real_distribution<double>(0, 1)(rng);
    A.diagonal().array() -= shift;
    return A;
}

}  // namespace hyplqr::testing
