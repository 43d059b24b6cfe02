#include "hyplqr/kernels.hpp"

#include <cstddef>

namespace hyplqr::kernels {

namespace {

inline void transport_node(const TransportView& v, int k, std::span<double> out) {
    const int n = v.n_states;
    for (int i = 0; i < n; ++i) {
        const std::size_t cur = static_cast<std::size_t>(k * n + i);
        const std::size_t prev = static_cast<std::size_t>((k - 1) * n + i);
        const double d = v.speeds[prev];
        if (v.follow_sign && d > 0.0) {
            const std::size_t next = cur + static_cast<std::size_t>(n);
            const double ahead = next < v.state.size() ? v.state[next] : v.state[cur];
            out[prev] = d * (ahead - v.state[cur]) * v.inv_h;
        } else {
            out[prev] = d * (v.state[cur] - v.state[prev]) * v.inv_h;
        }
    }
}

// Residual block at nodes (k1, k2), written into out.
inline void residual_block(const ResidualView& v, int k1, int k2, Eigen::MatrixXd& out) {
    const int n = v.n_states;
    const auto& P = *v.kernel;
    const auto& D = *v.speeds;
    const auto& E = *v.coupling;
    const double inv2h = 0.5 / v.h;
    const auto at = [n](int k, int i) { return (k - 1) * n + i; };
    const auto& E1 = E[static_cast<std::size_t>(k1)];
    const auto& E2 = E[static_cast<std::size_t>(k2)];
    for (int i = 0; i < n; ++i) {
        const double d1 = D(i, k1);
        const double dd1 = (D(i, k1 + 1) - D(i, k1 - 1)) * inv2h;
        for (int j = 0; j < n; ++j) {
            const double d2 = D(j, k2);
            const double dd2 = (D(j, k2 + 1) - D(j, k2 - 1)) * inv2h;
            const double p = P(at(k1, i), at(k2, j));
            const double dp1 = (P(at(k1 + 1, i), at(k2, j)) - P(at(k1 - 1, i), at(k2, j))) * inv2h;
            const double dp2 = (P(at(k1, i), at(k2 + 1, j)) - P(at(k1, i), at(k2 - 1, j))) * inv2h;
            double r = -d1 * dp1 - dd1 * p - dp2 * d2 - p * dd2;
            for (int l = 0; l < n; ++l) {
                r += E1(l, i) * P(at(k1, l), at(k2, j));
                r += P(at(k1, i), at(k2, l)) * E2(l, j);
            }
            r += (*v.weight)(at(k1, i), at(k2, j)) - (*v.quadratic)(at(k1, i), at(k2, j));
            out(at(k1, i), at(k2, j)) = r;
        }
    }
}

void prepare(const ResidualView& v, Eigen::MatrixXd& out) {
    const auto ns = v.kernel->rows();
    if (out.rows() != ns || out.cols() != ns) out.resize(ns, ns);
    out.setZero();
}

}  // namespace

namespace serial {

void upwind_transport(const TransportView& v, std::span<double> out) {
    const int N = static_cast<int>(v.speeds.size()) / v.n_states;
    for (int k = 1; k <= N; ++k) transport_node(v, k, out);
}

void riccati_residual(const ResidualView& v, Eigen::MatrixXd& out) {
    prepare(v, out);
    for (int k1 = v.first_node; k1 <= v.last_node; ++k1)
        for (int k2 = v.first_node; k2 <= v.last_node; ++k2) residual_block(v, k1, k2, out);
}

}  // namespace serial

namespace parallel {

void upwind_transport(const TransportView& v, std::span<double> out) {
    const int N = static_cast<int>(v.speeds.size()) / v.n_states;
#pragma omp parallel for schedule(static) if (N * v.n_states > 4096)
    for (int k = 1; k <= N; ++k) transport_node(v, k, out);
}

void riccati_residual(const ResidualView& v, Eigen::MatrixXd& out) {
    prepare(v, out);
#pragma omp parallel for schedule(static)
    for (int k1 = v.first_node; k1 <= v.last_node; ++k1)
        for (int k2 = v.first_node; k2 <= v.last_node; ++k2) residual_block(v, k1, k2, out);
}

}  // namespace parallel

}  // namespace hyplqr::kernels
