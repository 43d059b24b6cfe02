#include "hyplqr/lqr.hpp"

#include <cmath>
#include <numbers>

#include "hyplqr/csv.hpp"
#include "hyplqr/errors.hpp"
#include "hyplqr/kernels.hpp"

namespace hyplqr {

RiccatiSolution synthesize(const LinearSystem& sys) {
    const CareSolution care = solve_care(sys.F, sys.G, sys.Q, sys.R);
    RiccatiSolution sol;
    sol.P = care.P;
    sol.K = sys.R.llt().solve(sys.G.transpose() * care.P);
    sol.closed_loop = sys.F - sys.G * sol.K;
    sol.closed_loop_spectrum = eigenvalues(sol.closed_loop);
    sol.residual = care.residual;
    sol.basis_condition = care.basis_condition;
    sol.ill_conditioned = care.ill_conditioned;
    sol.weights = sys.weights;
    return sol;
}

double stability_margin(const RiccatiSolution& sol) { return -sol.closed_loop_spectrum.abscissa(); }

DenseMatrix KernelField::component(int i, int j) const {
    const int N = grid.n_cells();
    DenseMatrix out(N, N);
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) out(a - 1, b - 1) = sample(a, b, i, j);
    return out;
}

KernelField kernel_from_discrete(const DenseMatrix& P, const Grid& grid, int n, KernelScaling scaling) {
    const int ns = n * grid.n_cells();
    if (n < 1 || P.rows() != ns || P.cols() != ns)
        throw InvalidArgument("P is " + std::to_string(P.rows()) + "x" + std::to_string(P.cols()) +
                              ", expected " + std::to_string(ns) + " square");
    const double s = scaling == KernelScaling::raw ? 1.0 : 1.0 / (grid.h() * grid.h());
    return KernelField{grid, n, scaling, s * P};
}

ResidualField riccati_pde_residual(const KernelField& field, const LinearCoefficients& co,
                                   const DenseMatrix& q_kernel, const DenseMatrix& input, const DenseMatrix& R,
                                   int margin) {
    if (field.scaling != KernelScaling::kernel) throw InvalidArgument("residual needs kernel-scaled samples");
    const Grid& grid = field.grid;
    const int N = grid.n_cells();
    if (N < 4) throw InvalidArgument("grid too coarse for central differences (N < 4)");
    const int n = field.n_states;
    const int ns = n * N;
    if (co.n_states != n || co.grid.n_cells() != N) throw InvalidArgument("coefficients do not match kernel");
    if (q_kernel.rows() != ns || q_kernel.cols() != ns || input.rows() != ns || input.cols() != R.rows())
        throw InvalidArgument("residual inputs have wrong shape");

    const int first = std::max(2, margin);
    const int last = N - std::max(1, margin);
    if (first > last) throw InvalidArgument("interior margin leaves no nodes");

    const double h = grid.h();
    const DenseMatrix PW = field.values * input;
    const DenseMatrix quad = h * h * PW * R.llt().solve(PW.transpose());

    ResidualField out;
    out.first_node = first;
    out.last_node = last;
    const kernels::ResidualView view{&field.values, &co.D0, &co.E0, &q_kernel, &quad, n, h, first, last};
    kernels::parallel::riccati_residual(view, out.values);

    double weak = 0.0;
    for (int k1 = first; k1 <= last; ++k1) {
        const double p1 = std::sin(std::numbers::pi * grid.node(k1) / grid.length());
        for (int k2 = first; k2 <= last; ++k2) {
            const double p2 = std::sin(std::numbers::pi * grid.node(k2) / grid.length());
            const auto blk = out.values.block((k1 - 1) * n, (k2 - 1) * n, n, n);
            out.max_abs = std::max(out.max_abs, blk.cwiseAbs().maxCoeff());
            weak += p1 * p2 * blk.sum();
        }
    }
    out.weak = std::abs(weak) * h * h;
    return out;
}

ResidualField riccati_pde_residual(const KernelField& field, const LinearCoefficients& co,
                                   const LinearSystem& sys, int margin) {
    const double h = sys.grid.h();
    return riccati_pde_residual(field, co, sys.Q / (h * h), sys.G, sys.R, margin);
}

void write_gain_csv(const DenseMatrix& K, const std::string& path) { write_matrix_csv(K, path); }

void write_kernel_csv(const KernelField& field, const std::string& path) {
    CsvWriter w(path, {"x1", "x2", "i", "j", "value"});
    const int N = field.grid.n_cells();
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b)
            for (int i = 0; i < field.n_states; ++i)
                for (int j = 0; j < field.n_states; ++j)
                    w.row({field.grid.node(a), field.grid.node(b), double(i + 1), double(j + 1),
                           field.sample(a, b, i, j)});
}

void write_spectrum_csv(const Spectrum& sp, const std::string& path) {
    CsvWriter w(path, {"re", "im"});
    for (const auto& v : sp.values) w.row({v.real(), v.imag()});
}

}  // namespace hyplqr
