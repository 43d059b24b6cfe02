#pragma once

#include <cstddef>
#include <vector>

namespace hyplqr {

// Uniform grid on [0, L] with N cells and nodes xi_k = k L / N, k = 0..N.
class Grid {
public:
    Grid(double length, int n_cells);

    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] int n_cells() const noexcept { return n_cells_; }
    [[nodiscard]] int n_nodes() const noexcept { return n_cells_ + 1; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double node(int k) const noexcept { return nodes_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }

    // Midpoint of the upwind cell (xi_{k-1}, xi_k] represented by node k >= 1.
    [[nodiscard]] double cell_midpoint(int k) const noexcept { return node(k) - 0.5 * h_; }

    // Index k with |xi_k - x| <= tol * h, or -1.
    [[nodiscard]] int node_index(double x, double tol = 1e-9) const noexcept;

private:
    double length_;
    int n_cells_;
    double h_;
    std::vector<double> nodes_;
};

// Throws InvalidArgument for N < 2 or L <= 0.
Grid make_grid(double length, int n_cells);

}  // namespace hyplqr
