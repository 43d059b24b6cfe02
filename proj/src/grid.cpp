#include "hyplqr/grid.hpp"

#include <cmath>
#include <string>

#include "hyplqr/errors.hpp"

namespace hyplqr {

Grid::Grid(double length, int n_cells) : length_(length), n_cells_(n_cells), h_(0.0) {
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidArgument("grid length must be positive, got " + std::to_string(length));
    if (n_cells < 2)
        throw InvalidArgument("grid needs at least 2 cells, got " + std::to_string(n_cells));
    h_ = length / n_cells;
    nodes_.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int k = 0; k <= n_cells; ++k)
        nodes_[static_cast<std::size_t>(k)] = length * k / n_cells;
    nodes_.back() = length;
}

int Grid::node_index(double x, double tol) const noexcept {
    const double s = x / h_;
    const double r = std::round(s);
    if (std::abs(s - r) > tol || r < 0 || r > n_cells_) return -1;
    return static_cast<int>(r);
}

Grid make_grid(double length, int n_cells) { return Grid(length, n_cells); }

}  // namespace hyplqr
