#pragma once
#include "fraclab/errors.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace fraclab {

// Uniform grid t_i = i*k on [0, T] with k = T/n_steps.
struct Grid {
    double T = 1.0;
    int n_steps = 1;

    Grid() = default;
    Grid(double T_, int n_steps_) : T(T_), n_steps(n_steps_) {
        if (!(T > 0.0) || !std::isfinite(T)) throw UsageError("Grid: horizon must be positive and finite");
        if (n_steps < 1) throw UsageError("Grid: need at least one step");
    }
    double k() const { return T / n_steps; }
    double t(int i) const { return i * k(); }
    bool operator==(const Grid& o) const { return T == o.T && n_steps == o.n_steps; }
};

// Values on the nodes of a Grid: (n_steps+1) x dim, row-major.
struct Path {
    Grid grid;
    int dim = 1;
    std::vector<double> data;

    Path() = default;
    Path(const Grid& g, int dim_) : grid(g), dim(dim_), data(static_cast<size_t>(g.n_steps + 1) * dim_, 0.0) {
        if (dim_ < 1) throw UsageError("Path: dim must be positive");
    }
    int n_nodes() const { return grid.n_steps + 1; }
    std::span<double> at(int i) { return {data.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)}; }
    std::span<const double> at(int i) const {
        return {data.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
    }
    // scalar accessors for the common dim == 1 case
    double& value(int i) { return data[static_cast<size_t>(i) * dim]; }
    double value(int i) const { return data[static_cast<size_t>(i) * dim]; }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* who) {
    if (!(a == b)) throw GridMismatch(std::string(who) + ": paths live on different grids");
}

} // namespace fraclab
