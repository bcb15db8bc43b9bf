#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "greedy/function_space.hpp"

namespace greedy {

/// Parameters of a discretized ReLU_m ridge family sigma_m(w x + b) on [0,1].
struct ReluFamilySpec {
    int m = 1;
    std::vector<double> w_values{-1.0, 1.0};
    double b_min = -2.0;
    double b_max = 2.0;
    std::size_t b_count = 4001;
    /// When set, every atom is rescaled to unit norm in this space. Off by default.
    std::optional<LpExponent> normalize;

    /// Throws InvalidArgument when the spec violates its invariants.
    void validate() const;
    /// The i-th bias on the uniform grid b_min + i (b_max - b_min)/(b_count - 1).
    double bias(std::size_t i) const;
};

/// Parameter descriptor of a dictionary atom.
struct AtomLabel {
    double w = 0.0;
    double b = 0.0;
    int m = 0;
};

/// sigma_m(t) = max(t,0)^m for m >= 1; the Heaviside step (0 for t <= 0) for m = 0.
double relu_power(double t, int m);

GridFunction relu_atom(int m, double w, double b, GridPtr grid);

/// A finite family of grid functions stored column-wise.
///
/// Atoms that vanish at every grid point are dropped at construction (exact test, no tolerance).
class DiscreteDictionary {
public:
    /// Takes ownership of `atoms` (one column per atom). Throws EmptyDictionary if nothing survives pruning.
    DiscreteDictionary(GridPtr grid, Eigen::MatrixXd atoms, std::vector<AtomLabel> labels);
    DiscreteDictionary(GridPtr grid, const std::vector<GridFunction>& atoms);

    std::size_t size() const noexcept { return static_cast<std::size_t>(atoms_.cols()); }
    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const Eigen::MatrixXd& matrix() const noexcept { return atoms_; }
    const std::vector<AtomLabel>& labels() const noexcept { return labels_; }
    std::size_t pruned() const noexcept { return pruned_; }

    GridFunction atom(std::size_t k) const;
    Eigen::MatrixXd::ConstColXpr column(std::size_t k) const { return atoms_.col(static_cast<Eigen::Index>(k)); }

private:
    GridPtr grid_;
    Eigen::MatrixXd atoms_;
    std::vector<AtomLabel> labels_;
    std::size_t pruned_ = 0;
};

/// Atoms relu_atom(m, w, b) for every w in spec.w_values (outer loop) and every bias (inner loop).
DiscreteDictionary build_relu_dictionary(const ReluFamilySpec& spec, GridPtr grid);

/// Point-evaluation functionals at a subset of grid indices.
class FunctionalSet {
public:
    FunctionalSet(GridPtr grid, std::vector<std::size_t> indices);

    std::size_t size() const noexcept { return indices_.size(); }
    const Grid& grid() const noexcept { return *grid_; }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    /// Grid index evaluated by the k-th functional.
    std::size_t grid_index(std::size_t k) const;

private:
    GridPtr grid_;
    std::vector<std::size_t> indices_;
};

/// Every stride-th grid index, starting at 0.
FunctionalSet build_point_functionals(GridPtr grid, std::size_t stride);

/// Value of f at the k-th functional's point.
double apply_functional(const FunctionalSet& fs, std::size_t k, const GridFunction& f);

} // namespace greedy
