#include "greedy/dictionary.hpp"

#include <cmath>
#include <set>
#include <string>

namespace greedy {

void ReluFamilySpec::validate() const
{
    if (m < 0) throw InvalidArgument("ReLU family: m must be >= 0");
    if (w_values.empty()) throw InvalidArgument("ReLU family: no directions");
    for (double w : w_values)
        if (w != 1.0 && w != -1.0) throw InvalidArgument("ReLU family: 1D directions must be -1 or +1");
    if (!(b_min < b_max)) throw InvalidArgument("ReLU family: b_min must be < b_max");
    if (b_count < 2) throw InvalidArgument("ReLU family: b_count must be >= 2");
}

double ReluFamilySpec::bias(std::size_t i) const
{
    // Written as min + i*step so that the decimal steps of the experiments come out on the nose.
    return b_min + static_cast<double>(i) * ((b_max - b_min) / static_cast<double>(b_count - 1));
}

double relu_power(double t, int m)
{
    if (t <= 0.0) return 0.0;
    switch (m) {
    case 0: return 1.0;
    case 1: return t;
    case 2: return t * t;
    case 3: return t * t * t;
    default: return std::pow(t, m);
    }
}

GridFunction relu_atom(int m, double w, double b, GridPtr grid)
{
    if (m < 0) throw InvalidArgument("relu_atom: m must be >= 0");
    const Eigen::VectorXd& x = grid->points();
    Eigen::VectorXd v(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) v(i) = relu_power(w * x(i) + b, m);
    return GridFunction(std::move(grid), std::move(v));
}

// ---------------------------------------------------------------------------- DiscreteDictionary

DiscreteDictionary::DiscreteDictionary(GridPtr grid, Eigen::MatrixXd atoms, std::vector<AtomLabel> labels)
    : grid_(std::move(grid)), atoms_(std::move(atoms)), labels_(std::move(labels))
{
    if (!grid_) throw InvalidArgument("dictionary without grid");
    if (static_cast<std::size_t>(atoms_.rows()) != grid_->size()) throw InvalidArgument("dictionary atoms do not match grid");
    if (labels_.empty()) labels_.resize(static_cast<std::size_t>(atoms_.cols()));
    if (labels_.size() != static_cast<std::size_t>(atoms_.cols())) throw InvalidArgument("dictionary labels do not match atoms");
    if (!atoms_.allFinite()) throw InvalidArgument("dictionary has non-finite values");

    // In-place compaction of the nonzero columns.
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
        if ((atoms_.col(j).array() == 0.0).all()) continue;
        if (kept != j) {
            atoms_.col(kept) = atoms_.col(j);
            labels_[static_cast<std::size_t>(kept)] = labels_[static_cast<std::size_t>(j)];
        }
        ++kept;
    }
    pruned_ = static_cast<std::size_t>(atoms_.cols() - kept);
    if (kept == 0) throw EmptyDictionary("dictionary is empty after removing zero atoms");
    if (pruned_ > 0) {
        atoms_.conservativeResize(Eigen::NoChange, kept);
        labels_.resize(static_cast<std::size_t>(kept));
    }
}

namespace {

Eigen::MatrixXd stack_columns(const GridPtr& grid, const std::vector<GridFunction>& atoms)
{
    if (!grid) throw InvalidArgument("dictionary without grid");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(grid->size()), static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        require_same_grid(*grid, atoms[j].grid());
        M.col(static_cast<Eigen::Index>(j)) = atoms[j].values();
    }
    return M;
}

} // namespace

DiscreteDictionary::DiscreteDictionary(GridPtr grid, const std::vector<GridFunction>& atoms)
    : DiscreteDictionary(grid, stack_columns(grid, atoms), {})
{
}

GridFunction DiscreteDictionary::atom(std::size_t k) const
{
    if (k >= size()) throw InvalidArgument("dictionary atom index out of range");
    return GridFunction(grid_, atoms_.col(static_cast<Eigen::Index>(k)));
}

DiscreteDictionary build_relu_dictionary(const ReluFamilySpec& spec, GridPtr grid)
{
    spec.validate();
    const Eigen::VectorXd& x = grid->points();
    const auto raw = static_cast<Eigen::Index>(spec.w_values.size() * spec.b_count);
    Eigen::MatrixXd atoms(x.size(), raw);
    std::vector<AtomLabel> labels(static_cast<std::size_t>(raw));

    Eigen::Index col = 0;
    for (double w : spec.w_values) {
        for (std::size_t i = 0; i < spec.b_count; ++i, ++col) {
            const double b = spec.bias(i);
            auto c = atoms.col(col);
            for (Eigen::Index k = 0; k < x.size(); ++k) c(k) = relu_power(w * x(k) + b, spec.m);
            labels[static_cast<std::size_t>(col)] = {w, b, spec.m};
        }
    }
    if (spec.normalize) {
        const Eigen::VectorXd norms = weighted_lp_norms(atoms, grid->weights(), *spec.normalize);
        for (Eigen::Index j = 0; j < raw; ++j)
            if (norms(j) > 0.0) atoms.col(j) /= norms(j);
    }
    return DiscreteDictionary(std::move(grid), std::move(atoms), std::move(labels));
}

// ---------------------------------------------------------------------------- FunctionalSet

FunctionalSet::FunctionalSet(GridPtr grid, std::vector<std::size_t> indices)
    : grid_(std::move(grid)), indices_(std::move(indices))
{
    if (!grid_) throw InvalidArgument("functional set without grid");
    std::set<std::size_t> seen;
    for (auto i : indices_) {
        if (i >= grid_->size()) throw InvalidArgument("functional index outside grid");
        if (!seen.insert(i).second) throw InvalidArgument("duplicate functional index " + std::to_string(i));
    }
}

std::size_t FunctionalSet::grid_index(std::size_t k) const
{
    if (k >= indices_.size()) throw InvalidArgument("functional index out of range");
    return indices_[k];
}

FunctionalSet build_point_functionals(GridPtr grid, std::size_t stride)
{
    if (stride < 1) throw InvalidArgument("functional stride must be >= 1");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid->size(); i += stride) idx.push_back(i);
    return FunctionalSet(std::move(grid), std::move(idx));
}

double apply_functional(const FunctionalSet& fs, std::size_t k, const GridFunction& f)
{
    require_same_grid(fs.grid(), f.grid());
    return f[fs.grid_index(k)];
}

} // namespace greedy
