#pragma once

#include <memory>
#include <span>
#include <string>

#include "warpgreen/cyclic_solver.hpp"
#include "warpgreen/periodic.hpp"

namespace warpgreen {

// Warping f, potential kappa and fiber dimension n; weight a = f^n.
class OperatorModel {
public:
    OperatorModel(PeriodicFn warping, PeriodicFn potential, int fiber_dim);

    const PeriodicFn& warping() const noexcept { return warping_; }
    const PeriodicFn& potential() const noexcept { return potential_; }
    int fiber_dim() const noexcept { return n_; }

    double weight(double r) const;
    // a'/a = n f'/f
    double log_weight_slope(double r) const;

    OperatorModel with_potential(PeriodicFn potential) const;
    OperatorModel with_warping(PeriodicFn warping) const;

private:
    PeriodicFn warping_;
    PeriodicFn potential_;
    int n_;
};

// Discretization of v -> -(a v')' + a kappa v with midpoint fluxes.
class DiscreteOperator {
public:
    DiscreteOperator(const OperatorModel& model, const Grid& grid);

    const OperatorModel& model() const noexcept { return model_; }
    const Grid& grid() const noexcept { return grid_; }
    const GridFn& weight() const noexcept { return weight_; }
    const GridFn& potential() const noexcept { return potential_; }
    const CyclicTridiagonal& matrix() const noexcept { return matrix_; }
    bool positive_definite() const noexcept { return factor_ != nullptr; }

    GridFn apply(const GridFn& v) const;
    GridFn apply_abs(const GridFn& v) const;
    // Solve A v = rhs directly (rhs already weighted).
    GridFn solve_weighted(GridFn rhs) const;
    void solve_many(std::span<double> cols, std::size_t nrhs) const;

private:
    const CyclicFactorization& factor() const;

    OperatorModel model_;
    Grid grid_;
    GridFn weight_;
    GridFn potential_;
    CyclicTridiagonal matrix_;
    std::shared_ptr<const CyclicFactorization> factor_;
};

DiscreteOperator assemble(const OperatorModel& model, const Grid& grid);

// Solves A v = a * rhs.
GridFn solve_linear(const DiscreteOperator& op, const GridFn& rhs);

struct CoercivityReport {
    bool is_coercive = false;
    double lambda_min = 0.0;
};

// Smallest eigenvalue of the pencil (A, diag(a)).
CoercivityReport coercivity_check(const OperatorModel& model, const Grid& grid);

}  // namespace warpgreen
