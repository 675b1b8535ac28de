#include "warpgreen/operator.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "warpgreen/errors.hpp"

namespace warpgreen {

OperatorModel::OperatorModel(PeriodicFn warping, PeriodicFn potential, int fiber_dim)
    : warping_(std::move(warping)), potential_(std::move(potential)), n_(fiber_dim) {
    if (n_ < 1) throw ValidationError("fiber dimension n must be a positive integer");
}

double OperatorModel::weight(double r) const { return std::pow(warping_(r), n_); }

double OperatorModel::log_weight_slope(double r) const {
    const Jet f = warping_.jet(r);
    return n_ * f.d1 / f.value;
}

OperatorModel OperatorModel::with_potential(PeriodicFn potential) const {
    return OperatorModel(warping_, std::move(potential), n_);
}

OperatorModel OperatorModel::with_warping(PeriodicFn warping) const {
    return OperatorModel(std::move(warping), potential_, n_);
}

namespace {

CyclicTridiagonal build_matrix(const OperatorModel& model, const Grid& grid, const GridFn& a,
                               const GridFn& kappa) {
    const int n = grid.size();
    const double h = grid.spacing();
    std::vector<double> flux(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double fm = model.warping()(grid.node(i) + 0.5 * h);
        if (!(fm > 0.0))
            throw ValidationError("warping function must be positive; f(" +
                                  std::to_string(grid.node(i) + 0.5 * h) + ") = " + std::to_string(fm));
        flux[static_cast<std::size_t>(i)] = std::pow(fm, model.fiber_dim()) / (h * h);
    }
    std::vector<double> diag(flux.size()), coupling(flux.size());
    for (std::size_t i = 0; i < flux.size(); ++i) {
        const std::size_t im = i == 0 ? flux.size() - 1 : i - 1;
        diag[i] = flux[i] + flux[im] + a[i] * kappa[i];
        coupling[i] = -flux[i];
    }
    return CyclicTridiagonal(std::move(diag), std::move(coupling));
}

GridFn sample_weight(const OperatorModel& model, const Grid& grid) {
    GridFn a = GridFn::sample(grid, model.warping());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0))
            throw ValidationError("warping function must be positive; f(" + std::to_string(grid.node(static_cast<long>(i))) +
                                  ") = " + std::to_string(a[i]));
        a[i] = std::pow(a[i], model.fiber_dim());
    }
    return a;
}

}  // namespace

DiscreteOperator::DiscreteOperator(const OperatorModel& model, const Grid& grid)
    : model_(model),
      grid_(grid),
      weight_(sample_weight(model, grid)),
      potential_(GridFn::sample(grid, model.potential())),
      matrix_(build_matrix(model, grid, weight_, potential_)) {
    if (matrix_.positive_definite()) {
        try {
            factor_ = std::make_shared<const CyclicFactorization>(matrix_);
        } catch (const SingularSystem&) {
            factor_.reset();
        }
    }
}

const CyclicFactorization& DiscreteOperator::factor() const {
    if (!factor_)
        throw CoercivityFailure("operator is not positive definite on this grid",
                                std::numeric_limits<double>::quiet_NaN());
    return *factor_;
}

GridFn DiscreteOperator::apply(const GridFn& v) const {
    GridFn out(v.size(), 0.0);
    matrix_.apply(v.span(), out.span());
    return out;
}

GridFn DiscreteOperator::apply_abs(const GridFn& v) const {
    GridFn out(v.size(), 0.0);
    matrix_.apply_abs(v.span(), out.span());
    return out;
}

GridFn DiscreteOperator::solve_weighted(GridFn rhs) const {
    factor().solve(rhs.span());
    return rhs;
}

void DiscreteOperator::solve_many(std::span<double> cols, std::size_t nrhs) const {
    factor().solve_many(cols, nrhs);
}

DiscreteOperator assemble(const OperatorModel& model, const Grid& grid) {
    return DiscreteOperator(model, grid);
}

GridFn solve_linear(const DiscreteOperator& op, const GridFn& rhs) {
    if (rhs.size() != static_cast<std::size_t>(op.grid().size()))
        throw ValidationError("right-hand side length does not match the grid");
    GridFn b = rhs;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] *= op.weight()[i];
    return op.solve_weighted(std::move(b));
}

CoercivityReport coercivity_check(const OperatorModel& model, const Grid& grid) {
    const DiscreteOperator op(model, grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    const auto d = op.matrix().diag();
    const auto c = op.matrix().coupling();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index ip = (i + 1) % n;
        A(i, i) = d[static_cast<std::size_t>(i)];
        A(i, ip) = c[static_cast<std::size_t>(i)];
        A(ip, i) = c[static_cast<std::size_t>(i)];
        B(i, i) = op.weight()[static_cast<std::size_t>(i)];
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("generalized eigensolver did not converge");
    const auto& ev = es.eigenvalues();
    const double lmin = ev.minCoeff();
    const double lmax = ev.cwiseAbs().maxCoeff();
    const double floor = 64 * std::numeric_limits<double>::epsilon() * lmax;
    return {lmin > floor, lmin};
}

}  // namespace warpgreen
