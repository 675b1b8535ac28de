#pragma once

#include <limits>
#include <vector>

#include "warpgreen/operator.hpp"

namespace warpgreen {

// N x N table, entry (i, j) is the value at (r_i, s_j); stored by columns.
class Table {
public:
    Table() = default;
    explicit Table(int n) : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

    int size() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return data_[index(i, j)]; }
    double& operator()(int i, int j) noexcept { return data_[index(i, j)]; }
    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    double min() const;
    double max() const;

private:
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    int n_ = 0;
    std::vector<double> data_;
};

class GreensTables {
public:
    GreensTables(const DiscreteOperator& op, double lambda_min);

    const OperatorModel& model() const noexcept { return model_; }
    const Grid& grid() const noexcept { return grid_; }
    const Table& G() const noexcept { return G_; }
    const Table& Gamma() const noexcept { return Gamma_; }
    const Table& H() const noexcept { return H_; }
    const GridFn& weight() const noexcept { return weight_; }
    const GridFn& H_diag() const noexcept { return H_diag_; }
    const GridFn& Hr_diag() const noexcept { return Hr_diag_; }
    const GridFn& Hs_diag() const noexcept { return Hs_diag_; }
    const GridFn& Hrr_diag() const noexcept { return Hrr_diag_; }
    const GridFn& Hrs_diag() const noexcept { return Hrs_diag_; }
    // Hrr + Hrs = d/dt of dr H(t,t)
    GridFn second_form_diag() const;
    double lambda_min() const noexcept { return lambda_min_; }

    // Singular part in unwrapped node coordinates r = i h, s = j h (any integers).
    double gamma_node(long i, long j) const;
    // G(i mod N, j mod N) - gamma_node(i, j): the smooth regular part, extended.
    double H_node(long i, long j) const;
    // Bilinear interpolation of the regular part, r, s in [0,1].
    double H_at(double r, double s) const;
    double G_at(double r, double s) const;
    // Integral of 1/a over [s, r].
    double inverse_weight_integral(double s, double r) const;

private:
    double cumulative(long i) const;

    OperatorModel model_;
    Grid grid_;
    Table G_, Gamma_, H_;
    GridFn weight_;
    std::vector<double> cumulative_;  // int_0^{r_i} 1/a, i = 0..N
    GridFn H_diag_, Hr_diag_, Hs_diag_, Hrr_diag_, Hrs_diag_;
    double lambda_min_;
};

// -a(s) int_s^r 1/a for r > s, else 0.
double gamma_eval(const OperatorModel& model, double r, double s);

// With certify, the smallest pencil eigenvalue is computed and stored.
GreensTables greens_matrix(const OperatorModel& model, const Grid& grid, bool certify = true);

// G(r_i, s) for arbitrary s (unit load split between the two neighbouring nodes).
GridFn greens_column(const DiscreteOperator& op, double s);
// H(r_i, s) = G(r_i, s) - Gamma(r_i, s)
GridFn regular_column(const DiscreteOperator& op, double s);

struct IdentityResiduals {
    double res_ii = 0.0;
    double res_iii = 0.0;
    double res_iv = 0.0;
    // on grid nodes (round-off level by symmetric assembly)
    double nodal_ii = 0.0;
    double nodal_iii = 0.0;
};

// (ii), (iii) on an off-grid lattice of sample pairs; (iv) along the diagonal.
IdentityResiduals h_identity_residuals(const GreensTables& t, int lattice = 64);

struct BoundaryViolation {
    double value_jump = 0.0;
    double slope_jump = 0.0;
    double worst() const { return std::max(value_jump, slope_jump); }
};

// Jump conditions at r = 0 / r = 1 with H(1, .) taken from the interior.
BoundaryViolation h_boundary_components(const GreensTables& t);
double h_boundary_check(const GreensTables& t);

// |H(0,0) - H(1,1)| with H(1,1) extrapolated along the diagonal.
double corner_gap(const GreensTables& t);

// max_j |A G(., s_j) - a_j e_j / h|_inf scaled by a_j / h.
double column_residual(const GreensTables& t);

// cosh(sqrt(c)(|r-s| - 1/2)) / (2 sqrt(c) sinh(sqrt(c)/2)), periodic Green's function of -v'' + c v.
double constant_coefficient_green(double c, double r, double s);

}  // namespace warpgreen
