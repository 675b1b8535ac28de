#include "warpgreen/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "warpgreen/errors.hpp"

namespace warpgreen {

double Table::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Table::max() const { return *std::max_element(data_.begin(), data_.end()); }

namespace {

std::vector<double> cumulative_inverse_weight(const OperatorModel& model, const Grid& grid) {
    const auto inv = [&](double t) { return 1.0 / model.weight(t); };
    std::vector<double> F(static_cast<std::size_t>(grid.size()) + 1, 0.0);
    for (int k = 0; k < grid.size(); ++k)
        F[static_cast<std::size_t>(k) + 1] =
            F[static_cast<std::size_t>(k)] + quad_segment(inv, grid.node(k), grid.node(k + 1));
    return F;
}

}  // namespace

GreensTables::GreensTables(const DiscreteOperator& op, double lambda_min)
    : model_(op.model()),
      grid_(op.grid()),
      G_(op.grid().size()),
      Gamma_(op.grid().size()),
      H_(op.grid().size()),
      weight_(op.weight()),
      cumulative_(cumulative_inverse_weight(op.model(), op.grid())),
      lambda_min_(lambda_min) {
    const int n = grid_.size();
    const double h = grid_.spacing();
    const auto un = static_cast<std::size_t>(n);

    // unit loads a_j / h at node j, one column per source point
    auto cols = G_.data();
    for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j) * un + static_cast<std::size_t>(j)] = weight_[static_cast<std::size_t>(j)] / h;
    op.solve_many(cols, un);

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Gamma_(i, j) = gamma_node(i, j);
            H_(i, j) = G_(i, j) - Gamma_(i, j);
        }
    }

    H_diag_ = GridFn(un, 0.0);
    Hr_diag_ = GridFn(un, 0.0);
    Hs_diag_ = GridFn(un, 0.0);
    Hrr_diag_ = GridFn(un, 0.0);
    Hrs_diag_ = GridFn(un, 0.0);
    for (long j = 0; j < n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        H_diag_[u] = H_node(j, j);
        Hr_diag_[u] = (H_node(j + 1, j) - H_node(j - 1, j)) / (2 * h);
        Hs_diag_[u] = (H_node(j, j + 1) - H_node(j, j - 1)) / (2 * h);
        // one-sided on each side of the diagonal, averaged
        const double above = 2 * H_node(j, j) - 5 * H_node(j + 1, j) + 4 * H_node(j + 2, j) - H_node(j + 3, j);
        const double below = 2 * H_node(j, j) - 5 * H_node(j - 1, j) + 4 * H_node(j - 2, j) - H_node(j - 3, j);
        Hrr_diag_[u] = 0.5 * (above + below) / (h * h);
    }
    for (long j = 0; j < n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        const double along = (Hr_diag_.at_wrapped(j + 1) - Hr_diag_.at_wrapped(j - 1)) / (2 * h);
        Hrs_diag_[u] = along - Hrr_diag_[u];
    }
}

GridFn GreensTables::second_form_diag() const { return Hrr_diag_ + Hrs_diag_; }

double GreensTables::cumulative(long i) const {
    const long n = grid_.size();
    long q = i / n, m = i % n;
    if (m < 0) {
        m += n;
        --q;
    }
    return cumulative_[static_cast<std::size_t>(m)] + static_cast<double>(q) * cumulative_.back();
}

double GreensTables::gamma_node(long i, long j) const {
    if (i <= j) return 0.0;
    return -weight_.at_wrapped(j) * (cumulative(i) - cumulative(j));
}

double GreensTables::H_node(long i, long j) const {
    return G_(grid_.wrap(i), grid_.wrap(j)) - gamma_node(i, j);
}

double GreensTables::H_at(double r, double s) const {
    const int n = grid_.size();
    const auto cell = [n](double x) {
        const double y = x * n;
        const long i = std::clamp(static_cast<long>(std::floor(y)), 0L, static_cast<long>(n) - 1);
        return std::pair{i, y - static_cast<double>(i)};
    };
    const auto [i, tr] = cell(r);
    const auto [j, ts] = cell(s);
    return (1 - tr) * (1 - ts) * H_node(i, j) + tr * (1 - ts) * H_node(i + 1, j) +
           (1 - tr) * ts * H_node(i, j + 1) + tr * ts * H_node(i + 1, j + 1);
}

double GreensTables::G_at(double r, double s) const { return H_at(r, s) + gamma_eval(model_, r, s); }

double GreensTables::inverse_weight_integral(double s, double r) const {
    return quad_segment([this](double t) { return 1.0 / model_.weight(t); }, s, r);
}

double gamma_eval(const OperatorModel& model, double r, double s) {
    if (r <= s) return 0.0;
    return -model.weight(s) * quad_segment([&](double t) { return 1.0 / model.weight(t); }, s, r);
}

GreensTables greens_matrix(const OperatorModel& model, const Grid& grid, bool certify) {
    const DiscreteOperator op(model, grid);
    double lambda_min = std::numeric_limits<double>::quiet_NaN();
    if (certify) {
        const auto cert = coercivity_check(model, grid);
        lambda_min = cert.lambda_min;
        if (!cert.is_coercive) throw CoercivityFailure("potential is not coercive", lambda_min);
    }
    if (!op.positive_definite())
        throw CoercivityFailure("operator is not positive definite", lambda_min);
    return GreensTables(op, lambda_min);
}

GridFn greens_column(const DiscreteOperator& op, double s) {
    const Grid& g = op.grid();
    const double x = wrap_unit(s) * g.size();
    const long j = static_cast<long>(std::floor(x));
    const double t = x - static_cast<double>(j);
    const double load = op.model().weight(s) / g.spacing();
    GridFn rhs(static_cast<std::size_t>(g.size()), 0.0);
    rhs[static_cast<std::size_t>(g.wrap(j))] += (1 - t) * load;
    rhs[static_cast<std::size_t>(g.wrap(j + 1))] += t * load;
    return op.solve_weighted(std::move(rhs));
}

GridFn regular_column(const DiscreteOperator& op, double s) {
    GridFn col = greens_column(op, s);
    const auto& model = op.model();
    const auto inv = [&](double t) { return 1.0 / model.weight(t); };
    const double as = model.weight(s);
    // accumulate int_s^{r_i} cell by cell
    double acc = 0.0;
    double prev = s;
    for (int i = 0; i < op.grid().size(); ++i) {
        const double r = op.grid().node(i);
        if (r <= s) continue;
        acc += quad_segment(inv, prev, r);
        prev = r;
        col[static_cast<std::size_t>(i)] += as * acc;
    }
    return col;
}

IdentityResiduals h_identity_residuals(const GreensTables& t, int lattice) {
    IdentityResiduals out;
    // offset 1/3: for power-of-two N the samples sit at cell fraction 1/3 or 2/3,
    // so interpolation errors at N and 2N are comparable
    const double offset = 1.0 / 3.0;
    std::vector<double> pts(static_cast<std::size_t>(lattice));
    std::vector<double> wts(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        pts[k] = (static_cast<double>(k) + offset) / lattice;
        wts[k] = t.model().weight(pts[k]);
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
        for (std::size_t l = 0; l < pts.size(); ++l) {
            const double r = pts[k], s = pts[l];
            const double ar = wts[k], as = wts[l];
            const double gap_ii = t.G_at(r, s) * ar - t.G_at(s, r) * as;
            const double gap_iii =
                t.H_at(s, r) - t.H_at(r, s) * ar / as + ar * t.inverse_weight_integral(s, r);
            out.res_ii = std::max(out.res_ii, std::abs(gap_ii));
            out.res_iii = std::max(out.res_iii, std::abs(gap_iii));
        }
    }

    const int n = t.grid().size();
    const int fd = t.model().fiber_dim();
    for (int j = 0; j < n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        const double r = t.grid().node(j);
        const Jet f = t.model().warping().jet(r);
        const double gap = t.Hs_diag()[u] - t.Hr_diag()[u] - fd * t.H_diag()[u] * f.d1 / f.value + 1.0;
        out.res_iv = std::max(out.res_iv, std::abs(gap));
    }

    const auto& a = t.weight();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            out.nodal_ii = std::max(out.nodal_ii, std::abs(t.G()(i, j) * a[ui] - t.G()(j, i) * a[uj]));
            // int_{s_j}^{r_i} 1/a = -Gamma(i,j)/a_j for i > j, or +Gamma(j,i)/a_i for i < j
            const double seg = i > j ? -t.Gamma()(i, j) / a[uj] : (i < j ? t.Gamma()(j, i) / a[ui] : 0.0);
            const double gap = t.H()(j, i) - t.H()(i, j) * a[ui] / a[uj] + a[ui] * seg;
            out.nodal_iii = std::max(out.nodal_iii, std::abs(gap));
        }
    }
    return out;
}

BoundaryViolation h_boundary_components(const GreensTables& t) {
    BoundaryViolation out;
    const long n = t.grid().size();
    const double h = t.grid().spacing();
    const double a1 = t.model().weight(1.0);
    for (long j = 0; j <= n; ++j) {
        const auto H = [&](long i) { return t.H_node(i, j); };
        const double s = t.grid().node(j);
        // r = 1 taken from r = 1-h .. 1-4h only
        const double h_one = 4 * H(n - 1) - 6 * H(n - 2) + 4 * H(n - 3) - H(n - 4);
        const double dh_one = (26 * H(n - 1) - 57 * H(n - 2) + 42 * H(n - 3) - 11 * H(n - 4)) / (6 * h);
        const double h_zero = H(0);
        const double dh_zero = (-11 * H(0) + 18 * H(1) - 9 * H(2) + 2 * H(3)) / (6 * h);
        const double as = t.model().weight(s);
        const double tail = j == n ? 0.0 : t.inverse_weight_integral(s, 1.0);
        out.value_jump = std::max(out.value_jump, std::abs(h_zero - (h_one - as * tail)));
        out.slope_jump = std::max(out.slope_jump, std::abs(dh_zero - (dh_one - as / a1)));
    }
    return out;
}

double h_boundary_check(const GreensTables& t) { return h_boundary_components(t).worst(); }

double corner_gap(const GreensTables& t) {
    const long n = t.grid().size();
    const auto D = [&](long i) { return t.H_node(i, i); };
    const double h11 = 4 * D(n - 1) - 6 * D(n - 2) + 4 * D(n - 3) - D(n - 4);
    return std::abs(D(0) - h11);
}

double column_residual(const GreensTables& t) {
    const int n = t.grid().size();
    const DiscreteOperator op(t.model(), t.grid());
    const double h = t.grid().spacing();
    double worst = 0.0;
    GridFn col(static_cast<std::size_t>(n), 0.0), out(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = t.G()(i, j);
        op.matrix().apply(col.span(), out.span());
        const double load = t.weight()[static_cast<std::size_t>(j)] / h;
        out[static_cast<std::size_t>(j)] -= load;
        worst = std::max(worst, out.max_abs() / load);
    }
    return worst;
}

double constant_coefficient_green(double c, double r, double s) {
    const double q = std::sqrt(c);
    const double d = std::abs(wrap_unit(r) - wrap_unit(s));
    return std::cosh(q * (d - 0.5)) / (2 * q * std::sinh(q / 2));
}

}  // namespace warpgreen
