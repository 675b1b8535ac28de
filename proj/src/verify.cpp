#include "warpgreen/verify.hpp"

#include <cmath>
#include <limits>

namespace warpgreen {

namespace {

double order_of(double coarse, double fine) {
    // round-off level residuals carry no rate
    if (!(coarse > 1e-12) || !(fine > 1e-12)) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(coarse / fine);
}

double closed_form_error(const GreensTables& t, double c) {
    const int n = t.grid().size();
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(t.G()(i, j) - constant_coefficient_green(c, t.grid().node(i),
                                                                                     t.grid().node(j))));
    return worst;
}

}  // namespace

VerifyReport run_verify(const RunConfig& cfg) {
    const OperatorModel model = cfg.model();
    VerifyReport rep;
    rep.N = cfg.grid_n;
    rep.N2 = 2 * cfg.grid_n;
    const GreensTables coarse = greens_matrix(model, Grid(rep.N), rep.N <= 1024);
    const GreensTables fine = greens_matrix(model, Grid(rep.N2), false);
    rep.lambda_min = rep.N <= 1024 ? coarse.lambda_min() : cfg.lambda_min;

    const auto idc = h_identity_residuals(coarse, cfg.verify.lattice);
    const auto idf = h_identity_residuals(fine, cfg.verify.lattice);
    const auto bc = h_boundary_components(coarse);
    const auto bf = h_boundary_components(fine);

    const auto add = [&](std::string name, double a, double b, double tol, bool lower = false) {
        VerifyRow row{std::move(name), a, b, lower ? std::numeric_limits<double>::quiet_NaN() : order_of(a, b), tol, lower, lower ? a > tol : a <= tol};
        rep.rows.push_back(row);
    };
    const auto& tol = cfg.verify;
    add("reciprocity", idc.res_ii, idf.res_ii, tol.reciprocity);
    add("regular_part_relation", idc.res_iii, idf.res_iii, tol.regular_relation);
    add("diagonal_derivative_relation", idc.res_iv, idf.res_iv, tol.diagonal_relation);
    add("boundary_value_jump", bc.value_jump, bf.value_jump, tol.boundary);
    add("boundary_slope_jump", bc.slope_jump, bf.slope_jump, tol.boundary);
    add("corner_equality", corner_gap(coarse), corner_gap(fine), tol.corner);
    add("column_residual", column_residual(coarse), column_residual(fine), tol.column);
    add("min_G", coarse.G().min(), fine.G().min(), 0.0, true);
    add("min_H", coarse.H().min(), fine.H().min(), 0.0, true);
    {
        const double a = coarse.H().max(), b = fine.H().max();
        const double change = std::abs(b - a) / std::abs(a);
        rep.rows.push_back({"max_H_relative_change", change, change, std::numeric_limits<double>::quiet_NaN(),
                            tol.max_h_change, false, change <= tol.max_h_change});
    }
    if (model.warping().is_constant() && model.potential().is_constant()) {
        // a is constant, so the operator is a multiple of -v'' + c v
        const double c = model.potential()(0.0);
        rep.closed_form_included = true;
        add("closed_form_G", closed_form_error(coarse, c), closed_form_error(fine, c), tol.closed_form);
    }
    rep.pass = true;
    for (const auto& r : rep.rows) rep.pass = rep.pass && r.pass;
    return rep;
}

}  // namespace warpgreen
