#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "warpgreen/errors.hpp"
#include "warpgreen/nonlinear.hpp"

using namespace warpgreen;
constexpr double two_pi = 2 * std::numbers::pi;

namespace {

OperatorModel flat() { return OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 1); }
OperatorModel running() { return OperatorModel(PeriodicFn::parse("trig:2,1"), PeriodicFn::constant(1), 1); }

double argmax_location(const GridFn& v) {
    const auto it = std::max_element(v.begin(), v.end());
    return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

}  // namespace

TEST(Residual, ConstantPowerSolution) {
    const auto op = assemble(flat(), Grid(64));
    for (double p : {2.0, 7.5, 80.0}) EXPECT_LT(residual_power(op, GridFn(64, 1.0), p).max_abs(), 1e-12);
}

TEST(Residual, ConstantExponentialSolution) {
    const double c = oracle::bisect([](double x) { return x * std::exp(-x) - 0.1; }, 0.0, 1.0);
    const auto op = assemble(flat(), Grid(64));
    EXPECT_LT(residual_exp(op, GridFn(64, c), 0.1).max_abs(), 1e-12);
    SolverConfig cfg;
    const auto res = newton_solve(op, GridFn(64, 0.0), ExpProblem::from_lambda(0.1), cfg);
    for (double x : res.v) EXPECT_NEAR(x, c, 1e-12);
}

TEST(Newton, ExactSeedNeedsNoIterations) {
    const auto op = assemble(flat(), Grid(64));
    const auto res = newton_solve(op, GridFn(64, 1.0), PowerProblem{5}, SolverConfig{});
    EXPECT_EQ(res.iterations, 0);
    EXPECT_EQ(backward_error(op, GridFn(64, 1.0), PowerProblem{5}), 0.0);
}

TEST(Newton, ConstantPowerFromNearbySeed) {
    const auto op = assemble(flat(), Grid(64));
    const auto seed = GridFn::sample(Grid(64), [](double r) { return 1.05 + 0.02 * std::cos(two_pi * r); });
    const auto res = newton_solve(op, seed, PowerProblem{3}, SolverConfig{});
    for (double x : res.v) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Newton, PowerRefusesNegativeIterate) {
    EXPECT_THROW(nonlinear_terms(GridFn(64, -1.0), PowerProblem{3}), NonPositiveIterate);
}

TEST(Jacobian, MatchesDifferences) {
    const Grid g(512);
    const auto op = assemble(running(), g);
    const auto v = GridFn::sample(g, [](double r) { return 1.0 + 0.3 * std::cos(two_pi * r); });
    for (const Nonlinearity& pb : {Nonlinearity(PowerProblem{5}), Nonlinearity(ExpProblem::from_lambda(0.3))}) {
        const auto jc = jacobian_fd_check(op, v, pb, 10, 11);
        EXPECT_LT(jc.full_relative, 1e-6);
        EXPECT_LT(jc.nonlinear_relative, 1e-6);
    }
}

TEST(Refine, CubicMidpoints) {
    const Grid g(256), g2(512);
    const auto fn = [](double r) { return std::sin(two_pi * r) + 0.5 * std::cos(2 * two_pi * r); };
    const auto fine = refine_periodic(GridFn::sample(g, fn));
    ASSERT_EQ(fine.size(), 512u);
    EXPECT_LT((fine - GridFn::sample(g2, fn)).max_abs(), 1e-6);
}

TEST(Newton, ExponentialFromBubbleProjection) {
    const auto model = running();
    const auto t = greens_matrix(model, Grid(512));
    const auto r0 = select_concentration_point(locate_critical(t)).r0;
    const double H00 = interp_periodic(t.H_diag().span(), r0);
    BubbleParams bp;
    // the concentrated branch separates from the flat one only below eps ~ 0.027
    bp.eps = 0.02;
    bp.s = r0;
    const Grid g(2048);
    const auto op = assemble(model, g);
    const auto seed = project(op, bp).PU;
    SolverConfig cfg;
    const ExpProblem pb{match_log_lambda_to_eps(H00, bp.eps)};
    const auto res = newton_solve(op, seed, pb, cfg);
    EXPECT_LE(res.iterations, 10);
    EXPECT_NEAR(argmax_location(res.v), r0, 0.02);
    cfg.grid_N = 4096;
    EXPECT_LT(refinement_check(model, res.v, pb, cfg).difference, 1e-4);
}

TEST(Newton, PowerFromScaledProjection) {
    const auto model = running();
    const auto t = greens_matrix(model, Grid(512));
    const auto r0 = select_concentration_point(locate_critical(t)).r0;
    const double H00 = interp_periodic(t.H_diag().span(), r0);
    const double p = 80;
    BubbleParams bp;
    bp.eps = match_eps_to_p(H00, p).eps;
    bp.s = r0;
    const Grid g(2048);
    const auto op = assemble(model, g);
    const auto seed = (1.0 / p) * project(op, bp).PU;
    const auto res = newton_solve(op, seed, PowerProblem{p}, SolverConfig{});
    const auto limit = (1.0 / H00) * greens_column(op, r0);
    EXPECT_NEAR(res.v.max() / limit.max(), 1.0, 0.2);
    EXPECT_GT(res.v.min(), 0.0);
}

TEST(Branch, RefusesConstantModel) {
    BranchOptions o;
    o.table_N = 128;
    o.solver.grid_N = 256;
    EXPECT_THROW(continue_branch(flat(), o), ConstantV);
}
