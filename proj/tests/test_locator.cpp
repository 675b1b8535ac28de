#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "warpgreen/errors.hpp"
#include "warpgreen/locator.hpp"

using namespace warpgreen;

namespace {

OperatorModel running() { return OperatorModel(PeriodicFn::parse("trig:2,1"), PeriodicFn::constant(1), 1); }

}  // namespace

TEST(Concentration, ConstantModelIsFlat) {
    const auto t = greens_matrix(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 2), Grid(256));
    const double expect = std::cosh(0.5) / (2 * std::sinh(0.5));
    for (double r : {0.0, 0.3, 0.77}) EXPECT_NEAR(V_eval(t, r), expect, 1e-5);
    EXPECT_THROW(locate_critical(t), ConstantV);
}

TEST(Concentration, EndpointsAgree) {
    const auto t = greens_matrix(running(), Grid(256));
    EXPECT_NEAR(V_eval(t, 0.0), V_eval(t, 1.0), 1e-12);
}

TEST(Locate, RunningExampleMatchesBruteForceScan) {
    const int N = 256;
    const auto t = greens_matrix(running(), Grid(N));
    const auto pts = locate_critical(t);
    ASSERT_GE(pts.size(), 2u);
    const auto ext = oracle::scan_extrema([&](double r) { return V_eval(t, r); }, 4 * N);
    ASSERT_EQ(ext.size(), pts.size());
    for (const auto& p : pts) {
        double best = 1.0;
        for (double e : ext) best = std::min(best, oracle::periodic_distance(p.r0, e));
        EXPECT_LE(best, 2.0 / N);
        EXPECT_LT(std::abs(p.Hr_at_diag - 0.5), p.tol_used);
        EXPECT_TRUE(p.nondegenerate);
    }
    // symmetric about 1/2: the maximum sits where f is smallest
    const auto top = select_concentration_point(pts);
    EXPECT_EQ(top.kind, CriticalKind::Maximum);
    EXPECT_NEAR(top.r0, 0.5, 2.0 / N);
    EXPECT_LT(top.second_form, 0.0);
}

TEST(Locate, VIsNotConstantForRunningExample) {
    const auto t = greens_matrix(running(), Grid(256));
    const auto fine = greens_matrix(running(), Grid(512));
    const double spread = V_eval(t, 0.5) - V_eval(t, 0.0);
    EXPECT_GT(spread, 1e-2);
    EXPECT_NEAR(spread, V_eval(fine, 0.5) - V_eval(fine, 0.0), 1e-4);
}

TEST(Frechet, ZeroAndLinearity) {
    const Grid g(256);
    const auto m = running();
    EXPECT_LT(frechet_dH_kappa(m, g, 0.3, PeriodicFn::constant(0)).max_abs(), 1e-12);
    const auto th = PeriodicFn::parse("trig:0,1");
    const auto z1 = frechet_dH_kappa(m, g, 0.3, th);
    const auto z2 = frechet_dH_kappa(m, g, 0.3, th.scaled(2));
    EXPECT_LT((z2 - 2.0 * z1).max_abs(), 1e-6 * z1.max_abs());
}

TEST(Frechet, SolvesLinearizedProblem) {
    const Grid g(512);
    const auto m = running();
    const auto th = PeriodicFn::parse("trig:0,1");
    const auto z = frechet_dH_kappa(m, g, 0.3, th);
    EXPECT_LT(frechet_residual(m, g, 0.3, th, z), 1e-3);
}

TEST(Genericity, EmptyAndDeterministic) {
    GenericityOptions o;
    o.trials = 0;
    EXPECT_TRUE(genericity_sweep(running(), o).empty());
    o.trials = 4;
    o.grid_N = 128;
    o.rho = 0.01;
    o.threads = 3;
    const auto a = genericity_sweep(running(), o);
    o.threads = 1;
    const auto b = genericity_sweep(running(), o);
    ASSERT_EQ(a.size(), 4u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].perturbation, b[k].perturbation);
        EXPECT_EQ(a[k].critical_points.size(), b[k].critical_points.size());
        EXPECT_LE(a[k].norm_measured, o.rho);
        EXPECT_NEAR(a[k].norm_measured, a[k].norm_drawn, 1e-9 * o.rho);
    }
}

TEST(Genericity, PerturbationNorm) {
    std::mt19937_64 rng(3);
    const auto th = random_perturbation(rng, 6, 0.02);
    EXPECT_NEAR(ball_norm(th), 0.02, 1e-12);
}

TEST(Genericity, StableAroundNondegenerateModel) {
    GenericityOptions o;
    o.trials = 8;
    o.grid_N = 128;
    o.rho = 0.01;
    const auto s = summarize(genericity_sweep(running(), o));
    EXPECT_EQ(s.admissible, 8);
    EXPECT_EQ(s.all_nondegenerate, 8);
}
