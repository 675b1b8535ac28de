#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "warpgreen/greens.hpp"

using namespace warpgreen;

namespace {

OperatorModel constant_model(double c, int n = 1) {
    return OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(c), n);
}
OperatorModel running(int n) { return OperatorModel(PeriodicFn::parse("trig:2,1"), PeriodicFn::constant(1), n); }

}  // namespace

TEST(ClosedForm, OracleAgreesWithFourierSeries) {
    for (double c : {1.0, 4.0})
        for (auto [r, s] : {std::pair{0.1, 0.7}, {0.5, 0.5}, {0.9, 0.05}, {0.3, 0.31}}) {
            EXPECT_NEAR(oracle::cosh_green(c, r, s), oracle::fourier_green(c, r, s), 3e-5);
            EXPECT_NEAR(constant_coefficient_green(c, r, s), oracle::cosh_green(c, r, s), 1e-14);
        }
}

TEST(ClosedForm, OracleSolvesTheDefiningProblem) {
    // -G'' + cG = 0 away from s; slope jump -1 at s; periodic
    const double c = 4, s = 0.4, d = 1e-4;
    auto G = [&](double r) { return oracle::cosh_green(c, r, s); };
    for (double r : {0.1, 0.25, 0.7, 0.95}) {
        const double g2 = (G(r + d) - 2 * G(r) + G(r - d)) / (d * d);
        EXPECT_NEAR(-g2 + c * G(r), 0.0, 1e-5);
    }
    const double right = (G(s + d) - G(s)) / d, left = (G(s) - G(s - d)) / d;
    EXPECT_NEAR(right - left, -1.0, 1e-3);
    EXPECT_NEAR(G(0.0), G(1.0), 1e-14);
}

TEST(Gamma, Formula) {
    const auto flat = OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 3);
    EXPECT_EQ(gamma_eval(flat, 0.3, 0.7), 0.0);
    EXPECT_NEAR(gamma_eval(flat, 0.7, 0.3), -0.4, 1e-14);
    const auto m = OperatorModel(PeriodicFn::parse("exptrig:1,0.5"), PeriodicFn::constant(1), 1);
    const double ref = -m.weight(0.25) * oracle::simpson([&](double t) { return 1.0 / m.weight(t); }, 0.25, 0.5);
    EXPECT_NEAR(gamma_eval(m, 0.5, 0.25), ref, 1e-12);
}

TEST(Tables, ClosedFormConstantCoefficients) {
    for (double c : {1.0, 4.0}) {
        const auto t = greens_matrix(constant_model(c), Grid(256));
        double err = 0;
        for (int i = 0; i < 256; ++i)
            for (int j = 0; j < 256; ++j)
                err = std::max(err, std::abs(t.G()(i, j) - oracle::cosh_green(c, t.grid().node(i), t.grid().node(j))));
        EXPECT_LT(err, 1e-4) << "c = " << c;
    }
}

TEST(Tables, DiagonalOfGEqualsH) {
    const auto t = greens_matrix(running(1), Grid(128));
    for (int i = 0; i < 128; ++i) EXPECT_EQ(t.G()(i, i), t.H()(i, i));
}

TEST(Tables, SymmetrySample) {
    const auto t = greens_matrix(running(1), Grid(640));
    const auto& m = t.model();
    // 0.2 and 0.6 are nodes of the 640-point grid
    const int i = 128, j = 384;
    EXPECT_NEAR(t.G()(i, j) * m.weight(0.2), t.G()(j, i) * m.weight(0.6), 1e-10);
}

TEST(Tables, PositiveAndCornerEqual) {
    const auto t = greens_matrix(running(2), Grid(256));
    EXPECT_GT(t.G().min(), 0.0);
    EXPECT_GT(t.H().min(), 0.0);
    EXPECT_LT(corner_gap(t), 1e-4);
    EXPECT_LT(column_residual(t), 1e-8);
    EXPECT_GT(t.lambda_min(), 0.0);
}

TEST(Identities, SymmetricCase) {
    const auto t = greens_matrix(constant_model(1), Grid(512));
    const auto r = h_identity_residuals(t);
    EXPECT_LT(r.res_ii, 1e-6);
    // a constant: Hr + Hs = -1 on the diagonal... (iv) with a' = 0
    for (std::size_t i = 0; i < 512; i += 37) EXPECT_NEAR(t.Hs_diag()[i] - t.Hr_diag()[i], -1.0, 1e-6);
}

TEST(Identities, SecondOrderShrinkRunningExample) {
    const auto a = h_identity_residuals(greens_matrix(running(2), Grid(256)));
    const auto b = h_identity_residuals(greens_matrix(running(2), Grid(512)));
    EXPECT_GT(a.res_ii / b.res_ii, 3.0);
    EXPECT_GT(a.res_iii / b.res_iii, 3.0);
    EXPECT_GT(a.res_iv / b.res_iv, 3.0);
    EXPECT_LT(b.nodal_ii, 1e-10);
}

TEST(Identities, DerivativeRelationWhereWeightIsFlat) {
    // f' = 0 at r = 0 and r = 1/2 so dsH - drH = -1 there
    const auto t = greens_matrix(running(1), Grid(512));
    for (std::size_t i : {std::size_t{0}, std::size_t{256}})
        EXPECT_NEAR(t.Hs_diag()[i] - t.Hr_diag()[i], -1.0, 1e-4);
}

TEST(Boundary, JumpConditions) {
    EXPECT_LT(h_boundary_check(greens_matrix(constant_model(1), Grid(512))), 1e-4);
    const double coarse = h_boundary_check(greens_matrix(running(1), Grid(128)));
    const double fine = h_boundary_check(greens_matrix(running(1), Grid(256)));
    EXPECT_GE(std::log2(coarse / fine), 1.0);
}

TEST(Columns, OffGridLoadInterpolates) {
    const auto op = assemble(running(1), Grid(256));
    const auto t = GreensTables(op, 0.0);
    const auto col = greens_column(op, t.grid().node(40));
    for (int i = 0; i < 256; i += 11) EXPECT_NEAR(col[static_cast<std::size_t>(i)], t.G()(i, 40), 1e-12);
    const auto reg = regular_column(op, 0.3);
    for (int i = 0; i < 256; i += 13)
        EXPECT_NEAR(reg[static_cast<std::size_t>(i)], t.H_at(t.grid().node(i), 0.3), 1e-4);
}
