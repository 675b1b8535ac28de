#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "warpgreen/cyclic_solver.hpp"
#include "warpgreen/errors.hpp"
#include "warpgreen/operator.hpp"

using namespace warpgreen;
constexpr double two_pi = 2 * std::numbers::pi;

namespace {

OperatorModel running(int n = 1) {
    return OperatorModel(PeriodicFn::parse("trig:2,1"), PeriodicFn::constant(1.0), n);
}

Eigen::MatrixXd dense(const DiscreteOperator& op) {
    const int n = op.grid().size();
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        GridFn e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(j)] = 1.0;
        const auto col = op.apply(e);
        for (int i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
    }
    return m;
}

}  // namespace

TEST(Assemble, ConstantCoefficientStencil) {
    const Grid g(32);
    const auto op = assemble(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 3), g);
    const auto m = dense(op);
    const double ih2 = 1.0 / (g.spacing() * g.spacing());
    for (int i = 0; i < 32; ++i) {
        EXPECT_NEAR(m(i, i), 2 * ih2 + 1, 1e-9);
        EXPECT_NEAR(m(i, (i + 1) % 32), -ih2, 1e-9);
        EXPECT_NEAR(m(i, (i + 31) % 32), -ih2, 1e-9);
    }
}

TEST(Assemble, SymmetricForVariableWeight) {
    const auto op = assemble(running(2), Grid(40));
    const auto m = dense(op);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-9 * m.cwiseAbs().maxCoeff());
}

TEST(Assemble, ConstantsSeeOnlyThePotential) {
    const Grid g(64);
    const auto op = assemble(OperatorModel(PeriodicFn::parse("trig:2,1"), PeriodicFn::constant(3), 2), g);
    const auto r = op.apply(GridFn(64, 1.0));
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(r[static_cast<std::size_t>(i)], 3 * op.weight()[static_cast<std::size_t>(i)], 1e-8);
}

TEST(Assemble, ManufacturedOrder) {
    // L v / a = -v'' - (a'/a) v' + v for f = 2 + cos, v = sin
    auto err = [](int N) {
        const Grid g(N);
        const auto model = running(1);
        const auto op = assemble(model, g);
        const auto v = GridFn::sample(g, [](double r) { return std::sin(two_pi * r); });
        const auto Lv = op.apply(v);
        double e = 0;
        for (int i = 0; i < N; ++i) {
            const double r = g.node(i);
            const double a = 2 + std::cos(two_pi * r);
            const double da = -two_pi * std::sin(two_pi * r);
            const double exact = -(da * two_pi * std::cos(two_pi * r) - a * two_pi * two_pi * std::sin(two_pi * r)) +
                                 a * std::sin(two_pi * r);
            e = std::max(e, std::abs(Lv[static_cast<std::size_t>(i)] - exact));
        }
        return e;
    };
    const double e1 = err(256), e2 = err(512);
    EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(SolveLinear, Constants) {
    const auto op = assemble(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 4), Grid(128));
    const auto v = solve_linear(op, GridFn(128, 1.0));
    for (double x : v) EXPECT_NEAR(x, 1.0, 1e-12);
    const auto z = solve_linear(op, GridFn(128, 0.0));
    EXPECT_EQ(z.max_abs(), 0.0);
}

TEST(SolveLinear, ManufacturedSine) {
    const Grid g(512);
    const auto op = assemble(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 1), g);
    const auto h = GridFn::sample(g, [](double r) { return (1 + two_pi * two_pi) * std::sin(two_pi * r); });
    const auto v = solve_linear(op, h) - GridFn::sample(g, [](double r) { return std::sin(two_pi * r); });
    EXPECT_LT(v.max_abs(), 1e-4);
}

TEST(CyclicSolver, MatchesDenseSolve) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    const int n = 37;
    std::vector<double> diag(n), cpl(n);
    for (int i = 0; i < n; ++i) {
        diag[static_cast<std::size_t>(i)] = 4 + u(rng);
        cpl[static_cast<std::size_t>(i)] = u(rng);
    }
    const CyclicTridiagonal m(diag, cpl);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        d(i, i) = diag[static_cast<std::size_t>(i)];
        d(i, (i + 1) % n) += cpl[static_cast<std::size_t>(i)];
        d((i + 1) % n, i) += cpl[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = u(rng);
    const Eigen::VectorXd ref = d.lu().solve(b);
    std::vector<double> x(b.data(), b.data() + n);
    CyclicFactorization(m).solve(x);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(x[static_cast<std::size_t>(i)], ref(i), 1e-12);
    EXPECT_TRUE(m.positive_definite());
}

TEST(Coercivity, ConstantModels) {
    const Grid g(128);
    const auto one = coercivity_check(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 1), g);
    EXPECT_TRUE(one.is_coercive);
    EXPECT_NEAR(one.lambda_min, 1.0, 1e-9);
    const auto zero = coercivity_check(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(0), 1), g);
    EXPECT_FALSE(zero.is_coercive);
    EXPECT_NEAR(zero.lambda_min, 0.0, 1e-9);
    const auto neg = coercivity_check(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(-1), 1), g);
    EXPECT_FALSE(neg.is_coercive);
    EXPECT_NEAR(neg.lambda_min, -1.0, 1e-9);
}

TEST(Coercivity, NonCoerciveOperatorRefusesToFactor) {
    const DiscreteOperator op(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(-1), 1), Grid(64));
    EXPECT_FALSE(op.positive_definite());
    EXPECT_THROW(solve_linear(op, GridFn(64, 1.0)), CoercivityFailure);
}

TEST(Coercivity, SecondEigenvalueOfConstantModel) {
    // discrete spectrum of -D2 + 1: 1 + (4/h^2) sin^2(pi k h)
    const Grid g(64);
    const auto op = assemble(OperatorModel(PeriodicFn::constant(1), PeriodicFn::constant(1), 1), g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op));
    const double h = g.spacing();
    const double s = std::sin(std::numbers::pi * h);
    EXPECT_NEAR(es.eigenvalues()(1), 1 + 4 * s * s / (h * h), 1e-8);
}
