#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "warpgreen/errors.hpp"
#include "warpgreen/periodic.hpp"

using namespace warpgreen;
constexpr double two_pi = 2 * std::numbers::pi;

TEST(PeriodicFn, ParsesBuiltInFamilies) {
    EXPECT_DOUBLE_EQ(PeriodicFn::parse("const:2.5")(0.3), 2.5);
    const auto f = PeriodicFn::parse("trig:2,1");
    EXPECT_NEAR(f(0.0), 3.0, 1e-15);
    EXPECT_NEAR(f(0.5), 1.0, 1e-15);
    const auto g = PeriodicFn::parse("trig:0,0,1");
    EXPECT_NEAR(g(0.25), 1.0, 1e-15);
    const auto e = PeriodicFn::parse("exptrig:1,0.5");
    EXPECT_NEAR(e(0.0), std::exp(0.5), 1e-14);
    EXPECT_TRUE(PeriodicFn::parse("const:1").is_constant());
    EXPECT_FALSE(f.is_constant());
}

TEST(PeriodicFn, RejectsMalformedText) {
    EXPECT_THROW(PeriodicFn::parse("cosine:1"), ParseError);
    EXPECT_THROW(PeriodicFn::parse("const:"), ParseError);
    EXPECT_THROW(PeriodicFn::parse("trig:1,x"), ParseError);
    EXPECT_THROW(PeriodicFn::parse(""), ParseError);
}

TEST(PeriodicFn, DescribeRoundTrips) {
    for (const char* text : {"const:1", "trig:2,1", "trig:1,0.25,-0.5,0.125", "exptrig:2,0.3"}) {
        const auto f = PeriodicFn::parse(text);
        const auto g = PeriodicFn::parse(f.describe());
        for (double r : {0.0, 0.13, 0.5, 0.77}) EXPECT_DOUBLE_EQ(f(r), g(r)) << text;
    }
}

TEST(PeriodicFn, JetMatchesDifferences) {
    const auto f = PeriodicFn::parse("exptrig:1.5,0.7") + PeriodicFn::parse("trig:0,0.2,0.1");
    const double d = 1e-5;
    for (double r : {0.05, 0.3, 0.61, 0.9}) {
        const Jet j = f.jet(r);
        EXPECT_NEAR(j.d1, (f(r + d) - f(r - d)) / (2 * d), 1e-7);
        EXPECT_NEAR(j.d2, (f.derivative(r + d) - f.derivative(r - d)) / (2 * d), 1e-6);
    }
}

TEST(PeriodicFn, IsPeriodic) {
    const auto f = PeriodicFn::parse("trig:2,1,0.3");
    for (double r : {0.1, 0.45, 0.8}) EXPECT_NEAR(f(r), f(r + 1.0), 1e-13);
}

TEST(PeriodicFn, BallNormOfCosine) {
    // |cos| (1 + 4 pi^2) + 2 pi |sin| peaks at sqrt((1 + 4 pi^2)^2 + 4 pi^2)
    const double expect = std::hypot(1 + two_pi * two_pi, two_pi);
    EXPECT_NEAR(ball_norm(PeriodicFn::parse("trig:0,1"), 200001), expect, 1e-6 * expect);
    EXPECT_DOUBLE_EQ(ball_norm(PeriodicFn::constant(-3)), 3.0);
}

TEST(PeriodicFn, ScaledAndSum) {
    const auto f = PeriodicFn::parse("trig:1,1").scaled(2.0) + PeriodicFn::constant(1.0);
    EXPECT_NEAR(f(0.0), 5.0, 1e-14);
}

TEST(Grid, RejectsTooFewPoints) {
    EXPECT_THROW(Grid(8), ValidationError);
    const Grid g(64);
    EXPECT_EQ(g.wrap(-1), 63);
    EXPECT_EQ(g.wrap(64), 0);
}

TEST(Quadrature, PeriodicRule) {
    const Grid g64(64);
    EXPECT_DOUBLE_EQ(quad_periodic(GridFn(64, 1.0)), 1.0);
    EXPECT_NEAR(quad_periodic(GridFn::sample(g64, [](double r) { return std::sin(two_pi * r); })), 0.0, 1e-15);
    const Grid g256(256);
    const auto v = GridFn::sample(g256, [](double r) { return std::exp(std::cos(two_pi * r)); });
    const double ref = oracle::simpson([](double r) { return std::exp(std::cos(two_pi * r)); }, 0.0, 1.0, 1e-15);
    EXPECT_NEAR(quad_periodic(v), ref, 1e-12);
    EXPECT_NEAR(ref, std::cyl_bessel_i(0.0, 1.0), 1e-12);
}

TEST(Quadrature, Segment) {
    EXPECT_NEAR(quad_segment([](double) { return 1.0; }, 0.25, 0.5), 0.25, 1e-15);
    EXPECT_EQ(quad_segment([](double) { return 1.0; }, 0.4, 0.4), 0.0);
    const double got = quad_segment([](double t) { return std::exp(-t); }, 0.25, 0.5);
    EXPECT_NEAR(got, std::exp(-0.25) - std::exp(-0.5), 1e-13);
    EXPECT_NEAR(quad_segment([](double t) { return t * t; }, 0.5, 0.25), -(0.125 - 0.25 * 0.25 * 0.25) / 3, 1e-14);
}

TEST(Differences, PeriodicOrders) {
    const Grid g(512);
    EXPECT_EQ(diff_periodic(GridFn(512, 3.0), 1).max_abs(), 0.0);
    const auto v = GridFn::sample(g, [](double r) { return std::sin(two_pi * r); });
    const auto d1 = diff_periodic(v, 1) - GridFn::sample(g, [](double r) { return two_pi * std::cos(two_pi * r); });
    EXPECT_LT(d1.max_abs(), 1e-3);
    const auto d2 = diff_periodic(v, 2) +
                    GridFn::sample(g, [](double r) { return two_pi * two_pi * std::sin(two_pi * r); });
    EXPECT_LT(d2.max_abs() / (two_pi * two_pi), 1e-3);
}

TEST(Interpolation, CubicLagrange) {
    const Grid g(128);
    const auto fn = [](double r) { return std::cos(two_pi * r) + 0.3 * std::sin(2 * two_pi * r); };
    const auto v = GridFn::sample(g, fn);
    for (double r : {0.0, 0.0031, 0.4999, 0.73, 0.9999, 1.2}) {
        EXPECT_NEAR(interp_periodic(v.span(), r), fn(r), 1e-6);
        const double d = two_pi * (-std::sin(two_pi * r) + 0.6 * std::cos(2 * two_pi * r));
        EXPECT_NEAR(interp_periodic_derivative(v.span(), r), d, 1e-3);
    }
    // exact at nodes
    EXPECT_DOUBLE_EQ(interp_periodic(v.span(), g.node(17)), v[17]);
}
