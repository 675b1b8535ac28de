#include "warpgreen/bubble.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "warpgreen/errors.hpp"

namespace warpgreen {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;

double scaled_offset(const BubbleParams& bp, double r) { return sqrt2 * (r - bp.s) / bp.eps; }

// logistic without overflow
double sigma(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

void BubbleParams::validate() const {
    if (!(eps > 0.0)) throw ValidationError("bubble scale eps must be positive");
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("concentration point s must lie in (0,1)");
}

double U_eval(const BubbleParams& bp, double r) {
    const double x = std::abs(scaled_offset(bp, r));
    return std::log(4.0 / (bp.eps * bp.eps)) - x - 2.0 * std::log1p(std::exp(-x));
}

double U_derivative(const BubbleParams& bp, double r) {
    const double sg = sigma(scaled_offset(bp, r));
    return sqrt2 / bp.eps * (1.0 - 2.0 * sg);
}

double U_second_derivative(const BubbleParams& bp, double r) {
    const double x = scaled_offset(bp, r);
    const double sg = sigma(x), sc = sigma(-x);
    return -4.0 / (bp.eps * bp.eps) * sg * sc;
}

double exp_U(const BubbleParams& bp, double r) {
    const double x = scaled_offset(bp, r);
    return 4.0 / (bp.eps * bp.eps) * sigma(x) * sigma(-x);
}

double bubble_mass(const BubbleParams& bp) {
    bp.validate();
    // antiderivative of e^U is (2 sqrt2 / eps) sigma(x); sigma(x1) - sigma(x0) = sigma(-x0) - sigma(-x1)
    const double width = sigma(-scaled_offset(bp, 0.0)) - sigma(-scaled_offset(bp, 1.0));
    return 2.0 * sqrt2 / bp.eps * width;
}

ProfileFn project(const DiscreteOperator& op, const BubbleParams& bp) {
    bp.validate();
    const Grid& grid = op.grid();
    if (bp.eps < 8 * grid.spacing())
        throw ResolutionError("eps = " + std::to_string(bp.eps) + " is under-resolved: need eps >= 8h = " +
                              std::to_string(8 * grid.spacing()));
    ProfileFn out;
    out.U = GridFn::sample(grid, [&](double r) { return U_eval(bp, r); });
    const GridFn source = GridFn::sample(grid, [&](double r) { return exp_U(bp, r); });
    out.PU = solve_linear(op, source);
    return out;
}

ProfileFn project(const OperatorModel& model, const Grid& grid, const BubbleParams& bp) {
    return project(DiscreteOperator(model, grid), bp);
}

PowerMatch match_eps_to_p(double H00, double p) {
    if (!(H00 > 0.0)) throw ValidationError("H(r0,r0) must be positive");
    if (!(p > 1.0)) throw ValidationError("power exponent must exceed 1");
    return {2.0 * sqrt2 * H00 / p, 1.0 / p};
}

double match_log_lambda_to_eps(double H00, double eps) {
    if (!(H00 > 0.0)) throw ValidationError("H(r0,r0) must be positive");
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    return std::log(4.0 / (eps * eps)) - 2.0 * sqrt2 * H00 / eps;
}

double match_lambda_to_eps(double H00, double eps) { return std::exp(match_log_lambda_to_eps(H00, eps)); }

double eps_from_log_lambda(double H00, double log_lambda) {
    const double eps_top = sqrt2 * H00;  // maximiser of ln lambda(eps)
    const double top = match_log_lambda_to_eps(H00, eps_top);
    if (!(log_lambda < top))
        throw ValidationError("ln lambda = " + std::to_string(log_lambda) + " exceeds the branch maximum " +
                              std::to_string(top));
    // monotone in u = ln eps on (-inf, ln eps_top)
    const auto f = [&](double u) { return match_log_lambda_to_eps(H00, std::exp(u)) - log_lambda; };
    double lo = std::log(eps_top) - 1.0;
    while (f(lo) > 0) lo -= 1.0;
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, std::log(eps_top), boost::math::tools::eps_tolerance<double>(52), iters);
    return std::exp(0.5 * (a + b));
}

}  // namespace warpgreen
