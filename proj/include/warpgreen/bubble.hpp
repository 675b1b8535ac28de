#pragma once

#include <optional>

#include "warpgreen/operator.hpp"

namespace warpgreen {

struct BubbleParams {
    double eps = 0.1;
    double s = 0.5;
    std::optional<double> p;           // matched power exponent
    std::optional<double> log_lambda;  // matched exponential parameter, as ln(lambda)

    void validate() const;
};

// ln[(4/eps^2) e^x / (1 + e^x)^2], x = sqrt2 (r - s) / eps
double U_eval(const BubbleParams& bp, double r);
double U_derivative(const BubbleParams& bp, double r);
double U_second_derivative(const BubbleParams& bp, double r);
// e^U = (4/eps^2) sigma (1 - sigma)
double exp_U(const BubbleParams& bp, double r);

// Integral of e^U over [0,1].
double bubble_mass(const BubbleParams& bp);

struct ProfileFn {
    GridFn U;
    GridFn PU;
};

// PU solves the linear periodic problem with source e^U.
ProfileFn project(const DiscreteOperator& op, const BubbleParams& bp);
ProfileFn project(const OperatorModel& model, const Grid& grid, const BubbleParams& bp);

struct PowerMatch {
    double eps = 0.0;
    double rho = 0.0;
};

// eps = 2 sqrt2 H00 / p, rho = 1/p
PowerMatch match_eps_to_p(double H00, double p);
// lambda = (4/eps^2) exp(-2 sqrt2 H00 / eps)
double match_lambda_to_eps(double H00, double eps);
double match_log_lambda_to_eps(double H00, double eps);
// Inverse of the above on the increasing branch eps < sqrt2 H00.
double eps_from_log_lambda(double H00, double log_lambda);

}  // namespace warpgreen
