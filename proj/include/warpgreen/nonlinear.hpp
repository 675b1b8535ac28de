#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "warpgreen/bubble.hpp"
#include "warpgreen/locator.hpp"

namespace warpgreen {

struct PowerProblem {
    double p = 2.0;
};

// lambda is carried as its logarithm: it underflows for small eps.
struct ExpProblem {
    double log_lambda = 0.0;
    static ExpProblem from_lambda(double lambda);
    double lambda() const;
};

using Nonlinearity = std::variant<PowerProblem, ExpProblem>;

struct SolverConfig {
    double newton_tol = 1e-10;  // backward error and relative Newton correction
    int max_iter = 50;
    int max_halvings = 30;
    int grid_N = 8192;
};

// N(v) and N'(v) on the nodes.
struct NonlinearTerms {
    GridFn value;
    GridFn slope;
    std::size_t clipped = 0;
};

NonlinearTerms nonlinear_terms(const GridFn& v, const Nonlinearity& problem);

// A v - a N(v)
GridFn residual(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem);
GridFn residual_power(const DiscreteOperator& op, const GridFn& v, double p);
GridFn residual_exp(const DiscreteOperator& op, const GridFn& v, double lambda);

// max_i |R_i| / (|A| |v| + a |N(v)|)_i
double backward_error(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem);

// sup |v - A^{-1}(a N(v))|, the residual of the equation in Green's function form.
// Unlike A v - a N(v) it is not amplified by the O(N^2) operator norm.
double green_form_residual(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem);

// (A - diag(a N'(v))) d
GridFn jacobian_apply(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem, const GridFn& d);

struct JacobianCheck {
    double full_relative = 0.0;       // whole residual
    double nonlinear_relative = 0.0;  // nonlinear part alone
};

// Analytic Jacobian against central differences on random directions.
JacobianCheck jacobian_fd_check(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem,
                                int directions, std::uint64_t seed, double step = 1e-6);

struct NewtonResult {
    GridFn v;
    int iterations = 0;
    double backward_error = 0.0;
    double residual_sup = 0.0;
    double correction = 0.0;  // |J^{-1} R|_inf at the returned iterate
};

NewtonResult newton_solve(const DiscreteOperator& op, const GridFn& seed, const Nonlinearity& problem,
                          const SolverConfig& cfg);

enum class BranchFamily { Power, Exponential };

struct BranchOptions {
    BranchFamily family = BranchFamily::Exponential;
    SolverConfig solver;
    int table_N = 1024;
    std::optional<double> r0;  // otherwise chosen by select_concentration_point
    LocateOptions locate;
    // exponential branch: lambda_k = lambda(eps0) * ratio^k
    double eps0 = 0.02;
    int steps = 12;
    double ratio = 0.5;
    // power branch
    std::vector<double> p_list{40, 80, 160, 320};
};

struct EpsEstimates {
    double peak = 0.0;     // from the peak height of the nonlinear term
    double mass = 0.0;     // from its total mass
    double formula = 0.0;  // matching rule (inverted for the exponential problem)
};

struct BranchStep {
    double parameter = 0.0;  // p, or ln lambda
    GridFn v;
    int iterations = 0;
    double backward_error = 0.0;
    double residual_sup = 0.0;
    double correction = 0.0;
    double green_residual = 0.0;
    bool seeded_from_previous = false;
    double peak_location = 0.0;
    double v_max = 0.0;
    double v_min = 0.0;
    double value_at_r0 = 0.0;
    EpsEstimates eps;
    double error = 0.0;          // sup distance to the limit profile (peak-fit eps for exp)
    double error_mass = 0.0;     // exp only
    double error_formula = 0.0;  // exp only
    double matching_ratio = 0.0; // power: p eps_peak / (2 sqrt2 H00); exp: eps_peak / eps_formula
    double mass_product = 0.0;   // exp: eps_peak lambda quad(e^v) / (2 sqrt2)
};

struct SolutionBranch {
    BranchFamily family = BranchFamily::Exponential;
    CriticalPointReport concentration;
    double r0 = 0.0;
    double H00 = 0.0;
    int grid_N = 0;
    GridFn limit_profile;  // 2 sqrt2 G(., r0) or G(., r0) / H00
    std::vector<BranchStep> steps;
    std::optional<std::string> failure;
};

SolutionBranch continue_branch(const OperatorModel& model, const BranchOptions& opts);

// Cubic midpoint refinement N -> 2N.
GridFn refine_periodic(const GridFn& v);

struct RefinementCheck {
    double difference = 0.0;  // sup over common nodes
    int iterations = 0;
};

RefinementCheck refinement_check(const OperatorModel& model, const GridFn& v, const Nonlinearity& problem,
                                 const SolverConfig& cfg);

}  // namespace warpgreen
