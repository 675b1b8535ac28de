#include "warpgreen/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "warpgreen/errors.hpp"

namespace warpgreen {

namespace {

constexpr double clip_floor = 1e-14;
constexpr double two_sqrt2 = 2.0 * std::numbers::sqrt2;

double norm2(const GridFn& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

const char* family_name(BranchFamily f) { return f == BranchFamily::Power ? "power" : "exponential"; }

}  // namespace

ExpProblem ExpProblem::from_lambda(double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    return {std::log(lambda)};
}

double ExpProblem::lambda() const { return std::exp(log_lambda); }

NonlinearTerms nonlinear_terms(const GridFn& v, const Nonlinearity& problem) {
    NonlinearTerms t{GridFn(v.size(), 0.0), GridFn(v.size(), 0.0), 0};
    if (const auto* pw = std::get_if<PowerProblem>(&problem)) {
        const double p = pw->p;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double x = v[i];
            if (x < clip_floor) {
                x = clip_floor;
                ++t.clipped;
            }
            const double lx = std::log(x);
            t.value[i] = std::exp(p * lx);
            t.slope[i] = p * std::exp((p - 1) * lx);
        }
        if (static_cast<double>(t.clipped) > 0.01 * static_cast<double>(v.size()))
            throw NonPositiveIterate("power iterate non-positive on " + std::to_string(t.clipped) + " of " +
                                     std::to_string(v.size()) + " nodes");
    } else {
        const double ll = std::get<ExpProblem>(problem).log_lambda;
        for (std::size_t i = 0; i < v.size(); ++i) {
            t.value[i] = std::exp(v[i] + ll);
            t.slope[i] = t.value[i];
        }
    }
    return t;
}

namespace {

GridFn residual_from(const DiscreteOperator& op, const GridFn& v, const NonlinearTerms& t) {
    GridFn r = op.apply(v);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= op.weight()[i] * t.value[i];
    return r;
}

double backward_error_from(const DiscreteOperator& op, const GridFn& v, const NonlinearTerms& t,
                           const GridFn& r) {
    const GridFn scale = op.apply_abs(v);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double denom = scale[i] + op.weight()[i] * std::abs(t.value[i]);
        const double ri = std::abs(r[i]);
        worst = std::max(worst, denom > 0 ? ri / denom : (ri > 0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
    return worst;
}

}  // namespace

GridFn residual(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem) {
    if (v.size() != static_cast<std::size_t>(op.grid().size()))
        throw ValidationError("iterate length does not match the grid");
    return residual_from(op, v, nonlinear_terms(v, problem));
}

GridFn residual_power(const DiscreteOperator& op, const GridFn& v, double p) {
    return residual(op, v, PowerProblem{p});
}

GridFn residual_exp(const DiscreteOperator& op, const GridFn& v, double lambda) {
    return residual(op, v, ExpProblem::from_lambda(lambda));
}

double backward_error(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem) {
    const auto t = nonlinear_terms(v, problem);
    return backward_error_from(op, v, t, residual_from(op, v, t));
}

double green_form_residual(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem) {
    const auto t = nonlinear_terms(v, problem);
    GridFn rhs(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) rhs[i] = op.weight()[i] * t.value[i];
    return (v - op.solve_weighted(std::move(rhs))).max_abs();
}

GridFn jacobian_apply(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem, const GridFn& d) {
    const auto t = nonlinear_terms(v, problem);
    GridFn out = op.apply(d);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= op.weight()[i] * t.slope[i] * d[i];
    return out;
}

JacobianCheck jacobian_fd_check(const DiscreteOperator& op, const GridFn& v, const Nonlinearity& problem,
                                int directions, std::uint64_t seed, double step) {
    JacobianCheck out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto t0 = nonlinear_terms(v, problem);
    for (int k = 0; k < directions; ++k) {
        GridFn d(v.size(), 0.0);
        for (double& x : d.values()) x = unit(rng);
        GridFn vp = v, vm = v;
        for (std::size_t i = 0; i < v.size(); ++i) {
            vp[i] += step * d[i];
            vm[i] -= step * d[i];
        }
        const auto tp = nonlinear_terms(vp, problem);
        const auto tm = nonlinear_terms(vm, problem);
        const GridFn rp = residual_from(op, vp, tp), rm = residual_from(op, vm, tm);
        const GridFn jd = jacobian_apply(op, v, problem, d);

        double full_err = 0.0, nl_err = 0.0, nl_scale = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            full_err = std::max(full_err, std::abs(jd[i] - (rp[i] - rm[i]) / (2 * step)));
            const double a = op.weight()[i];
            const double exact = a * t0.slope[i] * d[i];
            const double fd = a * (tp.value[i] - tm.value[i]) / (2 * step);
            nl_err = std::max(nl_err, std::abs(exact - fd));
            nl_scale = std::max(nl_scale, std::abs(exact));
        }
        out.full_relative = std::max(out.full_relative, full_err / jd.max_abs());
        if (nl_scale > 0) out.nonlinear_relative = std::max(out.nonlinear_relative, nl_err / nl_scale);
    }
    return out;
}

NewtonResult newton_solve(const DiscreteOperator& op, const GridFn& seed, const Nonlinearity& problem,
                          const SolverConfig& cfg) {
    if (!(cfg.newton_tol > 0.0) || cfg.max_iter < 1 || cfg.max_halvings < 0)
        throw ValidationError("invalid solver configuration");
    if (seed.size() != static_cast<std::size_t>(op.grid().size()))
        throw ValidationError("seed length does not match the grid");
    const bool power = std::holds_alternative<PowerProblem>(problem);
    const auto positive = [](const GridFn& x) { return std::all_of(x.begin(), x.end(), [](double y) { return y > 0.0; }); };

    GridFn v = seed;
    auto terms = nonlinear_terms(v, problem);
    GridFn r = residual_from(op, v, terms);
    for (int it = 0;; ++it) {
        const double be = backward_error_from(op, v, terms, r);
        GridFn shift(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) shift[i] = -op.weight()[i] * terms.slope[i];
        GridFn dv = r;
        for (double& x : dv.values()) x = -x;
        try {
            CyclicFactorization(op.matrix().shifted(shift.span())).solve(dv.span());
        } catch (const SingularSystem& e) {
            throw JacobianSingular(std::string("Newton Jacobian is singular: ") + e.what());
        }
        // converged when both the backward error and the Newton correction are below tol
        const double correction = dv.max_abs();
        if (be < cfg.newton_tol && correction <= cfg.newton_tol * std::max(1.0, v.max_abs())) {
            if (power && !positive(v)) throw NonPositiveIterate("converged power iterate is not positive");
            return {v, it, be, r.max_abs(), correction};
        }
        if (it == cfg.max_iter)
            throw NoConvergence("Newton did not converge in " + std::to_string(cfg.max_iter) +
                                " iterations (backward error " + std::to_string(be) + ", correction " +
                                std::to_string(correction) + ")");

        const double merit = norm2(r);
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k <= cfg.max_halvings; ++k, step *= 0.5) {
            GridFn trial = v;
            for (std::size_t i = 0; i < v.size(); ++i) trial[i] += step * dv[i];
            if (power && !positive(trial)) continue;
            NonlinearTerms tt;
            try {
                tt = nonlinear_terms(trial, problem);
            } catch (const NonPositiveIterate&) {
                continue;
            }
            GridFn rt = residual_from(op, trial, tt);
            const double m = norm2(rt);
            if (std::isfinite(m) && m < merit) {
                v = std::move(trial);
                terms = std::move(tt);
                r = std::move(rt);
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NoConvergence("line search exhausted after " + std::to_string(cfg.max_halvings) +
                                " halvings (backward error " + std::to_string(be) + ")");
    }
}

GridFn refine_periodic(const GridFn& v) {
    const long n = static_cast<long>(v.size());
    GridFn out(2 * v.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(2 * i)] = v[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(2 * i + 1)] =
            (-v.at_wrapped(i - 1) + 9 * v.at_wrapped(i) + 9 * v.at_wrapped(i + 1) - v.at_wrapped(i + 2)) / 16;
    }
    return out;
}

RefinementCheck refinement_check(const OperatorModel& model, const GridFn& v, const Nonlinearity& problem,
                                 const SolverConfig& cfg) {
    const Grid fine(static_cast<int>(2 * v.size()));
    const DiscreteOperator op(model, fine);
    const auto res = newton_solve(op, refine_periodic(v), problem, cfg);
    RefinementCheck out;
    out.iterations = res.iterations;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.difference = std::max(out.difference, std::abs(res.v[2 * i] - v[i]));
    return out;
}

namespace {

double peak_location(const GridFn& v) {
    const auto k = static_cast<long>(std::max_element(v.begin(), v.end()) - v.begin());
    const double vm = v.at_wrapped(k - 1), v0 = v.at_wrapped(k), vp = v.at_wrapped(k + 1);
    const double curv = vm - 2 * v0 + vp;
    const double off = curv != 0.0 ? 0.5 * (vm - vp) / curv : 0.0;
    return wrap_unit((static_cast<double>(k) + off) * v.spacing());
}

double sup_distance(const GridFn& a, double scale, const GridFn& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(scale * a[i] - b[i]));
    return worst;
}

void fill_diagnostics(BranchStep& st, const SolutionBranch& br, const Nonlinearity& problem) {
    const GridFn& v = st.v;
    st.v_max = v.max();
    st.v_min = v.min();
    st.peak_location = peak_location(v);
    st.value_at_r0 = interp_periodic(v.span(), br.r0);
    const auto terms = nonlinear_terms(v, problem);
    const double mass = quad_periodic(terms.value);
    if (const auto* pw = std::get_if<PowerProblem>(&problem)) {
        const double p = pw->p;
        st.eps.formula = match_eps_to_p(br.H00, p).eps;
        st.eps.peak = std::exp(-0.5 * (std::log(p) + p * std::log(st.v_max)));
        st.eps.mass = two_sqrt2 / (p * mass);
        st.error = sup_distance(v, 1.0, br.limit_profile);
        st.matching_ratio = p * st.eps.peak / (two_sqrt2 * br.H00);
        st.mass_product = st.eps.peak * p * mass / two_sqrt2;
    } else {
        const double ll = std::get<ExpProblem>(problem).log_lambda;
        st.eps.formula = eps_from_log_lambda(br.H00, ll);
        st.eps.peak = std::exp(-0.5 * (ll + st.v_max));
        st.eps.mass = two_sqrt2 / mass;
        st.error = sup_distance(v, st.eps.peak, br.limit_profile);
        st.error_mass = sup_distance(v, st.eps.mass, br.limit_profile);
        st.error_formula = sup_distance(v, st.eps.formula, br.limit_profile);
        st.matching_ratio = st.eps.peak / st.eps.formula;
        st.mass_product = st.eps.peak * mass / two_sqrt2;
    }
}

// gamma * PU with gamma^p PU(r0)^p = gamma / eps^2: the peak of v^p matches e^U(r0).
GridFn power_seed(const DiscreteOperator& op, double r0, double eps, double p) {
    const auto prof = project(op, BubbleParams{eps, r0, p, std::nullopt});
    const double peak = interp_periodic(prof.PU.span(), r0);
    const double gamma = std::exp(-(std::log(peak) + 2 * std::log(eps)) / (p - 1)) / peak;
    return gamma * prof.PU;
}

}  // namespace

SolutionBranch continue_branch(const OperatorModel& model, const BranchOptions& opts) {
    SolutionBranch br;
    br.family = opts.family;
    br.grid_N = opts.solver.grid_N;

    const GreensTables tables = greens_matrix(model, Grid(opts.table_N), false);
    const auto crit = locate_critical(tables, opts.locate);  // ConstantV propagates
    if (opts.r0) {
        const double want = *opts.r0;
        const auto it = std::min_element(crit.begin(), crit.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.r0 - want) < std::abs(b.r0 - want);
        });
        if (it == crit.end() || std::abs(it->r0 - want) > 4 * tables.grid().spacing())
            throw ValidationError("requested r0 = " + std::to_string(want) + " is not a critical point");
        br.concentration = *it;
        if (!br.concentration.nondegenerate) throw ValidationError("requested r0 is a degenerate critical point");
    } else {
        br.concentration = select_concentration_point(crit);
    }
    br.r0 = br.concentration.r0;
    br.H00 = interp_periodic(tables.H_diag().span(), br.r0);

    const Grid grid(opts.solver.grid_N);
    const DiscreteOperator op(model, grid);
    if (!op.positive_definite()) throw CoercivityFailure("operator is not coercive", std::nan(""));
    br.limit_profile = greens_column(op, br.r0);
    const double scale = opts.family == BranchFamily::Power ? 1.0 / br.H00 : two_sqrt2;
    for (double& x : br.limit_profile.values()) x *= scale;

    std::vector<Nonlinearity> schedule;
    if (opts.family == BranchFamily::Power) {
        if (opts.p_list.empty()) throw ValidationError("empty p schedule");
        for (std::size_t k = 0; k < opts.p_list.size(); ++k) {
            if (k && !(opts.p_list[k] > opts.p_list[k - 1])) throw ValidationError("p schedule must increase");
            schedule.emplace_back(PowerProblem{opts.p_list[k]});
        }
    } else {
        if (opts.steps < 1) throw ValidationError("steps must be positive");
        if (!(opts.ratio > 0.0 && opts.ratio < 1.0)) throw ValidationError("lambda ratio must lie in (0,1)");
        const double ll0 = match_log_lambda_to_eps(br.H00, opts.eps0);
        for (int k = 0; k < opts.steps; ++k) schedule.emplace_back(ExpProblem{ll0 + k * std::log(opts.ratio)});
    }

    for (const auto& problem : schedule) {
        BranchStep st;
        try {
            NewtonResult res;
            if (const auto* pw = std::get_if<PowerProblem>(&problem)) {
                st.parameter = pw->p;
                const double eps = match_eps_to_p(br.H00, pw->p).eps;
                res = newton_solve(op, power_seed(op, br.r0, eps, pw->p), problem, opts.solver);
            } else {
                const double ll = std::get<ExpProblem>(problem).log_lambda;
                st.parameter = ll;
                const double eps = eps_from_log_lambda(br.H00, ll);
                const auto ansatz = [&] { return project(op, BubbleParams{eps, br.r0, std::nullopt, ll}).PU; };
                if (br.steps.empty()) {
                    res = newton_solve(op, ansatz(), problem, opts.solver);
                } else {
                    try {
                        res = newton_solve(op, br.steps.back().v, problem, opts.solver);
                        st.seeded_from_previous = true;
                    } catch (const ConvergenceError&) {
                        res = newton_solve(op, ansatz(), problem, opts.solver);
                    }
                }
            }
            st.v = std::move(res.v);
            st.iterations = res.iterations;
            st.backward_error = res.backward_error;
            st.residual_sup = res.residual_sup;
            st.correction = res.correction;
            st.green_residual = green_form_residual(op, st.v, problem);
            fill_diagnostics(st, br, problem);
        } catch (const Error& e) {
            br.failure = std::string(family_name(opts.family)) + " branch stopped at parameter " +
                         std::to_string(st.parameter) + ": " + e.what();
            break;
        }
        br.steps.push_back(std::move(st));
    }
    return br;
}

}  // namespace warpgreen
