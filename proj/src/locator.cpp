#include "warpgreen/locator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "warpgreen/errors.hpp"

namespace warpgreen {

double default_tol(const Grid& grid) {
    const double h = grid.spacing();
    return std::max(10 * h * h, 1e-6);
}

double V_eval(const GreensTables& t, double r) {
    return interp_periodic(t.H_diag().span(), r) / t.model().weight(r);
}

double criterion_eval(const GreensTables& t, double r) {
    return interp_periodic(t.Hr_diag().span(), r) - 0.5;
}

namespace {

// Illinois regula falsi on a bracketing interval.
double refine_root(const GreensTables& t, double lo, double hi, double glo, double ghi) {
    int side = 0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = (lo * ghi - hi * glo) / (ghi - glo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double gm = criterion_eval(t, mid);
        if (gm == 0.0) return mid;
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = mid;
            ghi = gm;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
    }
    return std::abs(glo) < std::abs(ghi) ? lo : hi;
}

}  // namespace

std::vector<CriticalPointReport> locate_critical(const GreensTables& t, const LocateOptions& opts) {
    const Grid& grid = t.grid();
    const int n = grid.size();
    const double tol = opts.tol > 0 ? opts.tol : default_tol(grid);

    GridFn g = t.Hr_diag();
    for (double& x : g.values()) x -= 0.5;
    if (g.max_abs() < opts.constant_floor)
        throw ConstantV("concentration functional is constant (max |dr H - 1/2| = " +
                            std::to_string(g.max_abs()) + ")",
                        g.max_abs());

    const GridFn slope = t.second_form_diag();
    const double threshold = std::max(opts.nondeg_abs, opts.nondeg_rel * slope.max_abs());

    std::vector<double> roots;
    for (int j = 0; j < n; ++j) {
        const double a = g[static_cast<std::size_t>(j)];
        const double b = g.at_wrapped(j + 1);
        if (a == 0.0) {
            roots.push_back(grid.node(j));
        } else if ((a < 0) != (b < 0) && b != 0.0) {
            roots.push_back(wrap_unit(refine_root(t, grid.node(j), grid.node(j + 1), a, b)));
        }
    }

    std::vector<CriticalPointReport> out;
    out.reserve(roots.size());
    for (double r : roots) {
        CriticalPointReport rep;
        rep.r0 = r;
        rep.V_value = V_eval(t, r);
        rep.Hr_at_diag = interp_periodic(t.Hr_diag().span(), r);
        rep.second_form = interp_periodic(slope.span(), r);
        rep.V_second = 2 * rep.second_form / t.model().weight(r);
        rep.kind = rep.second_form < 0 ? CriticalKind::Maximum : CriticalKind::Minimum;
        rep.nondegenerate = std::abs(rep.second_form) > threshold;
        rep.tol_used = tol;
        rep.nondeg_threshold = threshold;
        rep.grid_N = n;
        out.push_back(rep);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.r0 < b.r0; });
    return out;
}

CriticalPointReport select_concentration_point(const std::vector<CriticalPointReport>& pts, double margin) {
    const CriticalPointReport* best = nullptr;
    for (const auto& p : pts) {
        if (!p.nondegenerate || p.r0 <= margin || p.r0 >= 1 - margin) continue;
        if (!best || std::abs(p.second_form) > std::abs(best->second_form)) best = &p;
    }
    if (!best) throw ValidationError("no nondegenerate interior critical point");
    return *best;
}

GridFn frechet_dH_kappa(const OperatorModel& model, const Grid& grid, double rbar, const PeriodicFn& theta,
                        double delta) {
    if (!(rbar > 0.0 && rbar < 1.0)) throw ValidationError("rbar must lie in (0,1)");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    const auto column = [&](double sign) {
        const OperatorModel m = model.with_potential(model.potential() + theta.scaled(sign * delta));
        const DiscreteOperator op(m, grid);
        if (!op.positive_definite())
            throw CoercivityFailure("perturbed potential is not coercive", std::nan(""));
        return regular_column(op, rbar);
    };
    const GridFn plus = column(1.0);
    const GridFn minus = column(-1.0);
    GridFn z = plus - minus;
    for (double& x : z.values()) x /= 2 * delta;
    return z;
}

double frechet_residual(const OperatorModel& model, const Grid& grid, double rbar, const PeriodicFn& theta,
                        const GridFn& z) {
    const DiscreteOperator op(model, grid);
    const GridFn Az = op.apply(z);
    const GridFn G = greens_column(op, rbar);
    double worst = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        worst = std::max(worst, std::abs(Az[u] / op.weight()[u] + theta(grid.node(i)) * G[u]));
    }
    return worst;
}

PeriodicFn random_perturbation(std::mt19937_64& rng, int modes, double target_norm) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(2 * modes + 1), 0.0);
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = coef(rng);
    const PeriodicFn raw = PeriodicFn::trig(c);
    return raw.scaled(target_norm / ball_norm(raw));
}

namespace {

GenericitySample run_trial(const OperatorModel& base, const GenericityOptions& opts, int trial) {
    GenericitySample s;
    s.trial = trial;
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    s.norm_drawn = opts.rho * (1.0 - unit(rng));  // in (0, rho]
    const PeriodicFn theta = random_perturbation(rng, opts.modes, s.norm_drawn);
    s.norm_measured = ball_norm(theta);
    s.perturbation = theta.describe();

    const Grid grid(opts.grid_N);
    const bool on_f = opts.target == PerturbTarget::Warping;
    const PeriodicFn perturbed = (on_f ? base.warping() : base.potential()) + theta;
    s.perturbed = perturbed.describe();
    const OperatorModel model = on_f ? base.with_warping(perturbed) : base.with_potential(perturbed);

    if (on_f && scan_min(perturbed, 4 * opts.grid_N) <= 0.0) {
        s.rejection = "perturbed warping not positive";
        return s;
    }
    const DiscreteOperator op(model, grid);
    if (!op.positive_definite()) {
        s.rejection = "perturbed operator not coercive";
        return s;
    }
    s.admissible = true;
    const GreensTables tables(op, std::nan(""));
    try {
        s.critical_points = locate_critical(tables, opts.locate);
    } catch (const ConstantV&) {
        s.constant_v = true;
        return s;
    }
    s.all_nondegenerate = !s.critical_points.empty();
    s.min_abs_second_form = s.critical_points.empty() ? 0.0 : std::abs(s.critical_points[0].second_form);
    for (const auto& c : s.critical_points) {
        s.all_nondegenerate = s.all_nondegenerate && c.nondegenerate;
        s.min_abs_second_form = std::min(s.min_abs_second_form, std::abs(c.second_form));
    }
    return s;
}

}  // namespace

std::vector<GenericitySample> genericity_sweep(const OperatorModel& base, const GenericityOptions& opts) {
    if (opts.trials < 0) throw ValidationError("trials must be non-negative");
    if (!(opts.rho > 0.0)) throw ValidationError("rho must be positive");
    if (opts.modes < 1) throw ValidationError("modes must be positive");
    std::vector<GenericitySample> out(static_cast<std::size_t>(opts.trials));
    if (out.empty()) return out;

    unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(opts.trials));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int i = next++; i < opts.trials; i = next++)
                        out[static_cast<std::size_t>(i)] = run_trial(base, opts, i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

GenericitySummary summarize(const std::vector<GenericitySample>& samples) {
    GenericitySummary s;
    s.trials = static_cast<int>(samples.size());
    for (const auto& x : samples) {
        if (!x.admissible) continue;
        ++s.admissible;
        if (x.all_nondegenerate) ++s.all_nondegenerate;
    }
    s.fraction = s.admissible ? static_cast<double>(s.all_nondegenerate) / s.admissible : 0.0;
    return s;
}

}  // namespace warpgreen
