#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "warpgreen/greens.hpp"

namespace warpgreen {

struct LocateOptions {
    double tol = 0.0;             // |dr H - 1/2| criterion; 0 means max(10 h^2, 1e-6)
    double nondeg_rel = 1e-3;     // nondegenerate if |second form| > nondeg_rel * max_t |second form|
    double nondeg_abs = 1e-9;     // ... and above this floor
    double constant_floor = 1e-9; // V treated as constant below this max |dr H - 1/2|
};

double default_tol(const Grid& grid);

enum class CriticalKind { Maximum, Minimum };

struct CriticalPointReport {
    double r0 = 0.0;
    double V_value = 0.0;
    double Hr_at_diag = 0.0;
    double second_form = 0.0;  // Hrr + Hrs at (r0, r0)
    double V_second = 0.0;     // 2 * second_form / a(r0)
    bool nondegenerate = false;
    CriticalKind kind = CriticalKind::Minimum;
    double tol_used = 0.0;
    double nondeg_threshold = 0.0;
    int grid_N = 0;
};

// H(r,r) / a(r), cubic along the diagonal.
double V_eval(const GreensTables& t, double r);
// dr H(r,r) - 1/2
double criterion_eval(const GreensTables& t, double r);

// Roots of dr H(t,t) - 1/2 on the diagonal; throws ConstantV when the map is flat.
std::vector<CriticalPointReport> locate_critical(const GreensTables& t, const LocateOptions& opts = {});

// Concentration point for the nonlinear problems: the nondegenerate root with the
// largest |second form| at distance > margin from 0 and 1.
CriticalPointReport select_concentration_point(const std::vector<CriticalPointReport>& pts,
                                               double margin = 0.05);

// Central difference in the potential: (H_{k+d th}(., rbar) - H_{k-d th}(., rbar)) / (2 d).
GridFn frechet_dH_kappa(const OperatorModel& model, const Grid& grid, double rbar, const PeriodicFn& theta,
                        double delta = 1e-5);
// sup |(A z)/a + theta G(., rbar)|, the linearized problem for z.
double frechet_residual(const OperatorModel& model, const Grid& grid, double rbar, const PeriodicFn& theta,
                        const GridFn& z);

enum class PerturbTarget { Warping, Potential };

struct GenericityOptions {
    PerturbTarget target = PerturbTarget::Warping;
    double rho = 0.05;
    int trials = 50;
    std::uint64_t seed = 1;
    int grid_N = 512;
    int modes = 6;
    LocateOptions locate;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct GenericitySample {
    int trial = 0;
    std::string perturbation;  // theta
    std::string perturbed;     // base + theta
    double norm_drawn = 0.0;
    double norm_measured = 0.0;
    bool admissible = false;
    std::string rejection;
    bool constant_v = false;
    std::vector<CriticalPointReport> critical_points;
    bool all_nondegenerate = false;
    double min_abs_second_form = 0.0;
};

struct GenericitySummary {
    int trials = 0;
    int admissible = 0;
    int all_nondegenerate = 0;
    double fraction = 0.0;  // over admissible trials
};

// Random trig polynomial on modes 1..modes scaled to ball norm target_norm.
PeriodicFn random_perturbation(std::mt19937_64& rng, int modes, double target_norm);

std::vector<GenericitySample> genericity_sweep(const OperatorModel& base, const GenericityOptions& opts);
GenericitySummary summarize(const std::vector<GenericitySample>& samples);

}  // namespace warpgreen
