#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "warpgreen/nonlinear.hpp"

namespace warpgreen {

inline constexpr const char* version = "0.1.0";

struct VerifyTolerances {
    double reciprocity = 1e-4;
    double regular_relation = 1e-4;
    double diagonal_relation = 1e-3;
    double boundary = 1e-3;
    double corner = 1e-4;
    double column = 1e-8;
    double max_h_change = 0.05;
    double closed_form = 1e-3;
    int lattice = 64;
};

struct RunConfig {
    std::string f = "const:1";
    std::string kappa = "const:1";
    int n = 1;
    int grid_n = 1024;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";

    LocateOptions locate;
    std::string perturb = "f";
    double rho = 0.05;
    int trials = 50;
    int modes = 6;
    int sweep_grid_n = 512;
    unsigned threads = 0;

    double bubble_eps = 0.02;
    double bubble_s = 0.5;

    SolverConfig solver;
    int table_n = 1024;
    std::optional<double> r0;
    bool refine_check = true;
    double eps0 = 0.02;
    int steps = 12;
    double ratio = 0.5;
    std::vector<double> p_list{40, 80, 160, 320};

    VerifyTolerances verify;

    // filled by validation
    double f_scan_min = 0.0;
    double lambda_min = 0.0;

    OperatorModel model() const;
    BranchOptions branch_options(BranchFamily family) const;
    GenericityOptions genericity_options() const;
};

// Structured document (JSON). Unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json& doc);
// Checks positivity of f on a 4N scan and coercivity of the operator.
void validate_config(RunConfig& cfg);
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace warpgreen
