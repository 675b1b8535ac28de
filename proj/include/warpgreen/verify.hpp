#pragma once

#include <string>
#include <vector>

#include "warpgreen/config.hpp"

namespace warpgreen {

struct VerifyRow {
    std::string name;
    double value_N = 0.0;
    double value_2N = 0.0;
    double order = 0.0;  // log2(value_N / value_2N); NaN when not meaningful
    double tol = 0.0;
    bool lower_bound = false;  // pass iff value_N > tol instead of value_N <= tol
    bool pass = false;
};

struct VerifyReport {
    int N = 0;
    int N2 = 0;
    double lambda_min = 0.0;
    bool closed_form_included = false;
    std::vector<VerifyRow> rows;
    bool pass = false;
};

VerifyReport run_verify(const RunConfig& cfg);

}  // namespace warpgreen
