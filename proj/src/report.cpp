#include "warpgreen/report.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "warpgreen/errors.hpp"

namespace warpgreen {

using nlohmann::json;

namespace {

json grid_axis(const Grid& g) {
    std::vector<double> r(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) r[static_cast<std::size_t>(i)] = g.node(i);
    return r;
}

json rows_of(const Table& t) {
    json rows = json::array();
    for (int i = 0; i < t.size(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(t.size()));
        for (int j = 0; j < t.size(); ++j) row[static_cast<std::size_t>(j)] = t(i, j);
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* kind_name(CriticalKind k) { return k == CriticalKind::Maximum ? "max" : "min"; }

}  // namespace

json to_json(const CriticalPointReport& r) {
    return {{"r0", r.r0},
            {"V_value", r.V_value},
            {"Hr_at_diag", r.Hr_at_diag},
            {"criterion_gap", std::abs(r.Hr_at_diag - 0.5)},
            {"second_form", r.second_form},
            {"V_second", r.V_second},
            {"kind", kind_name(r.kind)},
            {"nondegenerate", r.nondegenerate},
            {"tol_used", r.tol_used},
            {"nondeg_threshold", r.nondeg_threshold},
            {"grid_N", r.grid_N}};
}

json to_json(const GenericitySample& s) {
    json pts = json::array();
    for (const auto& c : s.critical_points) pts.push_back(to_json(c));
    return {{"trial", s.trial},
            {"perturbation", s.perturbation},
            {"perturbed", s.perturbed},
            {"norm_drawn", s.norm_drawn},
            {"norm_measured", s.norm_measured},
            {"admissible", s.admissible},
            {"rejection", s.rejection},
            {"constant_v", s.constant_v},
            {"critical_points", pts},
            {"all_nondegenerate", s.all_nondegenerate},
            {"min_abs_second_form", s.min_abs_second_form}};
}

json to_json(const GenericitySummary& s) {
    return {{"trials", s.trials},
            {"admissible", s.admissible},
            {"all_nondegenerate", s.all_nondegenerate},
            {"fraction", s.fraction}};
}

json to_json(const SolutionBranch& br) {
    const bool power = br.family == BranchFamily::Power;
    const Grid grid(br.grid_N);
    json steps = json::array();
    for (const auto& st : br.steps) {
        json s = {{"iterations", st.iterations},
                  {"backward_error", st.backward_error},
                  {"residual_sup", st.residual_sup},
                  {"newton_correction", st.correction},
                  {"green_form_residual", st.green_residual},
                  {"seeded_from_previous", st.seeded_from_previous},
                  {"peak_location", st.peak_location},
                  {"v_max", st.v_max},
                  {"v_min", st.v_min},
                  {"value_at_r0", st.value_at_r0},
                  {"eps", {{"peak", st.eps.peak}, {"mass", st.eps.mass}, {"formula", st.eps.formula}}},
                  {"asymptotic_error", st.error},
                  {"matching_ratio", st.matching_ratio},
                  {"mass_product", st.mass_product},
                  {"v", st.v.values()}};
        if (power) {
            s["p"] = st.parameter;
        } else {
            s["log_lambda"] = st.parameter;
            s["asymptotic_error_mass_eps"] = st.error_mass;
            s["asymptotic_error_formula_eps"] = st.error_formula;
            s["eps_v"] = (st.eps.peak * st.v).values();
        }
        steps.push_back(std::move(s));
    }
    json out = {{"family", power ? "power" : "exponential"},
                {"r0", br.r0},
                {"H00", br.H00},
                {"concentration_point", to_json(br.concentration)},
                {"grid_N", br.grid_N},
                {"r", grid_axis(grid)},
                {power ? "limit_G_over_H00" : "limit_2sqrt2_G", br.limit_profile.values()},
                {"steps", steps}};
    out["failure"] = br.failure ? json(*br.failure) : json(nullptr);
    return out;
}

json to_json(const VerifyReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"name", r.name},
                        {"value_N", r.value_N},
                        {"value_2N", r.value_2N},
                        {"order", r.order},
                        {"tol", r.tol},
                        {"check", r.lower_bound ? "value_N > tol" : "value_N <= tol"},
                        {"pass", r.pass}});
    return {{"N", rep.N},
            {"N2", rep.N2},
            {"lambda_min", rep.lambda_min},
            {"closed_form_included", rep.closed_form_included},
            {"rows", rows},
            {"pass", rep.pass}};
}

json tables_to_json(const GreensTables& t) {
    return {{"N", t.grid().size()},
            {"h", t.grid().spacing()},
            {"lambda_min", t.lambda_min()},
            {"r", grid_axis(t.grid())},
            {"layout", "row i is r_i, column j is s_j"},
            {"G", rows_of(t.G())},
            {"Gamma", rows_of(t.Gamma())},
            {"H", rows_of(t.H())},
            {"H_diag", t.H_diag().values()},
            {"Hr_diag", t.Hr_diag().values()},
            {"Hs_diag", t.Hs_diag().values()},
            {"Hrr_diag", t.Hrr_diag().values()},
            {"Hrs_diag", t.Hrs_diag().values()}};
}

json envelope(const std::string& command, const RunConfig& cfg, json result) {
    json resolved = config_to_json(cfg);
    resolved["validation"] = {{"f_scan_min", cfg.f_scan_min}, {"lambda_min", cfg.lambda_min}};
    return {{"tool", "warpgreen"},
            {"version", version},
            {"command", command},
            {"config", resolved},
            {"result", std::move(result)}};
}

std::string table_csv(const Table& t, const Grid& grid) {
    std::ostringstream os;
    os.precision(17);
    os << "r";
    for (int j = 0; j < t.size(); ++j) os << ",s=" << grid.node(j);
    os << '\n';
    for (int i = 0; i < t.size(); ++i) {
        os << grid.node(i);
        for (int j = 0; j < t.size(); ++j) os << ',' << t(i, j);
        os << '\n';
    }
    return os.str();
}

std::string diagonal_csv(const GreensTables& t) {
    std::ostringstream os;
    os.precision(17);
    os << "r,H,Hr,Hs,Hrr,Hrs\n";
    for (int i = 0; i < t.grid().size(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        os << t.grid().node(i) << ',' << t.H_diag()[u] << ',' << t.Hr_diag()[u] << ',' << t.Hs_diag()[u] << ','
           << t.Hrr_diag()[u] << ',' << t.Hrs_diag()[u] << '\n';
    }
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move output into place: " + path.string() + ": " + ec.message());
    }
}

}  // namespace warpgreen
