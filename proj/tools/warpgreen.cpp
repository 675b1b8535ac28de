// warpgreen: Green's function tables, concentration points and nonlinear branches
// for the periodic weighted problem -(a v')' + a kappa v = a h, a = f^n.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "warpgreen/errors.hpp"
#include "warpgreen/report.hpp"

namespace wg = warpgreen;
using nlohmann::json;

namespace {

enum Exit { ok = 0, other = 1, invalid = 2, no_convergence = 3, verify_failed = 4 };

struct Flags {
    std::string config;
    std::optional<int> n_grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<double> tol;
    std::optional<std::string> perturb;
    std::optional<double> rho;
    std::optional<int> trials;
    std::optional<double> eps;
    std::optional<double> s;
    std::optional<double> eps0;
    std::optional<int> steps;
    std::optional<double> ratio;
    std::vector<double> p_list;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw wg::ValidationError("cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json load_document(const std::string& path) {
    if (path.empty()) return json::object();
    const std::string text = slurp(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        wg::parse_config(text);  // rethrows with a line number
        throw;
    }
}

bool ends_with(const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

// Flags win over the document.
wg::RunConfig resolve(const std::string& command, const Flags& fl) {
    json doc = load_document(fl.config);
    if (!doc.is_object()) throw wg::ParseError("", 1, "config must be an object");
    const bool solve = command == "solve-exp" || command == "solve-power";
    if (fl.n_grid) {
        if (solve)
            doc["solver"]["grid_n"] = *fl.n_grid;
        else if (command == "genericity")
            doc["genericity"]["grid_n"] = *fl.n_grid;
        else
            doc["grid"]["n"] = *fl.n_grid;
    }
    if (fl.seed) doc["seed"] = *fl.seed;
    if (fl.out) doc["output"]["path"] = *fl.out;
    if (fl.format)
        doc["output"]["format"] = *fl.format;
    else if (fl.out && ends_with(*fl.out, ".csv"))
        doc["output"]["format"] = "csv";
    if (fl.tol) doc["locate"]["tol"] = *fl.tol;
    if (fl.perturb) doc["genericity"]["perturb"] = *fl.perturb;
    if (fl.rho) doc["genericity"]["rho"] = *fl.rho;
    if (fl.trials) doc["genericity"]["trials"] = *fl.trials;
    if (fl.eps) doc["bubble"]["eps"] = *fl.eps;
    if (fl.s) doc["bubble"]["s"] = *fl.s;
    if (fl.eps0) doc["exp"]["eps0"] = *fl.eps0;
    if (fl.steps) doc["exp"]["steps"] = *fl.steps;
    if (fl.ratio) doc["exp"]["ratio"] = *fl.ratio;
    if (!fl.p_list.empty()) doc["power"]["p_list"] = fl.p_list;
    return wg::config_from_json(doc);
}

std::string csv_preamble(const std::string& command, const wg::RunConfig& cfg) {
    return "# warpgreen " + std::string(wg::version) + " " + command + " config " + wg::config_to_json(cfg).dump() +
           "\n";
}

void emit(const wg::RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty())
        std::cout << text;
    else
        wg::write_atomic(cfg.out, text);
}

void emit_json(const std::string& command, const wg::RunConfig& cfg, json result) {
    emit(cfg, wg::envelope(command, cfg, std::move(result)).dump(2) + "\n");
}

// "<stem>_<tag>.csv" next to the requested output
std::string sibling(const std::string& out, const std::string& tag) {
    std::filesystem::path p(out);
    const auto stem = p.stem().string();
    return (p.parent_path() / (stem + "_" + tag + ".csv")).string();
}

std::string column_csv(const std::vector<std::string>& names, const std::vector<const std::vector<double>*>& cols) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
    os << '\n';
    const std::size_t rows = cols.front()->size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << (*cols[k])[i];
        os << '\n';
    }
    return os.str();
}

std::vector<double> nodes(const wg::Grid& g) {
    std::vector<double> r(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) r[static_cast<std::size_t>(i)] = g.node(i);
    return r;
}

int run_green(const wg::RunConfig& cfg) {
    const wg::Grid grid(cfg.grid_n);
    const auto tables = wg::greens_matrix(cfg.model(), grid);
    if (cfg.format == "csv") {
        const std::string head = csv_preamble("green", cfg);
        if (cfg.out.empty()) {
            std::cout << head << wg::diagonal_csv(tables);
            return ok;
        }
        wg::write_atomic(sibling(cfg.out, "G"), head + wg::table_csv(tables.G(), grid));
        wg::write_atomic(sibling(cfg.out, "Gamma"), head + wg::table_csv(tables.Gamma(), grid));
        wg::write_atomic(sibling(cfg.out, "H"), head + wg::table_csv(tables.H(), grid));
        wg::write_atomic(sibling(cfg.out, "diag"), head + wg::diagonal_csv(tables));
        return ok;
    }
    emit_json("green", cfg, wg::tables_to_json(tables));
    return ok;
}

int run_locate(const wg::RunConfig& cfg) {
    const auto tables = wg::greens_matrix(cfg.model(), wg::Grid(cfg.grid_n));
    const auto pts = wg::locate_critical(tables, cfg.locate);
    json list = json::array();
    for (const auto& p : pts) list.push_back(wg::to_json(p));
    json result = {{"N", cfg.grid_n}, {"critical_points", list}};
    try {
        result["concentration_point"] = wg::to_json(wg::select_concentration_point(pts));
    } catch (const wg::Error&) {
        result["concentration_point"] = nullptr;
    }
    if (cfg.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << csv_preamble("locate", cfg) << "r0,V,Hr,second_form,V_second,kind,nondegenerate\n";
        for (const auto& p : pts)
            os << p.r0 << ',' << p.V_value << ',' << p.Hr_at_diag << ',' << p.second_form << ',' << p.V_second << ','
               << (p.kind == wg::CriticalKind::Maximum ? "max" : "min") << ',' << p.nondegenerate << '\n';
        emit(cfg, os.str());
        return ok;
    }
    emit_json("locate", cfg, std::move(result));
    return ok;
}

int run_genericity(const wg::RunConfig& cfg) {
    const auto samples = wg::genericity_sweep(cfg.model(), cfg.genericity_options());
    const auto summary = wg::summarize(samples);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << csv_preamble("genericity", cfg)
           << "trial,norm,admissible,critical_points,all_nondegenerate,min_abs_second_form\n";
        for (const auto& s : samples)
            os << s.trial << ',' << s.norm_measured << ',' << s.admissible << ',' << s.critical_points.size() << ','
               << s.all_nondegenerate << ',' << s.min_abs_second_form << '\n';
        emit(cfg, os.str());
        return ok;
    }
    json list = json::array();
    for (const auto& s : samples) list.push_back(wg::to_json(s));
    emit_json("genericity", cfg, {{"summary", wg::to_json(summary)}, {"samples", list}});
    return ok;
}

int run_bubble(const wg::RunConfig& cfg) {
    const wg::Grid grid(cfg.grid_n);
    const auto op = wg::assemble(cfg.model(), grid);
    wg::BubbleParams bp;
    bp.eps = cfg.bubble_eps;
    bp.s = cfg.bubble_s;
    const auto prof = wg::project(op, bp);
    const auto r = nodes(grid);
    const std::vector<double> scaled_pu = (bp.eps * prof.PU).values();
    const std::vector<double> limit = (2.0 * std::numbers::sqrt2 * wg::greens_column(op, bp.s)).values();
    if (cfg.format == "csv") {
        emit(cfg, csv_preamble("bubble", cfg) + column_csv({"r", "U", "PU", "eps_PU", "2sqrt2_G"},
                                                           {&r, &prof.U.values(), &prof.PU.values(), &scaled_pu,
                                                            &limit}));
        return ok;
    }
    emit_json("bubble", cfg,
              {{"eps", bp.eps},
               {"s", bp.s},
               {"mass", wg::bubble_mass(bp)},
               {"eps_times_mass", bp.eps * wg::bubble_mass(bp)},
               {"r", r},
               {"U", prof.U.values()},
               {"PU", prof.PU.values()},
               {"eps_PU", scaled_pu},
               {"2sqrt2_G", limit}});
    return ok;
}

int run_solve(const wg::RunConfig& cfg, wg::BranchFamily family, const std::string& command) {
    const auto model = cfg.model();
    const auto branch = wg::continue_branch(model, cfg.branch_options(family));
    json result = wg::to_json(branch);
    if (!branch.steps.empty()) {
        const auto& last = branch.steps.back();
        const wg::Nonlinearity problem = family == wg::BranchFamily::Power
                                             ? wg::Nonlinearity(wg::PowerProblem{last.parameter})
                                             : wg::Nonlinearity(wg::ExpProblem{last.parameter});
        const auto op = wg::assemble(model, wg::Grid(branch.grid_N));
        const auto jc = wg::jacobian_fd_check(op, last.v, problem, 10, cfg.seed);
        result["jacobian_check"] = {{"directions", 10},
                                    {"full_relative", jc.full_relative},
                                    {"nonlinear_relative", jc.nonlinear_relative}};
        if (cfg.refine_check) {
            try {
                const auto rc = wg::refinement_check(model, last.v, problem, cfg.solver);
                result["refinement_check"] = {{"N", branch.grid_N},
                                              {"N2", 2 * branch.grid_N},
                                              {"difference", rc.difference},
                                              {"iterations", rc.iterations}};
            } catch (const wg::ConvergenceError& e) {
                result["refinement_check"] = {{"failure", e.what()}};
            }
        }
    }
    if (cfg.format == "csv") {
        if (branch.steps.empty()) throw wg::NoConvergence(branch.failure.value_or("no step converged"));
        const auto r = nodes(wg::Grid(branch.grid_N));
        const auto& last = branch.steps.back();
        const std::vector<double> v = family == wg::BranchFamily::Power ? last.v.values()
                                                                        : (last.eps.peak * last.v).values();
        emit(cfg, csv_preamble(command, cfg) +
                      column_csv({"r", family == wg::BranchFamily::Power ? "v" : "eps_v", "limit"},
                                 {&r, &v, &branch.limit_profile.values()}));
    } else {
        emit_json(command, cfg, std::move(result));
    }
    if (branch.failure) {
        std::cerr << "warpgreen: branch stopped after " << branch.steps.size() << " steps: " << *branch.failure
                  << '\n';
        return no_convergence;
    }
    return ok;
}

int run_verify_command(const wg::RunConfig& cfg) {
    const auto rep = wg::run_verify(cfg);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os.precision(17);
        os << csv_preamble("verify", cfg) << "name,value_N,value_2N,order,tol,pass\n";
        for (const auto& r : rep.rows)
            os << r.name << ',' << r.value_N << ',' << r.value_2N << ',' << r.order << ',' << r.tol << ','
               << r.pass << '\n';
        emit(cfg, os.str());
    } else {
        emit_json("verify", cfg, wg::to_json(rep));
    }
    if (!rep.pass) {
        for (const auto& r : rep.rows)
            if (!r.pass) std::cerr << "warpgreen: verify failed: " << r.name << " = " << r.value_N << '\n';
        return verify_failed;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic Green's functions, concentration points and nonlinear branches"};
    app.set_version_flag("--version", std::string(wg::version));
    app.require_subcommand(1);

    Flags fl;
    std::string chosen;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", fl.config, "JSON config document")->check(CLI::ExistingFile);
        sub->add_option("--n-grid", fl.n_grid, "grid size N");
        sub->add_option("--seed", fl.seed, "RNG seed");
        sub->add_option("--out", fl.out, "output path (stdout if omitted)");
        sub->add_option("--format", fl.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->callback([&chosen, sub] { chosen = sub->get_name(); });
        return sub;
    };

    common(app.add_subcommand("green", "tabulate G, Gamma, H and diagonal derivatives"));
    auto* locate = common(app.add_subcommand("locate", "critical points of H(r,r)/a(r)"));
    locate->add_option("--tol", fl.tol, "criterion tolerance |dr H - 1/2|");
    auto* gen = common(app.add_subcommand("genericity", "random perturbation sweep"));
    gen->add_option("--perturb", fl.perturb, "f or kappa")->check(CLI::IsMember({"f", "kappa"}));
    gen->add_option("--rho", fl.rho, "ball radius");
    gen->add_option("--trials", fl.trials, "number of trials");
    gen->add_option("--tol", fl.tol, "criterion tolerance");
    auto* bubble = common(app.add_subcommand("bubble", "bubble U and its projection PU"));
    bubble->add_option("--eps", fl.eps, "bubble scale");
    bubble->add_option("--s", fl.s, "bubble centre");
    auto* sexp = common(app.add_subcommand("solve-exp", "exponential branch by continuation in lambda"));
    sexp->add_option("--eps0", fl.eps0, "scale of the first step");
    sexp->add_option("--steps", fl.steps, "number of lambda steps");
    sexp->add_option("--ratio", fl.ratio, "lambda ratio between steps");
    auto* spow = common(app.add_subcommand("solve-power", "power branch over a list of exponents"));
    spow->add_option("--p-list", fl.p_list, "comma separated exponents")->delimiter(',');
    common(app.add_subcommand("verify", "identity suite at N and 2N"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid;
    }

    try {
        const auto cfg = resolve(chosen, fl);
        if (chosen == "green") return run_green(cfg);
        if (chosen == "locate") return run_locate(cfg);
        if (chosen == "genericity") return run_genericity(cfg);
        if (chosen == "bubble") return run_bubble(cfg);
        if (chosen == "solve-exp") return run_solve(cfg, wg::BranchFamily::Exponential, chosen);
        if (chosen == "solve-power") return run_solve(cfg, wg::BranchFamily::Power, chosen);
        if (chosen == "verify") return run_verify_command(cfg);
    } catch (const wg::ValidationError& e) {
        std::cerr << "warpgreen: " << e.what() << '\n';
        return invalid;
    } catch (const wg::ConvergenceError& e) {
        std::cerr << "warpgreen: " << e.what() << '\n';
        return no_convergence;
    } catch (const std::exception& e) {
        std::cerr << "warpgreen: " << e.what() << '\n';
        return other;
    }
    return other;
}
