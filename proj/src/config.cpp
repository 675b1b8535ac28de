#include "warpgreen/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "warpgreen/errors.hpp"

namespace warpgreen {

using nlohmann::json;

namespace {

int line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ParseError(path.empty() ? k : path + "." + k, 0, "unknown key");
}

const json* section(const json& doc, const char* name) {
    if (!doc.contains(name)) return nullptr;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ParseError(name, 0, "expected an object");
    return &s;
}

template <class T>
void read(const json* sec, const std::string& path, const char* key, T& out) {
    if (!sec || !sec->contains(key)) return;
    const json& v = sec->at(key);
    const std::string field = path + "." + key;
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ParseError(field, 0, "expected a string");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ParseError(field, 0, "expected true/false");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ParseError(field, 0, "expected an integer");
        } else {
            if (!v.is_number()) throw ParseError(field, 0, "expected a number");
        }
        out = v.get<T>();
    } catch (const json::exception& e) {
        throw ParseError(field, 0, e.what());
    }
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError("invalid '" + field + "': " + what);
}

}  // namespace

OperatorModel RunConfig::model() const {
    auto parse = [](const std::string& field, const std::string& text) {
        try {
            return PeriodicFn::parse(text);
        } catch (const ParseError& e) {
            throw ParseError(field, 0, e.what());
        }
    };
    return OperatorModel(parse("model.f", f), parse("model.kappa", kappa), n);
}

BranchOptions RunConfig::branch_options(BranchFamily family) const {
    BranchOptions o;
    o.family = family;
    o.solver = solver;
    o.table_N = table_n;
    o.r0 = r0;
    o.locate = locate;
    o.eps0 = eps0;
    o.steps = steps;
    o.ratio = ratio;
    o.p_list = p_list;
    return o;
}

GenericityOptions RunConfig::genericity_options() const {
    GenericityOptions o;
    o.target = perturb == "f" ? PerturbTarget::Warping : PerturbTarget::Potential;
    o.rho = rho;
    o.trials = trials;
    o.seed = seed;
    o.grid_N = sweep_grid_n;
    o.modes = modes;
    o.locate = locate;
    o.threads = threads;
    return o;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    return config_from_json(doc);
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("", 1, "config must be an object");
    reject_unknown(doc, "",
                   {"model", "grid", "seed", "output", "locate", "genericity", "bubble", "solver", "exp", "power",
                    "verify", "version"});
    RunConfig c;

    const json* model = section(doc, "model");
    if (model) reject_unknown(*model, "model", {"f", "kappa", "n"});
    read(model, "model", "f", c.f);
    read(model, "model", "kappa", c.kappa);
    read(model, "model", "n", c.n);

    const json* grid = section(doc, "grid");
    if (grid) reject_unknown(*grid, "grid", {"n"});
    read(grid, "grid", "n", c.grid_n);

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) throw ParseError("seed", 0, "expected a non-negative integer");
        c.seed = doc.at("seed").get<std::uint64_t>();
    }

    const json* out = section(doc, "output");
    if (out) reject_unknown(*out, "output", {"path", "format"});
    read(out, "output", "path", c.out);
    read(out, "output", "format", c.format);

    const json* loc = section(doc, "locate");
    if (loc) reject_unknown(*loc, "locate", {"tol", "nondeg_rel", "nondeg_abs", "constant_floor"});
    read(loc, "locate", "tol", c.locate.tol);
    read(loc, "locate", "nondeg_rel", c.locate.nondeg_rel);
    read(loc, "locate", "nondeg_abs", c.locate.nondeg_abs);
    read(loc, "locate", "constant_floor", c.locate.constant_floor);

    const json* gen = section(doc, "genericity");
    if (gen) reject_unknown(*gen, "genericity", {"perturb", "rho", "trials", "modes", "grid_n", "threads"});
    read(gen, "genericity", "perturb", c.perturb);
    read(gen, "genericity", "rho", c.rho);
    read(gen, "genericity", "trials", c.trials);
    read(gen, "genericity", "modes", c.modes);
    read(gen, "genericity", "grid_n", c.sweep_grid_n);
    read(gen, "genericity", "threads", c.threads);

    const json* bub = section(doc, "bubble");
    if (bub) reject_unknown(*bub, "bubble", {"eps", "s"});
    read(bub, "bubble", "eps", c.bubble_eps);
    read(bub, "bubble", "s", c.bubble_s);

    const json* sol = section(doc, "solver");
    if (sol)
        reject_unknown(*sol, "solver",
                       {"newton_tol", "max_iter", "max_halvings", "grid_n", "table_n", "r0", "refine_check"});
    read(sol, "solver", "newton_tol", c.solver.newton_tol);
    read(sol, "solver", "max_iter", c.solver.max_iter);
    read(sol, "solver", "max_halvings", c.solver.max_halvings);
    read(sol, "solver", "grid_n", c.solver.grid_N);
    read(sol, "solver", "table_n", c.table_n);
    read(sol, "solver", "refine_check", c.refine_check);
    if (sol && sol->contains("r0") && !sol->at("r0").is_null()) {
        double r0 = 0.0;
        read(sol, "solver", "r0", r0);
        c.r0 = r0;
    }

    const json* ex = section(doc, "exp");
    if (ex) reject_unknown(*ex, "exp", {"eps0", "steps", "ratio"});
    read(ex, "exp", "eps0", c.eps0);
    read(ex, "exp", "steps", c.steps);
    read(ex, "exp", "ratio", c.ratio);

    const json* pw = section(doc, "power");
    if (pw) reject_unknown(*pw, "power", {"p_list"});
    if (pw && pw->contains("p_list")) {
        const json& l = pw->at("p_list");
        if (!l.is_array()) throw ParseError("power.p_list", 0, "expected an array of numbers");
        c.p_list.clear();
        for (const auto& x : l) {
            if (!x.is_number()) throw ParseError("power.p_list", 0, "expected an array of numbers");
            c.p_list.push_back(x.get<double>());
        }
    }

    const json* ver = section(doc, "verify");
    if (ver)
        reject_unknown(*ver, "verify",
                       {"reciprocity", "regular_relation", "diagonal_relation", "boundary", "corner", "column",
                        "max_h_change", "closed_form", "lattice"});
    read(ver, "verify", "reciprocity", c.verify.reciprocity);
    read(ver, "verify", "regular_relation", c.verify.regular_relation);
    read(ver, "verify", "diagonal_relation", c.verify.diagonal_relation);
    read(ver, "verify", "boundary", c.verify.boundary);
    read(ver, "verify", "corner", c.verify.corner);
    read(ver, "verify", "column", c.verify.column);
    read(ver, "verify", "max_h_change", c.verify.max_h_change);
    read(ver, "verify", "closed_form", c.verify.closed_form);
    read(ver, "verify", "lattice", c.verify.lattice);

    validate_config(c);
    return c;
}

void validate_config(RunConfig& c) {
    require(c.n >= 1, "model.n", "must be a positive integer");
    require(c.grid_n >= Grid::min_points, "grid.n", "must be at least 16");
    require(c.format == "json" || c.format == "csv", "output.format", "must be json or csv");
    require(c.locate.tol >= 0, "locate.tol", "must be non-negative (0 selects the default)");
    require(c.locate.nondeg_rel >= 0 && c.locate.nondeg_abs >= 0 && c.locate.constant_floor >= 0, "locate",
            "thresholds must be non-negative");
    require(c.perturb == "f" || c.perturb == "kappa", "genericity.perturb", "must be f or kappa");
    require(c.rho > 0, "genericity.rho", "must be positive");
    require(c.trials >= 0, "genericity.trials", "must be non-negative");
    require(c.modes >= 1, "genericity.modes", "must be positive");
    require(c.sweep_grid_n >= Grid::min_points, "genericity.grid_n", "must be at least 16");
    require(c.bubble_eps > 0, "bubble.eps", "must be positive");
    require(c.bubble_s > 0 && c.bubble_s < 1, "bubble.s", "must lie in (0,1)");
    require(c.solver.newton_tol > 0, "solver.newton_tol", "must be positive");
    require(c.solver.max_iter >= 1, "solver.max_iter", "must be positive");
    require(c.solver.max_halvings >= 0, "solver.max_halvings", "must be non-negative");
    require(c.solver.grid_N >= Grid::min_points, "solver.grid_n", "must be at least 16");
    require(c.table_n >= Grid::min_points, "solver.table_n", "must be at least 16");
    require(!c.r0 || (*c.r0 > 0 && *c.r0 < 1), "solver.r0", "must lie in (0,1)");
    require(c.eps0 > 0, "exp.eps0", "must be positive");
    require(c.steps >= 1, "exp.steps", "must be positive");
    require(c.ratio > 0 && c.ratio < 1, "exp.ratio", "must lie in (0,1)");
    require(!c.p_list.empty(), "power.p_list", "must not be empty");
    for (std::size_t k = 0; k < c.p_list.size(); ++k) {
        require(c.p_list[k] > 1, "power.p_list", "entries must exceed 1");
        require(k == 0 || c.p_list[k] > c.p_list[k - 1], "power.p_list", "must be increasing");
    }
    require(c.verify.lattice >= 2, "verify.lattice", "must be at least 2");

    const OperatorModel m = c.model();
    c.f_scan_min = scan_min(m.warping(), 4 * c.grid_n);
    if (!(c.f_scan_min > 0))
        throw ValidationError("model.f must be positive: minimum on a " + std::to_string(4 * c.grid_n) +
                              "-point scan is " + std::to_string(c.f_scan_min));
    // dense eigenvalues are cubic in N; the certificate uses at most 1024 points
    const auto cert = coercivity_check(m, Grid(std::min(c.grid_n, 1024)));
    c.lambda_min = cert.lambda_min;
    if (!cert.is_coercive)
        throw CoercivityFailure("model.kappa is not coercive: lambda_min = " + std::to_string(cert.lambda_min),
                                cert.lambda_min);
}

json config_to_json(const RunConfig& c) {
    json j;
    j["model"] = {{"f", c.f}, {"kappa", c.kappa}, {"n", c.n}};
    j["grid"] = {{"n", c.grid_n}};
    j["seed"] = c.seed;
    j["output"] = {{"path", c.out}, {"format", c.format}};
    j["locate"] = {{"tol", c.locate.tol},
                   {"nondeg_rel", c.locate.nondeg_rel},
                   {"nondeg_abs", c.locate.nondeg_abs},
                   {"constant_floor", c.locate.constant_floor}};
    j["genericity"] = {{"perturb", c.perturb}, {"rho", c.rho},   {"trials", c.trials},
                       {"modes", c.modes},     {"grid_n", c.sweep_grid_n}, {"threads", c.threads}};
    j["bubble"] = {{"eps", c.bubble_eps}, {"s", c.bubble_s}};
    j["solver"] = {{"newton_tol", c.solver.newton_tol}, {"max_iter", c.solver.max_iter},
                   {"max_halvings", c.solver.max_halvings}, {"grid_n", c.solver.grid_N},
                   {"table_n", c.table_n},      {"refine_check", c.refine_check}};
    j["solver"]["r0"] = c.r0 ? json(*c.r0) : json(nullptr);
    j["exp"] = {{"eps0", c.eps0}, {"steps", c.steps}, {"ratio", c.ratio}};
    j["power"] = {{"p_list", c.p_list}};
    j["verify"] = {{"reciprocity", c.verify.reciprocity},
                   {"regular_relation", c.verify.regular_relation},
                   {"diagonal_relation", c.verify.diagonal_relation},
                   {"boundary", c.verify.boundary},
                   {"corner", c.verify.corner},
                   {"column", c.verify.column},
                   {"max_h_change", c.verify.max_h_change},
                   {"closed_form", c.verify.closed_form},
                   {"lattice", c.verify.lattice}};
    return j;
}

}  // namespace warpgreen
