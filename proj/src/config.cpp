#include "nldiff/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nldiff/io.hpp"

namespace nldiff {

using nlohmann::ordered_json;

ordered_json default_config() {
    ordered_json j;
    j["kernel"] = {{"family", "box"},     {"a", -1.0},          {"b", 1.0},
                   {"sigma", 1.0},        {"tail_tol", 1e-10},  {"table_path", ""}};
    j["domain"] = {{"xl", -1.0}, {"xr", 1.0}};
    j["grid"] = {{"h", 0.01}};
    j["initial"] = {{"family", "bump"}, {"center", 0.0},    {"halfwidth", 0.6},
                    {"height", 1.0},    {"slope", 0.0},     {"intercept", 0.0},
                    {"value", 0.0},     {"normalize", false}};
    j["boundary"] = {{"family", "zero"}, {"value", 0.0}, {"slope", 0.0}, {"intercept", 0.0}};
    j["solver"] = {{"mode", "explicit"},
                   {"dt", 0.01},
                   {"T", 1.0},
                   {"picard_window", 0.25},
                   {"picard_tol", 1e-10},
                   {"max_picard_iters", 200},
                   {"picard_quadrature", "left"},
                   {"store_every", 10},
                   {"stationary_tol", nullptr}};
    j["viscous"] = {{"epsilons", ordered_json::array({1e-1, 1e-2, 1e-3})},
                    {"dt", 0.01},
                    {"T", 1.0}};
    j["mc"] = {{"particles", 100000}, {"seed", 42},     {"t_final", 1.0},
               {"mode", "dirichlet"}, {"workers", 0}};
    j["analysis"] = {{"etas", ordered_json::array({0.05, 0.1})}, {"tol_pos", 1e-12}};
    j["compare"] = {{"picard_tol", 1e-6}, {"l1_tol", 0.02}};
    j["output_dir"] = "out";
    j["format"] = "csv";
    return j;
}

static void merge_into(ordered_json& base, const nlohmann::json& user, const std::string& path) {
    if (!user.is_object()) throw ConfigError("config: expected an object at " + path);
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string here = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + here + "'");
        if (base[it.key()].is_object() && !base[it.key()].empty() && it->is_object())
            merge_into(base[it.key()], *it, here);
        else
            base[it.key()] = *it;
    }
}

ordered_json merge_config(ordered_json base, const nlohmann::json& user) {
    merge_into(base, user, "");
    return base;
}

namespace {

double want_number(const ordered_json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
    return j.get<double>();
}

std::string want_string(const ordered_json& j, const std::string& key) {
    if (!j.is_string()) throw ConfigError("config: '" + key + "' must be a string");
    return j.get<std::string>();
}

std::vector<double> want_number_list(const ordered_json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) throw ConfigError("config: '" + key + "' must be a nonempty array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError("config: '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::pair<double, double>> load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open kernel table '" + path + "'");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double z = 0.0, d = 0.0;
        if (ls >> z >> d) rows.emplace_back(z, d);
    }
    if (rows.empty()) throw ConfigError("config: kernel table '" + path + "' has no samples");
    return rows;
}

}  // namespace

RunConfig materialize(const ordered_json& j) {
    RunConfig c;

    const auto& kj = j.at("kernel");
    const std::string fam = want_string(kj.at("family"), "kernel.family");
    if (fam == "box")
        c.kernel.family = KernelFamily::Box;
    else if (fam == "gaussian")
        c.kernel.family = KernelFamily::Gaussian;
    else if (fam == "indicator")
        c.kernel.family = KernelFamily::Indicator;
    else if (fam == "tabulated")
        c.kernel.family = KernelFamily::Tabulated;
    else
        throw ConfigError("config: unknown kernel.family '" + fam + "'");
    c.kernel.a = want_number(kj.at("a"), "kernel.a");
    c.kernel.b = want_number(kj.at("b"), "kernel.b");
    c.kernel.sigma = want_number(kj.at("sigma"), "kernel.sigma");
    c.kernel.tail_tol = want_number(kj.at("tail_tol"), "kernel.tail_tol");
    c.table_path = want_string(kj.at("table_path"), "kernel.table_path");
    if (c.kernel.family == KernelFamily::Tabulated) {
        if (c.table_path.empty()) throw ConfigError("config: tabulated kernel needs table_path");
        c.kernel.table = load_table(c.table_path);
    }

    c.xl = want_number(j.at("domain").at("xl"), "domain.xl");
    c.xr = want_number(j.at("domain").at("xr"), "domain.xr");
    c.h = want_number(j.at("grid").at("h"), "grid.h");

    const auto& ij = j.at("initial");
    const std::string ifam = want_string(ij.at("family"), "initial.family");
    if (ifam == "zero")
        c.initial.family = InitialFamily::Zero;
    else if (ifam == "bump")
        c.initial.family = InitialFamily::Bump;
    else if (ifam == "linear")
        c.initial.family = InitialFamily::Linear;
    else if (ifam == "constant")
        c.initial.family = InitialFamily::Constant;
    else
        throw ConfigError("config: unknown initial.family '" + ifam + "'");
    c.initial.center = want_number(ij.at("center"), "initial.center");
    c.initial.halfwidth = want_number(ij.at("halfwidth"), "initial.halfwidth");
    c.initial.height = want_number(ij.at("height"), "initial.height");
    c.initial.slope = want_number(ij.at("slope"), "initial.slope");
    c.initial.intercept = want_number(ij.at("intercept"), "initial.intercept");
    c.initial.value = want_number(ij.at("value"), "initial.value");
    if (!ij.at("normalize").is_boolean())
        throw ConfigError("config: initial.normalize must be a boolean");
    c.initial.normalize = ij.at("normalize").get<bool>();

    const auto& bj = j.at("boundary");
    const std::string bfam = want_string(bj.at("family"), "boundary.family");
    if (bfam == "zero")
        c.boundary.family = BoundaryFamily::Zero;
    else if (bfam == "constant")
        c.boundary.family = BoundaryFamily::Constant;
    else if (bfam == "affine")
        c.boundary.family = BoundaryFamily::Affine;
    else
        throw ConfigError("config: unknown boundary.family '" + bfam + "'");
    c.boundary.value = want_number(bj.at("value"), "boundary.value");
    c.boundary.slope = want_number(bj.at("slope"), "boundary.slope");
    c.boundary.intercept = want_number(bj.at("intercept"), "boundary.intercept");

    const auto& sj = j.at("solver");
    const std::string mode = want_string(sj.at("mode"), "solver.mode");
    if (mode == "explicit")
        c.solver.mode = SolverMode::Explicit;
    else if (mode == "picard")
        c.solver.mode = SolverMode::Picard;
    else
        throw ConfigError("config: unknown solver.mode '" + mode + "'");
    c.solver.dt = want_number(sj.at("dt"), "solver.dt");
    c.solver.t_final = want_number(sj.at("T"), "solver.T");
    c.solver.picard_window = want_number(sj.at("picard_window"), "solver.picard_window");
    c.solver.picard_tol = want_number(sj.at("picard_tol"), "solver.picard_tol");
    c.solver.max_picard_iters =
        static_cast<int>(want_number(sj.at("max_picard_iters"), "solver.max_picard_iters"));
    const std::string quad = want_string(sj.at("picard_quadrature"), "solver.picard_quadrature");
    if (quad == "left")
        c.solver.picard_quadrature = PicardQuadrature::LeftRectangle;
    else if (quad == "trapezoid")
        c.solver.picard_quadrature = PicardQuadrature::Trapezoid;
    else
        throw ConfigError("config: unknown solver.picard_quadrature '" + quad + "'");
    c.solver.store_every = static_cast<int>(want_number(sj.at("store_every"), "solver.store_every"));
    if (!sj.at("stationary_tol").is_null())
        c.stationary_tol = want_number(sj.at("stationary_tol"), "solver.stationary_tol");

    const auto& vj = j.at("viscous");
    c.viscous_epsilons = want_number_list(vj.at("epsilons"), "viscous.epsilons");
    c.viscous_dt = want_number(vj.at("dt"), "viscous.dt");
    c.viscous_t_final = want_number(vj.at("T"), "viscous.T");

    const auto& mj = j.at("mc");
    const double particles = want_number(mj.at("particles"), "mc.particles");
    if (!(particles >= 1.0)) throw ConfigError("config: mc.particles must be >= 1");
    c.mc.particles = static_cast<std::uint64_t>(particles);
    c.mc.seed = static_cast<std::uint64_t>(want_number(mj.at("seed"), "mc.seed"));
    c.mc.t_final = want_number(mj.at("t_final"), "mc.t_final");
    const std::string mcmode = want_string(mj.at("mode"), "mc.mode");
    if (mcmode == "dirichlet")
        c.mc.mode = McMode::DirichletAbsorbing;
    else if (mcmode == "whole")
        c.mc.mode = McMode::WholeSpace;
    else
        throw ConfigError("config: unknown mc.mode '" + mcmode + "'");
    c.mc.workers = static_cast<unsigned>(want_number(mj.at("workers"), "mc.workers"));

    c.etas = want_number_list(j.at("analysis").at("etas"), "analysis.etas");
    c.tol_pos = want_number(j.at("analysis").at("tol_pos"), "analysis.tol_pos");
    c.compare_picard_tol = want_number(j.at("compare").at("picard_tol"), "compare.picard_tol");
    c.compare_l1_tol = want_number(j.at("compare").at("l1_tol"), "compare.l1_tol");
    c.output_dir = want_string(j.at("output_dir"), "output_dir");
    c.format = want_string(j.at("format"), "format");
    if (c.format != "csv" && c.format != "json")
        throw ConfigError("config: format must be 'csv' or 'json'");
    return c;
}

void apply_override(ordered_json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' must look like section.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
        value = raw;  // bare strings allowed
    }

    std::vector<std::string> keys;
    std::istringstream ps(path);
    std::string part;
    while (std::getline(ps, part, '.')) keys.push_back(part);
    if (keys.empty()) throw ConfigError("override '" + assignment + "' has an empty key");

    nlohmann::json patch = value;
    for (auto it = keys.rbegin(); it != keys.rend(); ++it)
        patch = nlohmann::json{{*it, patch}};
    merge_into(doc, patch, "");
}

namespace {

ordered_json preset_patch(const std::string& name) {
    const double sigma_exp_sq = 0.70710678118654752;  // the exp(-z^2) profile
    if (name == "stationary-linear") {
        return ordered_json{
            {"kernel", {{"family", "box"}, {"a", -1.0}, {"b", 1.0}}},
            {"domain", {{"xl", -2.0}, {"xr", 2.0}}},
            {"initial", {{"family", "linear"}, {"slope", 0.3}, {"intercept", 0.0}}},
            {"boundary", {{"family", "affine"}, {"slope", 0.3}, {"intercept", 0.0}}},
            {"solver", {{"dt", 0.01}, {"T", 1.0}, {"store_every", 25}, {"stationary_tol", 1e-8}}},
        };
    }
    if (name == "gaussian-regularizing") {
        return ordered_json{
            {"kernel", {{"family", "gaussian"}, {"sigma", sigma_exp_sq}}},
            {"solver", {{"dt", 0.01}, {"T", 5.0}, {"store_every", 10}}},
            {"analysis", {{"etas", ordered_json::array({0.05, 0.1})}}},
        };
    }
    if (name == "concentrated-lambda1") {
        return ordered_json{
            {"kernel", {{"family", "indicator"}, {"a", -0.5}, {"b", 0.5}}},
            {"solver", {{"dt", 0.01}, {"T", 5.0}, {"store_every", 10}}},
            {"analysis", {{"etas", ordered_json::array({0.05, 0.1})}}},
        };
    }
    if (name == "offcenter-counterexample") {
        return ordered_json{
            {"kernel", {{"family", "indicator"}, {"a", -1.0}, {"b", 0.0}}},
            {"domain", {{"xl", -10.0}, {"xr", 10.0}}},
            {"grid", {{"h", 0.05}}},
            {"initial", {{"family", "bump"}, {"center", -7.0}, {"halfwidth", 2.0}}},
            {"solver", {{"dt", 0.01}, {"T", 5.0}, {"store_every", 100}}},
        };
    }
    if (name == "boundary-layer") {
        return ordered_json{
            {"kernel", {{"family", "box"}, {"a", -1.0}, {"b", 1.0}}},
            {"viscous",
             {{"epsilons", ordered_json::array({1e-1, 1e-2, 1e-3})}, {"dt", 0.01}, {"T", 1.0}}},
        };
    }
    if (name == "mc-dirichlet") {
        return ordered_json{
            {"kernel", {{"family", "box"}, {"a", -1.0}, {"b", 1.0}}},
            {"initial", {{"normalize", true}}},
            {"solver", {{"dt", 0.002}, {"T", 1.0}, {"store_every", 500}}},
            {"mc", {{"particles", 1000000}, {"seed", 42}, {"t_final", 1.0}}},
        };
    }
    if (name == "picard-vs-explicit") {
        return ordered_json{
            {"kernel", {{"family", "gaussian"}, {"sigma", sigma_exp_sq}}},
            {"solver",
             {{"dt", 0.001}, {"T", 0.25}, {"picard_window", 0.25}, {"store_every", 50}}},
        };
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> preset_list() {
    return {
        {"stationary-linear", "affine data on a padded window stays stationary"},
        {"gaussian-regularizing", "gaussian kernel: modulus decays under the exponential envelope"},
        {"concentrated-lambda1", "concentrated kernel: linear-in-time envelope branch"},
        {"offcenter-counterexample", "one-sided kernel: no positivity spread to the right"},
        {"boundary-layer", "viscous sweep against the nonlocal limit"},
        {"mc-dirichlet", "absorbing jump-process histogram vs the solver"},
        {"picard-vs-explicit", "fixed-point construction agrees with the stepper"},
    };
}

ordered_json preset_config(const std::string& name) {
    return merge_config(default_config(), preset_patch(name));
}

Problem build_problem(const RunConfig& cfg) {
    Problem p{Kernel::build(cfg.kernel, cfg.h), nullptr, Field{}, BoundaryData::zero()};
    p.geometry = std::make_shared<DomainGeometry>(DomainGeometry::build(cfg.xl, cfg.xr, p.kernel));

    std::function<double(double)> u0;
    switch (cfg.initial.family) {
        case InitialFamily::Zero:
            u0 = [](double) { return 0.0; };
            break;
        case InitialFamily::Bump: {
            const double c = cfg.initial.center, w = cfg.initial.halfwidth,
                         a = cfg.initial.height;
            u0 = [c, w, a](double x) {
                const double s = (x - c) / w;
                if (!(std::abs(s) < 1.0)) return 0.0;
                return a * std::exp(1.0 - 1.0 / (1.0 - s * s));
            };
            break;
        }
        case InitialFamily::Linear: {
            const double s = cfg.initial.slope, b = cfg.initial.intercept;
            u0 = [s, b](double x) { return s * x + b; };
            break;
        }
        case InitialFamily::Constant: {
            const double v = cfg.initial.value;
            u0 = [v](double) { return v; };
            break;
        }
    }
    p.u0 = make_field(p.geometry, u0, 0.0);
    if (cfg.initial.normalize) {
        const double mass = p.u0.interior_mass();
        if (!(mass > 0.0)) throw ConfigError("config: cannot normalize zero initial data");
        for (double& v : p.u0.values) v /= mass;
    }

    switch (cfg.boundary.family) {
        case BoundaryFamily::Zero:
            p.phi = BoundaryData::zero();
            break;
        case BoundaryFamily::Constant:
            p.phi = BoundaryData::constant(cfg.boundary.value);
            break;
        case BoundaryFamily::Affine:
            p.phi = BoundaryData::affine(cfg.boundary.slope, cfg.boundary.intercept);
            p.phi.bounded_sup = sampled_boundary_sup(*p.geometry, p.phi, 0.0);
            break;
    }
    return p;
}

}  // namespace nldiff
