// nldiff: nonlocal diffusion Dirichlet solver and verification harness.
//
// One run = one config (JSON) + one subcommand. Every run writes its
// outputs and a manifest.json echoing the fully resolved config plus
// content hashes of the kernel weights and geometry tags; re-running from
// a manifest reproduces the outputs byte for byte.
//
// Exit codes: 0 success, 1 usage/config error, 2 diagnostic failure
// (an asserted bound or ordering did not hold). Outputs are written
// through temp files and renamed only once the computation finished.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nldiff/analysis.hpp"
#include "nldiff/config.hpp"
#include "nldiff/io.hpp"

namespace {

using nldiff::format_double;
using nlohmann::ordered_json;

struct OutputSet {
    std::string dir;
    std::vector<std::pair<std::string, std::string>> files;

    void add(const std::string& name, const std::string& content) {
        files.emplace_back(name, content);
    }
    void write_all(const ordered_json& resolved, const nldiff::Problem& p) {
        ordered_json manifest;
        manifest["config"] = resolved;
        char kh[32], gh[32];
        std::snprintf(kh, sizeof kh, "%016llx",
                      static_cast<unsigned long long>(p.kernel.content_hash()));
        std::snprintf(gh, sizeof gh, "%016llx",
                      static_cast<unsigned long long>(p.geometry->content_hash()));
        manifest["hashes"] = {{"kernel_weights", kh}, {"geometry_tags", gh}};
        ordered_json names = ordered_json::array();
        for (const auto& [name, content] : files) names.push_back(name);
        manifest["outputs"] = names;
        add("manifest.json", manifest.dump(2) + "\n");
        for (const auto& [name, content] : files)
            nldiff::write_file_atomic((std::filesystem::path(dir) / name).string(), content);
    }
};

std::string snapshots_csv(const nldiff::SolveResult& run) {
    std::ostringstream os;
    os << "t,x,u\n";
    for (const auto& f : run.snapshots)
        for (int i = 0; i <= f.geom->n_cells(); ++i)
            os << format_double(f.time) << ',' << format_double(f.geom->coord(i)) << ','
               << format_double(f.at(i)) << '\n';
    return os.str();
}

std::string snapshots_json(const nldiff::SolveResult& run) {
    ordered_json rows = ordered_json::array();
    for (const auto& f : run.snapshots)
        for (int i = 0; i <= f.geom->n_cells(); ++i)
            rows.push_back({{"t", f.time}, {"x", f.geom->coord(i)}, {"u", f.at(i)}});
    return rows.dump(2) + "\n";
}

std::string diagnostics_json(const nldiff::SolveResult& run) {
    ordered_json rows = ordered_json::array();
    for (const auto& d : run.diagnostics)
        rows.push_back({{"t", d.t}, {"sup", d.sup}, {"min", d.min}, {"mass", d.mass}});
    return rows.dump(2) + "\n";
}

// Each command returns an empty string on success, else the diagnostic
// message that turns into exit code 2 after the outputs are written.

std::string cmd_solve(const nldiff::RunConfig& cfg, const nldiff::Problem& p, OutputSet& out) {
    const nldiff::SolveResult run = nldiff::solve(p.u0, p.phi, p.kernel, cfg.solver);
    double drift = 0.0;
    const auto& last = run.snapshots.back();
    for (int i = 0; i <= p.geometry->n_cells(); ++i)
        drift = std::max(drift, std::abs(last.at(i) - p.u0.at(i)));

    out.add(cfg.format == "json" ? "solution.json" : "solution.csv",
            cfg.format == "json" ? snapshots_json(run) : snapshots_csv(run));
    out.add("diagnostics.json", diagnostics_json(run));
    ordered_json summary{{"final_sup", run.diagnostics.back().sup},
                         {"final_min", run.diagnostics.back().min},
                         {"final_mass", run.diagnostics.back().mass},
                         {"max_drift_from_initial", drift}};
    out.add("summary.json", summary.dump(2) + "\n");
    std::printf("solve: %zu snapshots, final sup %s, drift %s, %.0f ms\n", run.snapshots.size(),
                format_double(run.diagnostics.back().sup).c_str(), format_double(drift).c_str(),
                run.wall_ms);
    if (cfg.stationary_tol && drift > *cfg.stationary_tol)
        return "drift " + format_double(drift) + " exceeds stationary_tol";
    return {};
}

std::string cmd_viscous(const nldiff::RunConfig& cfg, const nldiff::Problem& p, OutputSet& out) {
    nldiff::ViscousConfig vc;
    vc.dt = cfg.viscous_dt;
    vc.t_final = cfg.viscous_t_final;
    const nldiff::LayerReport rep =
        nldiff::boundary_layer_study(p.u0, p.kernel, cfg.viscous_epsilons, vc);

    std::ostringstream os;
    os << "epsilon,sup_dist,u_eps_near_left,u_eps_near_right,u_limit_left,u_limit_right\n";
    for (const auto& r : rep.rows)
        os << format_double(r.epsilon) << ',' << format_double(r.sup_dist) << ','
           << format_double(r.u_eps_near_left) << ',' << format_double(r.u_eps_near_right) << ','
           << format_double(rep.u_limit_left) << ',' << format_double(rep.u_limit_right) << '\n';
    out.add("layer.csv", os.str());
    ordered_json summary{{"sup_dist_nonincreasing", rep.sup_dist_nonincreasing},
                         {"sup_dist_decreasing", rep.sup_dist_decreasing},
                         {"u_limit_left", rep.u_limit_left},
                         {"u_limit_right", rep.u_limit_right},
                         {"positivity_hypothesis", rep.positivity_hypothesis},
                         {"limit_boundary_positive", rep.limit_boundary_positive}};
    out.add("layer_summary.json", summary.dump(2) + "\n");
    std::printf("viscous: %zu epsilons, limit boundary values %s / %s\n", rep.rows.size(),
                format_double(rep.u_limit_left).c_str(),
                format_double(rep.u_limit_right).c_str());
    if (!rep.sup_dist_nonincreasing)
        return "sup distance to the limit is not nonincreasing in epsilon";
    if (rep.positivity_hypothesis && !rep.limit_boundary_positive)
        return "limit solution is not positive on the boundary";
    return {};
}

std::string cmd_mc(const nldiff::RunConfig& cfg, const nldiff::Problem& p, OutputSet& out) {
    const nldiff::McDensity mc = nldiff::simulate(p.u0, p.kernel, cfg.mc);

    double l1_vs_solver = -1.0;
    if (cfg.mc.mode == nldiff::McMode::DirichletAbsorbing) {
        nldiff::SolverConfig sc = cfg.solver;
        sc.mode = nldiff::SolverMode::Explicit;
        sc.t_final = cfg.mc.t_final;
        sc.store_every = 1 << 30;
        const auto run = nldiff::solve(p.u0, nldiff::BoundaryData::zero(), p.kernel, sc);
        l1_vs_solver = nldiff::compare_density(mc, run.snapshots.back()).l1;
    }

    std::ostringstream os;
    os << "x,density,stderr\n";
    for (std::size_t b = 0; b < mc.centers.size(); ++b)
        os << format_double(mc.centers[b]) << ',' << format_double(mc.density[b]) << ','
           << format_double(mc.standard_error[b]) << '\n';
    out.add("density.csv", os.str());
    ordered_json summary{{"surviving_fraction", mc.surviving_fraction},
                         {"mean_jumps", mc.mean_jumps},
                         {"l1_vs_solver", l1_vs_solver >= 0.0 ? ordered_json(l1_vs_solver)
                                                              : ordered_json()}};
    out.add("mc_summary.json", summary.dump(2) + "\n");
    std::printf("mc: %llu particles, surviving %s, mean jumps %s, l1 %s\n",
                static_cast<unsigned long long>(mc.particles),
                format_double(mc.surviving_fraction).c_str(),
                format_double(mc.mean_jumps).c_str(), format_double(l1_vs_solver).c_str());
    return {};
}

std::string cmd_lambda_gamma(const nldiff::RunConfig& cfg, const nldiff::Problem& p,
                             OutputSet& out) {
    const nldiff::LambdaRegime regime = nldiff::classify_lambda(*p.geometry, p.kernel);
    std::ostringstream os;
    os << "eta,lambda,gamma,bound\n";
    for (double eta : cfg.etas) {
        const auto rep = nldiff::lambda_gamma(*p.geometry, p.kernel, eta);
        os << format_double(eta) << ',' << format_double(rep.lambda) << ','
           << format_double(rep.gamma) << ',' << format_double(regime.bound) << '\n';
        std::printf("lambda-gamma: eta %s lambda %s gamma %s\n", format_double(eta).c_str(),
                    format_double(rep.lambda).c_str(), format_double(rep.gamma).c_str());
    }
    out.add("lambda_gamma.csv", os.str());
    return {};
}

std::string cmd_moduli(const nldiff::RunConfig& cfg, const nldiff::Problem& p, OutputSet& out) {
    const nldiff::SolveResult run = nldiff::solve(p.u0, p.phi, p.kernel, cfg.solver);
    const bool phi_zero = cfg.boundary.family == nldiff::BoundaryFamily::Zero;
    const nldiff::ModulusReport rep =
        nldiff::check_bounds(run, p.kernel, cfg.etas, phi_zero ? nullptr : &p.phi);

    std::ostringstream os;
    os << "t,eta,omega,bound,branch\n";
    for (const auto& r : rep.rows)
        os << format_double(r.t) << ',' << format_double(r.eta) << ',' << format_double(r.omega)
           << ',' << format_double(r.bound) << ','
           << (r.branch == nldiff::EnvelopeBranch::ExponentialDecay ? "exp" : "linear") << '\n';
    out.add("moduli.csv", os.str());
    if (!rep.theta.empty()) {
        std::ostringstream ts;
        ts << "t,eta,theta\n";
        for (const auto& r : rep.theta)
            ts << format_double(r.t) << ',' << format_double(r.eta) << ','
               << format_double(r.theta) << '\n';
        out.add("theta.csv", ts.str());
    }
    std::printf("moduli: %zu rows, asserted %d, max excess %s\n", rep.rows.size(),
                rep.envelope_asserted ? 1 : 0, format_double(rep.max_excess).c_str());
    if (rep.envelope_asserted && !rep.all_within)
        return "measured modulus exceeds the envelope by " + format_double(rep.max_excess);
    return {};
}

std::string cmd_positivity(const nldiff::RunConfig& cfg, const nldiff::Problem& p,
                           OutputSet& out) {
    const nldiff::SolveResult run = nldiff::solve(p.u0, p.phi, p.kernel, cfg.solver);
    const nldiff::PositivityReport rep = nldiff::positivity_study(run, p.kernel, cfg.tol_pos);

    std::ostringstream os;
    os << "x,first_positive_time\n";
    for (const auto& [x, t] : rep.first_positive)
        os << format_double(x) << ',' << (std::isfinite(t) ? format_double(t) : "inf") << '\n';
    out.add("positivity.csv", os.str());

    const char* hyp = "satisfied";
    switch (rep.hypothesis) {
        case nldiff::PositivityHypothesis::Satisfied: break;
        case nldiff::PositivityHypothesis::NoSymmetricSupportNeighborhood:
            hyp = "kernel support has no symmetric neighborhood of 0";
            break;
        case nldiff::PositivityHypothesis::InitialDataZero: hyp = "initial data is zero"; break;
        case nldiff::PositivityHypothesis::InitialDataNegative:
            hyp = "initial data is negative somewhere";
            break;
        case nldiff::PositivityHypothesis::BoundaryDataNonzero:
            hyp = "boundary data nonzero";
            break;
    }
    ordered_json summary{
        {"hypothesis", hyp},
        {"eta_supp", rep.eta_supp},
        {"k_min", rep.k_min},
        {"all_positive_by",
         rep.all_positive_by ? ordered_json(*rep.all_positive_by) : ordered_json()},
        {"counterexample_x",
         rep.counterexample_x ? ordered_json(*rep.counterexample_x) : ordered_json()}};
    out.add("positivity_summary.json", summary.dump(2) + "\n");
    std::printf("positivity: %s%s\n", hyp, rep.all_positive_by ? " (all nodes positive)" : "");
    if (rep.hypothesis == nldiff::PositivityHypothesis::Satisfied && rep.counterexample_x)
        return "node " + format_double(*rep.counterexample_x) + " failed to become positive";
    return {};
}

std::string cmd_compare(const std::string& what, const nldiff::RunConfig& cfg,
                        const nldiff::Problem& p, OutputSet& out) {
    if (what == "picard") {
        nldiff::SolverConfig ec = cfg.solver;
        ec.mode = nldiff::SolverMode::Explicit;
        const auto explicit_run = nldiff::solve(p.u0, p.phi, p.kernel, ec);
        nldiff::SolverConfig pc = cfg.solver;
        pc.mode = nldiff::SolverMode::Picard;
        const auto picard_run = nldiff::picard_solve(p.u0, p.phi, p.kernel, pc);

        double sup_diff = 0.0;
        for (std::size_t s = 0; s < explicit_run.snapshots.size(); ++s)
            for (int i = 0; i <= p.geometry->n_cells(); ++i)
                sup_diff = std::max(sup_diff, std::abs(explicit_run.snapshots[s].at(i) -
                                                       picard_run.snapshots[s].at(i)));
        ordered_json iters = ordered_json::array();
        double max_ratio = 0.0;
        for (const auto& w : picard_run.picard_windows) {
            iters.push_back(w.iterations);
            for (std::size_t r = 3; r < w.update_norms.size(); ++r)
                if (w.update_norms[r - 1] > 1e-13)
                    max_ratio = std::max(max_ratio, w.update_norms[r] / w.update_norms[r - 1]);
        }
        ordered_json summary{{"sup_diff", sup_diff},
                             {"window_iterations", iters},
                             {"max_update_ratio", max_ratio}};
        out.add("compare_picard.json", summary.dump(2) + "\n");
        std::printf("compare picard: sup_diff %s, max ratio %s\n", format_double(sup_diff).c_str(),
                    format_double(max_ratio).c_str());
        if (sup_diff > cfg.compare_picard_tol)
            return "picard/explicit sup difference " + format_double(sup_diff);
        return {};
    }
    if (what == "mc") {
        nldiff::SolverConfig sc = cfg.solver;
        sc.mode = nldiff::SolverMode::Explicit;
        sc.t_final = cfg.mc.t_final;
        sc.store_every = 1 << 30;
        const auto run = nldiff::solve(p.u0, nldiff::BoundaryData::zero(), p.kernel, sc);
        const auto mc = nldiff::simulate(p.u0, p.kernel, cfg.mc);
        const auto cmp = nldiff::compare_density(mc, run.snapshots.back());
        ordered_json summary{{"l1", cmp.l1},
                             {"max_abs_z", cmp.max_abs_z},
                             {"surviving_fraction", mc.surviving_fraction},
                             {"mean_jumps", mc.mean_jumps}};
        out.add("compare_mc.json", summary.dump(2) + "\n");
        std::printf("compare mc: l1 %s, mean jumps %s\n", format_double(cmp.l1).c_str(),
                    format_double(mc.mean_jumps).c_str());
        if (cmp.l1 > cfg.compare_l1_tol) return "mc/solver l1 distance " + format_double(cmp.l1);
        return {};
    }
    if (what == "viscous") return cmd_viscous(cfg, p, out);
    throw nldiff::ConfigError("compare target must be picard, mc or viscous");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal diffusion Dirichlet solver"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, preset, out_dir;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON config (or a manifest.json from a prior run)");
    app.add_option("--preset", preset, "named bundled config");
    app.add_option("--set", overrides, "override, e.g. --set solver.dt=0.005");
    app.add_option("--out", out_dir, "output directory (overrides config)");

    std::string compare_what, eta_csv, eps_csv;
    std::string mc_particles, mc_seed, mc_mode, mc_workers;
    auto* sub_solve = app.add_subcommand("solve", "march the Dirichlet problem");
    auto* sub_viscous = app.add_subcommand("viscous", "epsilon sweep of the regularized problem");
    sub_viscous->add_option("--epsilons", eps_csv, "comma-separated epsilon list");
    auto* sub_mc = app.add_subcommand("mc", "jump-process histogram");
    sub_mc->add_option("--particles", mc_particles, "particle count");
    sub_mc->add_option("--seed", mc_seed, "random seed");
    sub_mc->add_option("--mode", mc_mode, "dirichlet | whole");
    sub_mc->add_option("--workers", mc_workers, "worker threads (0 = auto)");
    auto* sub_lg = app.add_subcommand("lambda-gamma", "scale quantities of the domain/kernel pair");
    sub_lg->add_option("--eta", eta_csv, "comma-separated eta list");
    auto* sub_moduli = app.add_subcommand("moduli", "modulus of continuity vs envelope");
    sub_moduli->add_option("--etas", eta_csv, "comma-separated eta list");
    auto* sub_pos = app.add_subcommand("positivity", "positivity propagation study");
    auto* sub_cmp = app.add_subcommand("compare", "cross-method checks");
    sub_cmp->add_option("target", compare_what, "picard | mc | viscous")->required();
    auto* sub_presets = app.add_subcommand("presets", "list bundled configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sub_presets->parsed()) {
            for (const auto& [name, blurb] : nldiff::preset_list())
                std::printf("%-26s %s\n", name.c_str(), blurb.c_str());
            return 0;
        }

        ordered_json doc =
            preset.empty() ? nldiff::default_config() : nldiff::preset_config(preset);
        if (!config_path.empty()) {
            nlohmann::json user;
            try {
                user = nlohmann::json::parse(nldiff::read_file(config_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw nldiff::ConfigError(std::string("config: ") + e.what());
            }
            if (user.is_object() && user.contains("config")) user = user["config"];
            doc = nldiff::merge_config(std::move(doc), user);
        }
        if (!eta_csv.empty()) nldiff::apply_override(doc, "analysis.etas=[" + eta_csv + "]");
        if (!eps_csv.empty()) nldiff::apply_override(doc, "viscous.epsilons=[" + eps_csv + "]");
        if (!mc_particles.empty()) nldiff::apply_override(doc, "mc.particles=" + mc_particles);
        if (!mc_seed.empty()) nldiff::apply_override(doc, "mc.seed=" + mc_seed);
        if (!mc_mode.empty()) nldiff::apply_override(doc, "mc.mode=" + mc_mode);
        if (!mc_workers.empty()) nldiff::apply_override(doc, "mc.workers=" + mc_workers);
        for (const auto& o : overrides) nldiff::apply_override(doc, o);
        if (!out_dir.empty()) doc["output_dir"] = out_dir;

        const nldiff::RunConfig cfg = nldiff::materialize(doc);
        const nldiff::Problem problem = nldiff::build_problem(cfg);
        OutputSet out;
        out.dir = cfg.output_dir;

        std::string diagnostic;
        if (sub_solve->parsed())
            diagnostic = cmd_solve(cfg, problem, out);
        else if (sub_viscous->parsed())
            diagnostic = cmd_viscous(cfg, problem, out);
        else if (sub_mc->parsed())
            diagnostic = cmd_mc(cfg, problem, out);
        else if (sub_lg->parsed())
            diagnostic = cmd_lambda_gamma(cfg, problem, out);
        else if (sub_moduli->parsed())
            diagnostic = cmd_moduli(cfg, problem, out);
        else if (sub_pos->parsed())
            diagnostic = cmd_positivity(cfg, problem, out);
        else if (sub_cmp->parsed())
            diagnostic = cmd_compare(compare_what, cfg, problem, out);

        out.write_all(doc, problem);
        if (!diagnostic.empty()) {
            std::fprintf(stderr, "diagnostic failure: %s\n", diagnostic.c_str());
            return 2;
        }
        return 0;
    } catch (const nldiff::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
}
