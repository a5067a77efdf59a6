#include "nldiff/evolution.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nldiff {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void restamp_outside(Field& u, const BoundaryData& phi, double t) {
    const auto& g = *u.geom;
    for (int i = g.i_min(); i <= g.i_max(); ++i) {
        if (g.index_in_closed_omega(i)) continue;
        u.at(i) = g.tag(i) == RegionTag::ExtendedBoundary ? phi(g.coord(i), t) : 0.0;
    }
    u.time = t;
}

DiagnosticsRow diagnostics_of(const Field& u) {
    return {u.time, u.sup_norm(), u.min_value(), u.interior_mass()};
}

long step_count(double t_final, double dt) {
    if (!(t_final >= 0.0)) throw std::invalid_argument("solver: t_final must be nonnegative");
    const long n = std::llround(t_final / dt);
    if (std::abs(n * dt - t_final) > 1e-9 * std::max(1.0, t_final))
        throw std::invalid_argument("solver: dt must divide t_final");
    return n;
}

void validate_dt(double dt) {
    if (!(dt > 0.0 && dt <= 1.0))
        throw std::invalid_argument("solver: dt must lie in (0, 1]");
}

}  // namespace

Field step_explicit(const Field& u, const BoundaryData& phi, const Kernel& k, double dt,
                    ApplyMethod method) {
    validate_dt(dt);
    const Field rate = apply_K(u, phi, k, method);
    Field next = u;
    const int n = u.geom->n_cells();
    for (int i = 0; i <= n; ++i) next.at(i) = u.at(i) + dt * rate.at(i);
    restamp_outside(next, phi, u.time + dt);
    return next;
}

SolveResult solve(const Field& u0, const BoundaryData& phi, const Kernel& k,
                  const SolverConfig& cfg) {
    if (cfg.mode == SolverMode::Picard) return picard_solve(u0, phi, k, cfg);
    validate_dt(cfg.dt);
    if (cfg.store_every < 1) throw std::invalid_argument("solver: store_every must be >= 1");
    if (!u0.all_finite()) throw std::invalid_argument("solver: initial data is not finite");
    check_compatibility(u0, phi);

    const auto t0 = Clock::now();
    const long n_steps = step_count(cfg.t_final, cfg.dt);

    SolveResult res;
    res.config = cfg;
    res.kernel_hash = k.content_hash();
    res.geometry_hash = u0.geom->content_hash();
    res.phi_sup = sampled_boundary_sup(*u0.geom, phi, 0.0);

    Field u = u0;
    restamp_outside(u, phi, 0.0);
    res.snapshots.push_back(u);
    res.diagnostics.push_back(diagnostics_of(u));

    for (long n = 1; n <= n_steps; ++n) {
        u = step_explicit(u, phi, k, cfg.dt, cfg.apply_method);
        u.time = n * cfg.dt;
        if (!u.all_finite())
            throw std::runtime_error("solver: non-finite value at step " + std::to_string(n));
        if (n % cfg.store_every == 0 || n == n_steps) {
            res.snapshots.push_back(u);
            res.diagnostics.push_back(diagnostics_of(u));
        }
    }
    res.wall_ms = elapsed_ms(t0);
    return res;
}

SolveResult picard_solve(const Field& u0, const BoundaryData& phi, const Kernel& k,
                         const SolverConfig& cfg) {
    validate_dt(cfg.dt);
    if (!(cfg.picard_window > 0.0 && cfg.picard_window < 0.5))
        throw std::invalid_argument("solver: picard_window must lie in (0, 1/2)");
    if (cfg.store_every < 1) throw std::invalid_argument("solver: store_every must be >= 1");
    if (!u0.all_finite()) throw std::invalid_argument("solver: initial data is not finite");
    check_compatibility(u0, phi);

    const auto t0 = Clock::now();
    const long n_steps = step_count(cfg.t_final, cfg.dt);
    const long win_steps = std::max<long>(1, std::llround(cfg.picard_window / cfg.dt));
    const int n = u0.geom->n_cells();

    SolveResult res;
    res.config = cfg;
    res.kernel_hash = k.content_hash();
    res.geometry_hash = u0.geom->content_hash();
    res.phi_sup = sampled_boundary_sup(*u0.geom, phi, 0.0);

    Field u_start = u0;
    restamp_outside(u_start, phi, 0.0);
    res.snapshots.push_back(u_start);
    res.diagnostics.push_back(diagnostics_of(u_start));

    long step_base = 0;
    int window_index = 0;
    while (step_base < n_steps) {
        const long m = std::min(win_steps, n_steps - step_base);

        // time slab of the iterate: levels 0..m at t = (step_base + l) dt
        std::vector<Field> slab(static_cast<std::size_t>(m) + 1, u_start);
        for (long l = 0; l <= m; ++l)
            restamp_outside(slab[static_cast<std::size_t>(l)], phi, (step_base + l) * cfg.dt);

        PicardWindowStats stats;
        stats.t_begin = step_base * cfg.dt;
        stats.t_end = (step_base + m) * cfg.dt;

        std::vector<Field> rates(static_cast<std::size_t>(m) + 1);
        bool converged = false;
        for (int iter = 1; iter <= cfg.max_picard_iters; ++iter) {
            for (long l = 0; l <= m; ++l)
                rates[static_cast<std::size_t>(l)] =
                    apply_K(slab[static_cast<std::size_t>(l)], phi, k, cfg.apply_method);

            double update = 0.0;
            std::vector<double> acc(u0.geom->node_count(), 0.0);
            for (long l = 1; l <= m; ++l) {
                auto& prev_rate = rates[static_cast<std::size_t>(l - 1)];
                auto& this_rate = rates[static_cast<std::size_t>(l)];
                auto& level = slab[static_cast<std::size_t>(l)];
                for (int i = 0; i <= n; ++i) {
                    const std::size_t s = u0.geom->storage_index(i);
                    if (cfg.picard_quadrature == PicardQuadrature::LeftRectangle)
                        acc[s] += cfg.dt * prev_rate.at(i);
                    else
                        acc[s] += 0.5 * cfg.dt * (prev_rate.at(i) + this_rate.at(i));
                    const double next = u_start.at(i) + acc[s];
                    update = std::max(update, std::abs(next - level.at(i)));
                    level.at(i) = next;
                }
                if (!level.all_finite())
                    throw std::runtime_error("solver: non-finite Picard iterate in window " +
                                             std::to_string(window_index));
            }
            stats.update_norms.push_back(update);
            stats.iterations = iter;
            if (update <= cfg.picard_tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw std::runtime_error("solver: Picard iteration did not converge in window " +
                                     std::to_string(window_index) +
                                     " (picard_tol too tight or dt too coarse)");
        res.picard_windows.push_back(std::move(stats));

        for (long l = 1; l <= m; ++l) {
            const long global = step_base + l;
            if (global % cfg.store_every == 0 || global == n_steps) {
                res.snapshots.push_back(slab[static_cast<std::size_t>(l)]);
                res.diagnostics.push_back(diagnostics_of(slab[static_cast<std::size_t>(l)]));
            }
        }
        u_start = slab[static_cast<std::size_t>(m)];
        step_base += m;
        ++window_index;
    }
    res.wall_ms = elapsed_ms(t0);
    return res;
}

ComparisonReport verify_comparison(const SolveResult& a, const SolveResult& b) {
    if (a.geometry_hash != b.geometry_hash || a.kernel_hash != b.kernel_hash)
        throw std::invalid_argument("verify_comparison: runs use different geometry or kernel");
    if (a.snapshots.size() != b.snapshots.size())
        throw std::invalid_argument("verify_comparison: snapshot counts differ");

    ComparisonReport rep;
    rep.ordered = true;
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        const Field& ua = a.snapshots[s];
        const Field& ub = b.snapshots[s];
        if (std::abs(ua.time - ub.time) > 1e-12)
            throw std::invalid_argument("verify_comparison: snapshot times differ");
        for (int i = 0; i <= ua.geom->n_cells(); ++i) {
            const double gap = ua.at(i) - ub.at(i);
            if (gap > rep.max_violation) {
                rep.max_violation = gap;
                rep.at_time = ua.time;
                rep.at_x = ua.geom->coord(i);
                rep.ordered = false;
            }
        }
    }
    return rep;
}

}  // namespace nldiff
