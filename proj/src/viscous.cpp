#include "nldiff/viscous.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nldiff {

namespace {

// Thomas solve of the constant-coefficient system (1 + 2c) x_i - c x_{i-1}
// - c x_{i+1} = d_i on i = 1..n-1 with x_0 = x_n = 0. Strictly diagonally
// dominant for c >= 0. Overwrites d with the solution.
void solve_dirichlet_tridiag(std::vector<double>& d, double c) {
    const std::size_t m = d.size();
    if (m == 0) return;
    const double b = 1.0 + 2.0 * c;
    std::vector<double> cp(m);
    cp[0] = -c / b;
    d[0] = d[0] / b;
    for (std::size_t i = 1; i < m; ++i) {
        const double denom = b + c * cp[i - 1];
        if (!(denom > 0.0)) throw std::runtime_error("viscous: singular tridiagonal row");
        cp[i] = -c / denom;
        d[i] = (d[i] + c * d[i - 1]) / denom;
    }
    for (std::size_t i = m - 1; i-- > 0;) d[i] = d[i] - cp[i] * d[i + 1];
}

}  // namespace

SolveResult solve_viscous(const Field& u0, const Kernel& k, const ViscousConfig& cfg) {
    if (cfg.epsilon < 0.0) throw std::invalid_argument("viscous: epsilon must be nonnegative");
    if (!(cfg.dt > 0.0 && cfg.dt <= 1.0))
        throw std::invalid_argument("viscous: dt must lie in (0, 1]");
    if (cfg.store_every < 1) throw std::invalid_argument("viscous: store_every must be >= 1");
    if (!u0.all_finite()) throw std::invalid_argument("viscous: initial data is not finite");
    const auto& g = *u0.geom;
    const int n = g.n_cells();
    if (std::abs(u0.at(0)) > 1e-14 || std::abs(u0.at(n)) > 1e-14)
        throw std::invalid_argument("viscous: initial data must vanish on the boundary");

    const auto t0 = std::chrono::steady_clock::now();
    const long n_steps = std::llround(cfg.t_final / cfg.dt);
    if (std::abs(n_steps * cfg.dt - cfg.t_final) > 1e-9 * std::max(1.0, cfg.t_final))
        throw std::invalid_argument("viscous: dt must divide t_final");

    const BoundaryData phi = BoundaryData::zero();
    const double c = cfg.epsilon * cfg.dt / (g.h() * g.h());

    SolveResult res;
    res.config.dt = cfg.dt;
    res.config.t_final = cfg.t_final;
    res.config.store_every = cfg.store_every;
    res.kernel_hash = k.content_hash();
    res.geometry_hash = g.content_hash();

    Field u = u0;
    for (int i = g.i_min(); i <= g.i_max(); ++i)
        if (!g.index_in_closed_omega(i)) u.at(i) = 0.0;
    u.at(0) = 0.0;
    u.at(n) = 0.0;
    u.time = 0.0;
    res.snapshots.push_back(u);
    res.diagnostics.push_back({0.0, u.sup_norm(), u.min_value(), u.interior_mass()});

    std::vector<double> rhs(static_cast<std::size_t>(n) - 1);
    for (long step = 1; step <= n_steps; ++step) {
        const Field rate = apply_K(u, phi, k, cfg.apply_method);
        for (int i = 1; i < n; ++i)
            rhs[static_cast<std::size_t>(i - 1)] = u.at(i) + cfg.dt * rate.at(i);
        if (c > 0.0) solve_dirichlet_tridiag(rhs, c);
        for (int i = 1; i < n; ++i) u.at(i) = rhs[static_cast<std::size_t>(i - 1)];
        u.at(0) = 0.0;
        u.at(n) = 0.0;
        u.time = step * cfg.dt;
        if (!u.all_finite())
            throw std::runtime_error("viscous: non-finite value at step " + std::to_string(step));
        if (step % cfg.store_every == 0 || step == n_steps) {
            res.snapshots.push_back(u);
            res.diagnostics.push_back({u.time, u.sup_norm(), u.min_value(), u.interior_mass()});
        }
    }
    res.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

LayerReport boundary_layer_study(const Field& u0, const Kernel& k,
                                 const std::vector<double>& epsilons, const ViscousConfig& cfg) {
    if (epsilons.empty()) throw std::invalid_argument("layer study: empty epsilon list");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0))
            throw std::invalid_argument("layer study: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("layer study: epsilons must be strictly decreasing");
    }
    const auto& g = *u0.geom;
    const int n = g.n_cells();

    SolverConfig limit_cfg;
    limit_cfg.dt = cfg.dt;
    limit_cfg.t_final = cfg.t_final;
    limit_cfg.store_every = static_cast<int>(std::max<long long>(1, std::llround(cfg.t_final / cfg.dt)));
    limit_cfg.apply_method = cfg.apply_method;
    const SolveResult limit = solve(u0, BoundaryData::zero(), k, limit_cfg);
    const Field& u_lim = limit.snapshots.back();

    LayerReport rep;
    rep.u_limit_left = u_lim.at(0);
    rep.u_limit_right = u_lim.at(n);

    for (double eps : epsilons) {
        ViscousConfig one = cfg;
        one.epsilon = eps;
        one.store_every = static_cast<int>(std::max<long long>(1, std::llround(cfg.t_final / cfg.dt)));
        const SolveResult run = solve_viscous(u0, k, one);
        const Field& ue = run.snapshots.back();
        LayerRow row;
        row.epsilon = eps;
        for (int i = 1; i < n; ++i)
            row.sup_dist = std::max(row.sup_dist, std::abs(ue.at(i) - u_lim.at(i)));
        row.u_eps_near_left = ue.at(1);
        row.u_eps_near_right = ue.at(n - 1);
        rep.rows.push_back(row);
    }

    rep.sup_dist_nonincreasing = true;
    rep.sup_dist_decreasing = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        if (!(rep.rows[i].sup_dist <= rep.rows[i - 1].sup_dist)) rep.sup_dist_nonincreasing = false;
        if (!(rep.rows[i].sup_dist < rep.rows[i - 1].sup_dist)) rep.sup_dist_decreasing = false;
    }

    // symmetric positive-weight neighborhood of the origin on the lattice
    rep.positivity_hypothesis =
        k.weight(0) > 0.0 && k.radius_index() >= 1 && k.weight(1) > 0.0 && k.weight(-1) > 0.0;
    rep.limit_boundary_positive = rep.u_limit_left > 0.0 && rep.u_limit_right > 0.0;
    return rep;
}

}  // namespace nldiff
